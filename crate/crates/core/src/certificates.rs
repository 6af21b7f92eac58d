//! Closed-form tail certificates for push-forward models and their
//! evaluation/inversion.
//!
//! A certificate bounds `Pr(|u^T [f(z) - E f(z)]| >= t)` for every unit
//! direction `u` by `prefactor * exp(-(t/scale)^2)` (sub-Gaussian) or
//! `prefactor * exp(-t/scale)` (sub-exponential), clamped to `[0, 1]`.
//!
//! Two constant modes are exposed. `tight` instantiates the single-direction
//! isoperimetric inequalities whose constants are fully explicit. `paper_form`
//! reproduces the theorem-statement shapes, which carry a `sqrt(p)`
//! component inflation and an absolute constant `C` that is configurable
//! because no specific value is canonical; every certificate records the
//! constants it assumed.

use serde::{Deserialize, Serialize};

use crate::latents::CertificateParams;
use crate::network::LipschitzBound;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailFamily {
    SubGaussian,
    SubExponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantMode {
    Tight,
    PaperForm,
}

/// Configurable absolute constants for `paper_form` certificates and the
/// log-concave inequality. Both are flagged in provenance wherever used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantConfig {
    /// Absolute constant `C` in paper-form scales.
    pub c: f64,
    /// Constant `C6` in the tight log-concave bound
    /// `exp(-cheeger * t / (C6 * L * ||sigma^{1/2}||))`.
    pub c6: f64,
}

impl Default for ConstantConfig {
    fn default() -> Self {
        Self { c: 2.0, c6: 1.0 }
    }
}

/// Constants a certificate assumed without proof, surfaced verbatim in every
/// serialized certificate.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AssumedConstants {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c6: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cheeger_source: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Which concentration route produced this certificate.
    pub theorem: String,
    /// Lipschitz upper bound used.
    pub lipschitz: f64,
    /// Latent parameters the scale was derived from.
    pub latent_params: CertificateParams,
    pub assumed_constants: AssumedConstants,
}

/// A closed-form tail bound `t -> p` with family tag, constants, and
/// provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "CertificateRepr")]
pub struct TailCertificate {
    family: TailFamily,
    scale: f64,
    prefactor: f64,
    constant_mode: ConstantMode,
    p: usize,
    provenance: Provenance,
}

#[derive(Serialize, Deserialize, Clone)]
struct CertificateRepr {
    family: TailFamily,
    scale: f64,
    prefactor: f64,
    constant_mode: ConstantMode,
    p: usize,
    provenance: Provenance,
}

impl From<TailCertificate> for CertificateRepr {
    fn from(c: TailCertificate) -> Self {
        Self {
            family: c.family,
            scale: c.scale,
            prefactor: c.prefactor,
            constant_mode: c.constant_mode,
            p: c.p,
            provenance: c.provenance,
        }
    }
}

impl<'de> Deserialize<'de> for TailCertificate {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let r = CertificateRepr::deserialize(deserializer)?;
        TailCertificate::new(
            r.family,
            r.scale,
            r.prefactor,
            r.constant_mode,
            r.p,
            r.provenance,
        )
        .map_err(serde::de::Error::custom)
    }
}

impl TailCertificate {
    pub(crate) fn from_parts(
        family: TailFamily,
        scale: f64,
        prefactor: f64,
        constant_mode: ConstantMode,
        p: usize,
        provenance: Provenance,
    ) -> Result<Self> {
        Self::new(family, scale, prefactor, constant_mode, p, provenance)
    }

    fn new(
        family: TailFamily,
        scale: f64,
        prefactor: f64,
        constant_mode: ConstantMode,
        p: usize,
        provenance: Provenance,
    ) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Domain(format!(
                "certificate scale must be positive and finite, got {scale}"
            )));
        }
        if !(1.0..=2.0).contains(&prefactor) {
            return Err(Error::Domain(format!(
                "certificate prefactor must lie in [1, 2], got {prefactor}"
            )));
        }
        if p == 0 {
            return Err(Error::Domain("output dimension must be positive".into()));
        }
        Ok(Self {
            family,
            scale,
            prefactor,
            constant_mode,
            p,
            provenance,
        })
    }

    pub fn family(&self) -> TailFamily {
        self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    pub fn constant_mode(&self) -> ConstantMode {
        self.constant_mode
    }

    pub fn output_dim(&self) -> usize {
        self.p
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn is_sub_gaussian(&self) -> bool {
        self.family == TailFamily::SubGaussian
    }

    /// Clamped tail bound at `t >= 0`; non-increasing in `t`.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Domain(format!(
                "tail bound evaluated at invalid t = {t}"
            )));
        }
        Ok(self.raw_bound(t).min(1.0))
    }

    /// Unclamped bound value; above 1 the certificate says nothing
    /// (`evaluate` reports the vacuous value 1).
    pub fn raw_bound(&self, t: f64) -> f64 {
        let x = t / self.scale;
        match self.family {
            TailFamily::SubGaussian => self.prefactor * (-x * x).exp(),
            TailFamily::SubExponential => self.prefactor * (-x).exp(),
        }
    }

    /// Smallest `t` with `evaluate(t) <= delta`, in closed form.
    pub fn quantile(&self, delta: f64) -> Result<f64> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Domain(format!(
                "quantile requires delta in (0, 1), got {delta}"
            )));
        }
        let log_ratio = (self.prefactor / delta).ln();
        Ok(match self.family {
            TailFamily::SubGaussian => self.scale * log_ratio.sqrt(),
            TailFamily::SubExponential => self.scale * log_ratio,
        })
    }
}

fn lip_value(lip: &LipschitzBound) -> Result<f64> {
    if !(lip.value.is_finite() && lip.value > 0.0) {
        return Err(Error::Domain(format!(
            "certificates need a positive finite Lipschitz bound, got {} \
             (a zero bound means the generator is constant and has no tail)",
            lip.value
        )));
    }
    Ok(lip.value)
}

fn check_p(p: usize) -> Result<f64> {
    if p == 0 {
        return Err(Error::Domain("output dimension must be positive".into()));
    }
    Ok(p as f64)
}

/// Sub-Gaussian certificate for Gaussian latents.
///
/// Tight mode: `2 exp(-t^2 / (2 L^2 ||sigma||))`, valid per unit direction
/// since `u^T f` is itself `L`-Lipschitz. Paper form:
/// `scale^2 = C^2 p L^2 ||sigma||`.
pub fn certify_gaussian(
    lip: &LipschitzBound,
    params: &CertificateParams,
    p: usize,
    mode: ConstantMode,
    cfg: &ConstantConfig,
) -> Result<TailCertificate> {
    let l = lip_value(lip)?;
    let pf = check_p(p)?;
    let sigma_op = params.sigma_op_norm;
    if !(sigma_op.is_finite() && sigma_op > 0.0) {
        return Err(Error::Capability(
            "Gaussian certificate needs a positive covariance operator norm".into(),
        ));
    }
    let (scale, assumed) = match mode {
        ConstantMode::Tight => ((2.0 * l * l * sigma_op).sqrt(), AssumedConstants::default()),
        ConstantMode::PaperForm => (
            cfg.c * pf.sqrt() * l * sigma_op.sqrt(),
            AssumedConstants {
                c: Some(cfg.c),
                ..Default::default()
            },
        ),
    };
    TailCertificate::new(
        TailFamily::SubGaussian,
        scale,
        2.0,
        mode,
        p,
        Provenance {
            theorem: "gaussian_isoperimetry".into(),
            lipschitz: l,
            latent_params: params.clone(),
            assumed_constants: assumed,
        },
    )
}

/// Sub-exponential certificate for log-concave latents; requires a Cheeger
/// constant (user-supplied or flagged heuristic).
///
/// Tight mode: `exp(-cheeger * t / (C6 * L * ||sigma^{1/2}||))`. Paper form:
/// `2 exp(-t / scale)` with `scale = C sqrt(p) L ||sigma^{1/2}|| / cheeger`.
pub fn certify_logconcave(
    lip: &LipschitzBound,
    params: &CertificateParams,
    p: usize,
    mode: ConstantMode,
    cfg: &ConstantConfig,
) -> Result<TailCertificate> {
    let l = lip_value(lip)?;
    let pf = check_p(p)?;
    let cheeger = params.cheeger.ok_or_else(|| {
        Error::Capability(
            "log-concave certificate needs a Cheeger constant (none supplied and no default \
             permitted for this latent family)"
                .into(),
        )
    })?;
    let sqrt_op = params.sigma_sqrt_op_norm;
    if !(sqrt_op.is_finite() && sqrt_op > 0.0) {
        return Err(Error::Capability(
            "log-concave certificate needs ||sigma^{1/2}||".into(),
        ));
    }
    let (scale, prefactor, assumed) = match mode {
        ConstantMode::Tight => (
            cfg.c6 * l * sqrt_op / cheeger.value,
            1.0,
            AssumedConstants {
                c6: Some(cfg.c6),
                cheeger_source: Some(cheeger.source.describe().into()),
                ..Default::default()
            },
        ),
        ConstantMode::PaperForm => (
            cfg.c * pf.sqrt() * l * sqrt_op / cheeger.value,
            2.0,
            AssumedConstants {
                c: Some(cfg.c),
                cheeger_source: Some(cheeger.source.describe().into()),
                ..Default::default()
            },
        ),
    };
    TailCertificate::new(
        TailFamily::SubExponential,
        scale,
        prefactor,
        mode,
        p,
        Provenance {
            theorem: "log_concave_cheeger".into(),
            lipschitz: l,
            latent_params: params.clone(),
            assumed_constants: assumed,
        },
    )
}

/// Sub-Gaussian certificate for strongly log-concave latents.
///
/// Tight mode: `2 exp(-gamma t^2 / (4 L^2))`. Paper form:
/// `scale^2 = C^2 p L^2 ||sigma|| / gamma`.
pub fn certify_strongly_logconcave(
    lip: &LipschitzBound,
    params: &CertificateParams,
    p: usize,
    mode: ConstantMode,
    cfg: &ConstantConfig,
) -> Result<TailCertificate> {
    let l = lip_value(lip)?;
    let pf = check_p(p)?;
    let gamma = params.gamma.ok_or_else(|| {
        Error::Capability(
            "strongly log-concave certificate needs gamma; this latent family is not strongly \
             log-concave"
                .into(),
        )
    })?;
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Domain(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let (scale, assumed) = match mode {
        ConstantMode::Tight => (2.0 * l / gamma.sqrt(), AssumedConstants::default()),
        ConstantMode::PaperForm => {
            let sigma_op = params.sigma_op_norm;
            if !(sigma_op.is_finite() && sigma_op > 0.0) {
                return Err(Error::Capability(
                    "paper-form strongly log-concave certificate needs ||sigma||".into(),
                ));
            }
            (
                cfg.c * pf.sqrt() * l * (sigma_op / gamma).sqrt(),
                AssumedConstants {
                    c: Some(cfg.c),
                    ..Default::default()
                },
            )
        }
    };
    TailCertificate::new(
        TailFamily::SubGaussian,
        scale,
        2.0,
        mode,
        p,
        Provenance {
            theorem: "strongly_log_concave".into(),
            lipschitz: l,
            latent_params: params.clone(),
            assumed_constants: assumed,
        },
    )
}

/// Sub-Gaussian certificate for latents uniform on a compact manifold with
/// Ricci curvature bounded below by `lambda > 0`, pushed through an
/// `embedding_lipschitz`-Lipschitz embedding.
///
/// Tight mode: `2 exp(-lambda t^2 / (2 L^2 L_phi^2))`. Paper form:
/// `scale^2 = C^2 p L^2 L_phi^2 / lambda`.
pub fn certify_manifold(
    lip: &LipschitzBound,
    params: &CertificateParams,
    p: usize,
    mode: ConstantMode,
    cfg: &ConstantConfig,
) -> Result<TailCertificate> {
    let l = lip_value(lip)?;
    let pf = check_p(p)?;
    let lambda = params.ricci_lower.ok_or_else(|| {
        Error::Capability("manifold certificate needs a Ricci curvature lower bound".into())
    })?;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!(
            "Ricci curvature lower bound must be positive, got {lambda}"
        )));
    }
    let l_phi = params.embedding_lipschitz.ok_or_else(|| {
        Error::Capability("manifold certificate needs the embedding Lipschitz constant".into())
    })?;
    if !(l_phi.is_finite() && l_phi > 0.0) {
        return Err(Error::Domain(format!(
            "embedding Lipschitz constant must be positive, got {l_phi}"
        )));
    }
    let (scale, assumed) = match mode {
        ConstantMode::Tight => (
            (2.0 * l * l * l_phi * l_phi / lambda).sqrt(),
            AssumedConstants::default(),
        ),
        ConstantMode::PaperForm => (
            cfg.c * pf.sqrt() * l * l_phi / lambda.sqrt(),
            AssumedConstants {
                c: Some(cfg.c),
                ..Default::default()
            },
        ),
    };
    TailCertificate::new(
        TailFamily::SubGaussian,
        scale,
        2.0,
        mode,
        p,
        Provenance {
            theorem: "positive_ricci_manifold".into(),
            lipschitz: l,
            latent_params: params.clone(),
            assumed_constants: assumed,
        },
    )
}
