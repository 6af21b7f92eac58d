//! Latent-distribution samplers, each bundled with the parameters its
//! concentration certificate needs: the covariance operator norm, a Cheeger
//! constant (user-supplied or a flagged heuristic default), a strong
//! log-concavity modulus, or a Ricci curvature lower bound for spherical
//! latents.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::numerics::{cholesky, operator_norm_upper_bound, Matrix, RngStream, Vector};
use crate::{Error, Result};

const OP_NORM_TOL: f64 = 1e-9;
const OP_NORM_MAX_ITERS: usize = 10_000;

/// Conservative stand-in Cheeger constant for isotropic cube/ball latents
/// when the caller supplies none. Flagged as heuristic in provenance: exact
/// Cheeger constants for concrete densities are an open problem.
pub const DEFAULT_HEURISTIC_CHEEGER: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub mu: Vector,
    pub sigma: Matrix,
}

impl GaussianSpec {
    pub fn standard(dim: usize) -> Self {
        Self {
            mu: Vector::zeros(dim),
            sigma: Matrix::identity(dim),
        }
    }

    pub fn isotropic(dim: usize, variance: f64) -> Self {
        Self {
            mu: Vector::zeros(dim),
            sigma: Matrix::scaled_identity(dim, variance),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sigma.rows() != self.sigma.cols() {
            return Err(Error::Shape("covariance must be square".into()));
        }
        if self.mu.dim() != self.sigma.rows() {
            return Err(Error::Shape(format!(
                "mean has dim {} but covariance is {}x{}",
                self.mu.dim(),
                self.sigma.rows(),
                self.sigma.cols()
            )));
        }
        cholesky(&self.sigma)?;
        Ok(())
    }
}

/// Latent-distribution descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatentSpec {
    Gaussian(GaussianSpec),
    UniformCube {
        dim: usize,
        half_side: f64,
    },
    UniformBall {
        dim: usize,
        radius: f64,
    },
    /// Realized through its Gaussian base, the canonical strongly log-concave
    /// example with exactly known modulus `gamma = 1 / ||sigma||`. An
    /// externally derived `gamma` may be supplied instead.
    StronglyLogConcave {
        base: GaussianSpec,
        gamma: Option<f64>,
    },
    /// Uniform distribution on the sphere of the given radius embedded in
    /// `R^{ambient_dim}`; intrinsic dimension is `ambient_dim - 1`.
    Sphere {
        ambient_dim: usize,
        radius: f64,
    },
}

/// Where a Cheeger constant came from; certificates surface this so a
/// heuristic default is never mistaken for a theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheegerSource {
    UserSupplied,
    HeuristicDefault,
}

impl CheegerSource {
    pub fn describe(self) -> &'static str {
        match self {
            CheegerSource::UserSupplied => "user supplied",
            CheegerSource::HeuristicDefault => "heuristic, not a theorem",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheegerConstant {
    pub value: f64,
    pub source: CheegerSource,
}

/// Parameters a tail certificate draws from the latent distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateParams {
    /// Operator norm of the covariance (upper bound, certificate-safe).
    pub sigma_op_norm: f64,
    /// Operator norm of the covariance square root.
    pub sigma_sqrt_op_norm: f64,
    pub cheeger: Option<CheegerConstant>,
    pub gamma: Option<f64>,
    pub ricci_lower: Option<f64>,
    pub embedding_lipschitz: Option<f64>,
}

impl LatentSpec {
    /// Dimension of the sampled vectors (ambient dimension for the sphere).
    pub fn dim(&self) -> usize {
        match self {
            LatentSpec::Gaussian(g) => g.mu.dim(),
            LatentSpec::UniformCube { dim, .. } | LatentSpec::UniformBall { dim, .. } => *dim,
            LatentSpec::StronglyLogConcave { base, .. } => base.mu.dim(),
            LatentSpec::Sphere { ambient_dim, .. } => *ambient_dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LatentSpec::Gaussian(g) => g.validate(),
            LatentSpec::UniformCube { dim, half_side } => {
                if *dim == 0 {
                    return Err(Error::Domain("cube dim must be positive".into()));
                }
                if *half_side <= 0.0 || !half_side.is_finite() {
                    return Err(Error::Domain("cube half_side must be positive".into()));
                }
                Ok(())
            }
            LatentSpec::UniformBall { dim, radius } => {
                if *dim == 0 {
                    return Err(Error::Domain("ball dim must be positive".into()));
                }
                if *radius <= 0.0 || !radius.is_finite() {
                    return Err(Error::Domain("ball radius must be positive".into()));
                }
                Ok(())
            }
            LatentSpec::StronglyLogConcave { base, gamma } => {
                if let Some(g) = gamma {
                    if *g <= 0.0 || !g.is_finite() {
                        return Err(Error::Domain("gamma must be positive".into()));
                    }
                }
                base.validate()
            }
            LatentSpec::Sphere {
                ambient_dim,
                radius,
            } => {
                // Intrinsic dimension ambient_dim - 1 must be at least 2 for
                // the curvature bound to apply.
                if *ambient_dim < 3 {
                    return Err(Error::Domain(
                        "sphere ambient dimension must be at least 3".into(),
                    ));
                }
                if *radius <= 0.0 || !radius.is_finite() {
                    return Err(Error::Domain("sphere radius must be positive".into()));
                }
                Ok(())
            }
        }
    }

    /// Draw `n` i.i.d. latent vectors; deterministic in `rng`.
    pub fn sample(&self, rng: &RngStream, n: usize) -> Result<Vec<Vector>> {
        if n == 0 {
            return Err(Error::Domain("sample count must be at least 1".into()));
        }
        self.validate()?;
        let mut r = rng.rng();
        match self {
            LatentSpec::Gaussian(g) | LatentSpec::StronglyLogConcave { base: g, .. } => {
                sample_gaussian(g, &mut r, n)
            }
            LatentSpec::UniformCube { dim, half_side } => Ok((0..n)
                .map(|_| {
                    Vector::new(
                        (0..*dim)
                            .map(|_| r.random_range(-half_side..=*half_side))
                            .collect(),
                    )
                    .expect("finite")
                })
                .collect()),
            LatentSpec::UniformBall { dim, radius } => Ok((0..n)
                .map(|_| {
                    let dir = random_direction(&mut r, *dim);
                    let u: f64 = r.random_range(0.0..1.0);
                    dir.scale(radius * u.powf(1.0 / *dim as f64))
                })
                .collect()),
            LatentSpec::Sphere {
                ambient_dim,
                radius,
            } => Ok((0..n)
                .map(|_| random_direction(&mut r, *ambient_dim).scale(*radius))
                .collect()),
        }
    }

    /// Extract the certificate parameters for this latent family.
    /// `cheeger_override` supplies a user Cheeger constant; otherwise the
    /// cube/ball families fall back to the flagged heuristic default.
    pub fn certificate_params(&self, cheeger_override: Option<f64>) -> Result<CertificateParams> {
        self.validate()?;
        if let Some(c) = cheeger_override {
            if c <= 0.0 || !c.is_finite() {
                return Err(Error::Domain("Cheeger constant must be positive".into()));
            }
        }
        let user_cheeger = cheeger_override.map(|value| CheegerConstant {
            value,
            source: CheegerSource::UserSupplied,
        });
        let heuristic_cheeger = || {
            Some(user_cheeger.unwrap_or(CheegerConstant {
                value: DEFAULT_HEURISTIC_CHEEGER,
                source: CheegerSource::HeuristicDefault,
            }))
        };
        match self {
            LatentSpec::Gaussian(g) => {
                let op = operator_norm_upper_bound(&g.sigma, OP_NORM_TOL, OP_NORM_MAX_ITERS);
                Ok(CertificateParams {
                    sigma_op_norm: op,
                    sigma_sqrt_op_norm: op.sqrt(),
                    cheeger: user_cheeger,
                    // Any Gaussian is strongly log-concave with modulus
                    // 1 / ||sigma||.
                    gamma: Some(1.0 / op),
                    ricci_lower: None,
                    embedding_lipschitz: None,
                })
            }
            LatentSpec::StronglyLogConcave { base, gamma } => {
                let op = operator_norm_upper_bound(&base.sigma, OP_NORM_TOL, OP_NORM_MAX_ITERS);
                Ok(CertificateParams {
                    sigma_op_norm: op,
                    sigma_sqrt_op_norm: op.sqrt(),
                    cheeger: user_cheeger,
                    gamma: Some(gamma.unwrap_or(1.0 / op)),
                    ricci_lower: None,
                    embedding_lipschitz: None,
                })
            }
            LatentSpec::UniformCube { half_side, .. } => {
                // Per-coordinate variance of U[-h, h] is h^2 / 3.
                let op = half_side * half_side / 3.0;
                Ok(CertificateParams {
                    sigma_op_norm: op,
                    sigma_sqrt_op_norm: op.sqrt(),
                    cheeger: heuristic_cheeger(),
                    gamma: None,
                    ricci_lower: None,
                    embedding_lipschitz: None,
                })
            }
            LatentSpec::UniformBall { dim, radius } => {
                // Per-coordinate variance of the uniform ball is r^2/(d+2).
                let op = radius * radius / (*dim as f64 + 2.0);
                Ok(CertificateParams {
                    sigma_op_norm: op,
                    sigma_sqrt_op_norm: op.sqrt(),
                    cheeger: heuristic_cheeger(),
                    gamma: None,
                    ricci_lower: None,
                    embedding_lipschitz: None,
                })
            }
            LatentSpec::Sphere {
                ambient_dim,
                radius,
            } => {
                let d_int = (*ambient_dim - 1) as f64;
                let op = radius * radius / *ambient_dim as f64;
                Ok(CertificateParams {
                    sigma_op_norm: op,
                    sigma_sqrt_op_norm: op.sqrt(),
                    cheeger: None,
                    gamma: None,
                    // Ricci lower bound of the round sphere of radius r:
                    // (d_int - 1) / r^2.
                    ricci_lower: Some((d_int - 1.0) / (radius * radius)),
                    // The natural embedding contracts geodesic distance.
                    embedding_lipschitz: Some(1.0),
                })
            }
        }
    }
}

fn sample_gaussian(g: &GaussianSpec, r: &mut impl Rng, n: usize) -> Result<Vec<Vector>> {
    let factor = cholesky(&g.sigma)?;
    let dim = g.mu.dim();
    let diagonal = factor.is_diagonal();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let z: Vec<f64> = (0..dim)
            .map(|_| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, r))
            .collect();
        let g_vec = Vector::new(z).expect("finite");
        let correlated = if diagonal {
            Vector::new(
                g_vec
                    .as_slice()
                    .iter()
                    .enumerate()
                    .map(|(i, v)| factor.get(i, i) * v)
                    .collect(),
            )
            .expect("finite")
        } else {
            factor.matvec(&g_vec)?
        };
        out.push(g.mu.add(&correlated));
    }
    Ok(out)
}

fn random_direction(r: &mut impl Rng, dim: usize) -> Vector {
    loop {
        let v = Vector::new(
            (0..dim)
                .map(|_| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, r))
                .collect(),
        )
        .expect("finite");
        if let Some(u) = v.normalized() {
            return u;
        }
    }
}
