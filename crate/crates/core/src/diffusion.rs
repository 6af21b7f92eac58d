//! Denoising diffusion reverse sampler and its certification.
//!
//! The reverse update, iterated from `tau = T` down to `1`, is
//!
//! ```text
//! X_{tau-1} = (1/sqrt(alpha_tau)) { X_tau - (1-alpha_tau)/sqrt(1-alpha_bar_tau) f(X_tau, tau) }
//!             + sigma_tau eps_tau 1{tau > 1}
//! ```
//!
//! with no noise added on the last step. The whole chain is a single
//! deterministic Lipschitz map on the augmented standard Gaussian
//! `(X_T, eps_1, ..., eps_T)` of dimension `p (T + 1)`; each step's Lipschitz
//! constant multiplies out, and the resulting sub-Gaussian certificate does
//! not depend on that augmented dimension.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::certificates::{
    AssumedConstants, ConstantConfig, ConstantMode, Provenance, TailCertificate, TailFamily,
};
use crate::latents::CertificateParams;
use crate::network::{FeedForwardNetwork, LipschitzBound};
use crate::numerics::{RngStream, Vector};
use crate::{Error, Result};

/// How per-step noise scales are derived from the variance schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaRule {
    /// `sigma_tau = sqrt(beta_tau)`, the common sampler choice.
    SqrtBeta,
}

/// Fixed variance schedule: `alpha = 1 - beta`,
/// `alpha_bar_tau = prod_{s <= tau} alpha_s`, `sigma` per [`SigmaRule`].
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    beta: Vec<f64>,
    alpha: Vec<f64>,
    alpha_bar: Vec<f64>,
    sigma: Vec<f64>,
    sigma_rule: SigmaRule,
}

impl Schedule {
    pub fn from_betas(beta: Vec<f64>, sigma_rule: SigmaRule) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::Domain("schedule needs at least one step".into()));
        }
        if let Some(b) = beta
            .iter()
            .find(|b| !(b.is_finite() && **b > 0.0 && **b < 1.0))
        {
            return Err(Error::Domain(format!(
                "every beta must lie strictly in (0, 1), got {b}"
            )));
        }
        let alpha: Vec<f64> = beta.iter().map(|b| 1.0 - b).collect();
        let mut alpha_bar = Vec::with_capacity(beta.len());
        let mut running = 1.0;
        for a in &alpha {
            running *= a;
            alpha_bar.push(running);
        }
        let sigma: Vec<f64> = match sigma_rule {
            SigmaRule::SqrtBeta => beta.iter().map(|b| b.sqrt()).collect(),
        };
        Ok(Self {
            beta,
            alpha,
            alpha_bar,
            sigma,
            sigma_rule,
        })
    }

    pub fn steps(&self) -> usize {
        self.beta.len()
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn alpha_bar(&self) -> &[f64] {
        &self.alpha_bar
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn sigma_rule(&self) -> SigmaRule {
        self.sigma_rule
    }
}

/// Betas linearly interpolated from `beta_start` to `beta_end` over `t_steps`
/// steps (a single step uses `beta_start`).
pub fn linear_schedule(
    t_steps: usize,
    beta_start: f64,
    beta_end: f64,
    sigma_rule: SigmaRule,
) -> Result<Schedule> {
    if t_steps == 0 {
        return Err(Error::Domain("schedule needs at least one step".into()));
    }
    if !(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0) {
        return Err(Error::Domain(format!(
            "schedule endpoints must satisfy 0 < beta_start <= beta_end < 1, got ({beta_start}, {beta_end})"
        )));
    }
    let betas = if t_steps == 1 {
        vec![beta_start]
    } else {
        (0..t_steps)
            .map(|i| beta_start + (beta_end - beta_start) * i as f64 / (t_steps - 1) as f64)
            .collect()
    };
    Schedule::from_betas(betas, sigma_rule)
}

/// A reverse sampling chain: schedule plus the noise-prediction network,
/// which takes the state and a time coordinate (`tau / T` appended as input
/// `p + 1`) and predicts the p-dimensional noise.
#[derive(Debug, Clone)]
pub struct DiffusionChain {
    schedule: Schedule,
    noise_net: FeedForwardNetwork,
    p: usize,
}

impl DiffusionChain {
    pub fn new(schedule: Schedule, noise_net: FeedForwardNetwork) -> Result<Self> {
        let p = noise_net.output_dim();
        if noise_net.input_dim() != p + 1 {
            return Err(Error::Shape(format!(
                "noise network must take state plus time ({} inputs for {p} outputs), got {}",
                p + 1,
                noise_net.input_dim()
            )));
        }
        Ok(Self {
            schedule,
            noise_net,
            p,
        })
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn noise_net(&self) -> &FeedForwardNetwork {
        &self.noise_net
    }

    pub fn state_dim(&self) -> usize {
        self.p
    }

    /// Dimension of the augmented Gaussian `(X_T, eps_1, ..., eps_T)`.
    pub fn augmented_dim(&self) -> usize {
        self.p * (self.schedule.steps() + 1)
    }

    /// Run the reverse chain as the deterministic map it is: given the
    /// terminal state and the full noise sequence (`noises[tau - 1]` is
    /// `eps_tau`; `eps_1` is carried but never used), produce `X_0`.
    pub fn run_deterministic(&self, x_terminal: &Vector, noises: &[Vector]) -> Result<Vector> {
        let t_steps = self.schedule.steps();
        if x_terminal.dim() != self.p {
            return Err(Error::Shape(format!(
                "terminal state has dim {}, expected {}",
                x_terminal.dim(),
                self.p
            )));
        }
        if noises.len() != t_steps {
            return Err(Error::Shape(format!(
                "expected {t_steps} noise vectors, got {}",
                noises.len()
            )));
        }
        if let Some(bad) = noises.iter().find(|n| n.dim() != self.p) {
            return Err(Error::Shape(format!(
                "noise vector has dim {}, expected {}",
                bad.dim(),
                self.p
            )));
        }
        let mut x = x_terminal.clone();
        for tau in (1..=t_steps).rev() {
            let i = tau - 1;
            let alpha = self.schedule.alpha[i];
            let alpha_bar = self.schedule.alpha_bar[i];
            let coeff = (1.0 - alpha) / (1.0 - alpha_bar).sqrt();
            let time_coord = tau as f64 / t_steps as f64;
            let mut input = x.as_slice().to_vec();
            input.push(time_coord);
            let predicted = self
                .noise_net
                .forward(&Vector::new(input).expect("finite state"))?;
            x = x.sub(&predicted.scale(coeff)).scale(1.0 / alpha.sqrt());
            if tau > 1 {
                x = x.add(&noises[i].scale(self.schedule.sigma[i]));
            }
        }
        Ok(x)
    }

    /// Draw `n` independent `X_0` samples; deterministic in `rng`.
    pub fn sample(&self, rng: &RngStream, n: usize) -> Result<Vec<Vector>> {
        if n == 0 {
            return Err(Error::Domain("sample count must be at least 1".into()));
        }
        let mut r = rng.rng();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let (x_terminal, noises) = draw_augmented(&mut r, self.p, self.schedule.steps());
            out.push(self.run_deterministic(&x_terminal, &noises)?);
        }
        Ok(out)
    }

    /// One draw of the augmented Gaussian input `(X_T, eps_1, ..., eps_T)`.
    pub fn sample_augmented_input(&self, r: &mut impl rand::Rng) -> (Vector, Vec<Vector>) {
        draw_augmented(r, self.p, self.schedule.steps())
    }
}

fn draw_augmented(r: &mut impl rand::Rng, p: usize, t_steps: usize) -> (Vector, Vec<Vector>) {
    let mut gauss = |dim: usize| {
        Vector::new(
            (0..dim)
                .map(|_| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, r))
                .collect(),
        )
        .expect("finite")
    };
    let x_terminal = gauss(p);
    let noises = (0..t_steps).map(|_| gauss(p)).collect();
    (x_terminal, noises)
}

/// Per-step Lipschitz bounds of the augmented-map factorization and their
/// product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainLipschitzBound {
    pub per_step: Vec<f64>,
    pub composite: f64,
}

/// Bound each step of the chain as a map on the augmented vector:
///
/// ```text
/// L_tau = (1/sqrt(alpha_tau)) (1 + (1-alpha_tau)/sqrt(1-alpha_bar_tau) L_f)
///         + sigma_tau 1{tau > 1} + 1
/// ```
///
/// The head of the map moves the state by the scaled network step and (for
/// `tau > 1`) adds scaled noise read off the carried coordinates; the
/// trailing `+ 1` accounts for carrying those coordinates forward unchanged.
pub fn per_step_lipschitz(chain: &DiffusionChain, lip_f: &LipschitzBound) -> ChainLipschitzBound {
    let schedule = chain.schedule();
    let t_steps = schedule.steps();
    let mut per_step = Vec::with_capacity(t_steps);
    let mut composite = 1.0;
    for tau in 1..=t_steps {
        let i = tau - 1;
        let alpha = schedule.alpha[i];
        let alpha_bar = schedule.alpha_bar[i];
        let coeff = (1.0 - alpha) / (1.0 - alpha_bar).sqrt();
        let noise_term = if tau > 1 { schedule.sigma[i] } else { 0.0 };
        let l_tau = (1.0 + coeff * lip_f.value) / alpha.sqrt() + noise_term + 1.0;
        per_step.push(l_tau);
        composite *= l_tau;
    }
    ChainLipschitzBound {
        per_step,
        composite,
    }
}

/// Sub-Gaussian certificate for `X_0`: the chain is one Lipschitz map with
/// constant `prod L_tau` on an augmented standard Gaussian, so the Gaussian
/// route applies with `||sigma|| = 1` and the augmented dimension never
/// enters. Tight mode: `scale^2 = 2 (prod L_tau)^2`; paper form:
/// `scale^2 = C^2 p (prod L_tau)^2`.
pub fn certify_diffusion(
    chain: &DiffusionChain,
    lip_f: &LipschitzBound,
    mode: ConstantMode,
    cfg: &ConstantConfig,
) -> Result<TailCertificate> {
    let bound = per_step_lipschitz(chain, lip_f);
    if !(bound.composite.is_finite() && bound.composite > 0.0) {
        return Err(Error::Domain(format!(
            "composite chain Lipschitz bound must be positive and finite, got {}",
            bound.composite
        )));
    }
    let p = chain.state_dim();
    let effective = LipschitzBound {
        value: bound.composite,
        per_layer: vec![],
        method: lip_f.method,
    };
    let params = CertificateParams {
        sigma_op_norm: 1.0,
        sigma_sqrt_op_norm: 1.0,
        cheeger: None,
        gamma: Some(1.0),
        ricci_lower: None,
        embedding_lipschitz: None,
    };
    let (scale, assumed) = match mode {
        ConstantMode::Tight => (
            (2.0_f64).sqrt() * effective.value,
            AssumedConstants::default(),
        ),
        ConstantMode::PaperForm => (
            cfg.c * (p as f64).sqrt() * effective.value,
            AssumedConstants {
                c: Some(cfg.c),
                ..Default::default()
            },
        ),
    };
    TailCertificate::from_parts(
        TailFamily::SubGaussian,
        scale,
        2.0,
        mode,
        p,
        Provenance {
            theorem: "diffusion_chain_reduction".into(),
            lipschitz: effective.value,
            latent_params: params,
            assumed_constants: assumed,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{random_network, Activation, BoundMethod};

    fn zero_noise_net(p: usize) -> FeedForwardNetwork {
        random_network(
            &RngStream::new(0, 0),
            &[p + 1, p],
            Activation::Identity,
            0.0,
        )
        .unwrap()
    }

    fn lip(value: f64) -> LipschitzBound {
        LipschitzBound {
            value,
            per_layer: vec![],
            method: BoundMethod::Min,
        }
    }

    #[test]
    fn linear_schedule_two_steps() {
        let s = linear_schedule(2, 0.1, 0.2, SigmaRule::SqrtBeta).unwrap();
        assert_eq!(s.beta(), &[0.1, 0.2]);
        assert!((s.alpha()[0] - 0.9).abs() < 1e-15);
        assert!((s.alpha()[1] - 0.8).abs() < 1e-15);
        assert!((s.alpha_bar()[0] - 0.9).abs() < 1e-15);
        assert!((s.alpha_bar()[1] - 0.72).abs() < 1e-15);
    }

    #[test]
    fn linear_schedule_single_step() {
        let s = linear_schedule(1, 0.3, 0.3, SigmaRule::SqrtBeta).unwrap();
        assert!((s.alpha_bar()[0] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn linear_schedule_midpoint_at_standard_settings() {
        let s = linear_schedule(1000, 0.0001, 0.02, SigmaRule::SqrtBeta).unwrap();
        assert!((s.beta()[499] - 0.01).abs() < 1e-4, "got {}", s.beta()[499]);
        // Recurrence and monotonicity.
        for i in 1..1000 {
            assert!(s.alpha_bar()[i] < s.alpha_bar()[i - 1]);
            assert!((s.alpha_bar()[i] - s.alpha_bar()[i - 1] * s.alpha()[i]).abs() <= 1e-12);
            assert_eq!(s.sigma()[i], s.beta()[i].sqrt());
        }
    }

    #[test]
    fn linear_schedule_rejects_bad_endpoints() {
        assert!(linear_schedule(10, 0.0, 0.5, SigmaRule::SqrtBeta).is_err());
        assert!(linear_schedule(10, 0.2, 0.1, SigmaRule::SqrtBeta).is_err());
        assert!(linear_schedule(10, 0.5, 1.0, SigmaRule::SqrtBeta).is_err());
    }

    #[test]
    fn zero_net_single_step_is_pure_scaling() {
        let schedule = linear_schedule(1, 0.1, 0.1, SigmaRule::SqrtBeta).unwrap();
        let chain = DiffusionChain::new(schedule, zero_noise_net(2)).unwrap();
        let x = Vector::new(vec![0.5, -1.5]).unwrap();
        let eps = vec![Vector::new(vec![9.0, 9.0]).unwrap()];
        let out = chain.run_deterministic(&x, &eps).unwrap();
        let scale = 1.0 / 0.9_f64.sqrt();
        assert!((out.as_slice()[0] - 0.5 * scale).abs() < 1e-15);
        assert!((out.as_slice()[1] + 1.5 * scale).abs() < 1e-15);
    }

    #[test]
    fn zero_net_tiny_betas_is_near_identity() {
        let schedule = linear_schedule(5, 1e-9, 1e-9, SigmaRule::SqrtBeta).unwrap();
        let chain = DiffusionChain::new(schedule, zero_noise_net(2)).unwrap();
        let x = Vector::new(vec![1.0, 2.0]).unwrap();
        let eps: Vec<Vector> = (0..5).map(|_| Vector::zeros(2)).collect();
        let out = chain.run_deterministic(&x, &eps).unwrap();
        assert!((out.as_slice()[0] - 1.0).abs() < 1e-7);
        assert!((out.as_slice()[1] - 2.0).abs() < 1e-7);
    }

    #[test]
    fn sampling_deterministic() {
        let schedule = linear_schedule(3, 0.01, 0.02, SigmaRule::SqrtBeta).unwrap();
        let net = random_network(&RngStream::new(5, 0), &[3, 4, 2], Activation::Tanh, 0.5).unwrap();
        let chain = DiffusionChain::new(schedule, net).unwrap();
        let a = chain.sample(&RngStream::new(1, 2), 4).unwrap();
        let b = chain.sample(&RngStream::new(1, 2), 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn per_step_hand_value() {
        let schedule = linear_schedule(1, 0.1, 0.1, SigmaRule::SqrtBeta).unwrap();
        let chain = DiffusionChain::new(schedule, zero_noise_net(2)).unwrap();
        let b = per_step_lipschitz(&chain, &lip(1.0));
        let expected = (1.0 + 0.1_f64.sqrt()) / 0.9_f64.sqrt() + 1.0;
        assert!((b.per_step[0] - expected).abs() < 1e-12);
        assert!((expected - 2.38742).abs() < 1e-5);
        assert_eq!(b.composite, b.per_step[0]);
    }

    #[test]
    fn per_step_zero_network() {
        let schedule = linear_schedule(1, 0.1, 0.1, SigmaRule::SqrtBeta).unwrap();
        let chain = DiffusionChain::new(schedule, zero_noise_net(2)).unwrap();
        let b = per_step_lipschitz(&chain, &lip(0.0));
        let expected = 1.0 / 0.9_f64.sqrt() + 1.0;
        assert!((b.per_step[0] - expected).abs() < 1e-12);
        assert!((expected - 2.05409).abs() < 1e-5);
    }

    #[test]
    fn composite_is_product() {
        let schedule = linear_schedule(2, 0.1, 0.2, SigmaRule::SqrtBeta).unwrap();
        let chain = DiffusionChain::new(schedule, zero_noise_net(2)).unwrap();
        let b = per_step_lipschitz(&chain, &lip(0.7));
        assert!((b.composite - b.per_step[0] * b.per_step[1]).abs() <= 1e-9 * b.composite);
        // Second step carries the noise term, first does not.
        assert!(b.per_step[1] > b.per_step[0]);
    }

    #[test]
    fn certificate_matches_hand_value() {
        let schedule = linear_schedule(1, 0.1, 0.1, SigmaRule::SqrtBeta).unwrap();
        let chain = DiffusionChain::new(schedule, zero_noise_net(2)).unwrap();
        let cert = certify_diffusion(
            &chain,
            &lip(1.0),
            ConstantMode::Tight,
            &ConstantConfig::default(),
        )
        .unwrap();
        let l1 = (1.0 + 0.1_f64.sqrt()) / 0.9_f64.sqrt() + 1.0;
        assert!((cert.scale().powi(2) - 2.0 * l1 * l1).abs() < 1e-9);
        assert!((cert.scale().powi(2) - 11.3996).abs() < 1e-3);
        assert_eq!(cert.evaluate(0.0).unwrap(), 1.0);
    }

    #[test]
    fn rejects_wrong_noise_net_shape() {
        let schedule = linear_schedule(1, 0.1, 0.1, SigmaRule::SqrtBeta).unwrap();
        let net = random_network(&RngStream::new(0, 0), &[2, 2], Activation::Relu, 1.0).unwrap();
        assert!(DiffusionChain::new(schedule, net).is_err());
    }
}
