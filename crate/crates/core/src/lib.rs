//! Tail-behavior certification for push-forward generative models.
//!
//! A push-forward model draws a latent vector `z` from a simple distribution
//! and maps it through a finite feed-forward network `f`. Because such
//! networks are Lipschitz, the law of `f(z)` concentrates: for Gaussian,
//! log-concave, strongly log-concave, and positive-curvature-manifold
//! latents, closed-form tail bounds hold no matter how the network was
//! trained. This crate computes sound Lipschitz upper bounds, builds those
//! tail certificates (including for multi-step denoising diffusion
//! samplers), and audits empirical samples against them alongside
//! heavy-tail diagnostics (exceedance curves, Orlicz norms, Hill index).
//!
//! Modules:
//! - [`numerics`]: dense matrices/vectors, power iteration, Cholesky, seeded
//!   random streams.
//! - [`network`]: feed-forward networks, evaluation, certified Lipschitz
//!   bounds, the versioned network file format.
//! - [`latents`]: latent-distribution samplers with certificate parameters.
//! - [`certificates`]: closed-form sub-Gaussian / sub-exponential tail
//!   certificates and their evaluation/inversion.
//! - [`diffusion`]: DDPM reverse sampler and its reduction to a single
//!   Lipschitz map on an augmented Gaussian.
//! - [`audit`]: empirical tail diagnostics and certificate comparison.
//! - [`data_io`]: heavy-tailed reference targets and financial CSV
//!   ingestion.

use thiserror::Error as ThisError;

pub mod audit;
pub mod certificates;
pub mod data_io;
pub mod diffusion;
pub mod latents;
pub mod network;
pub mod numerics;

pub use audit::{
    compare_to_certificate, default_direction_panel, exceedance_curve, hill_estimator,
    max_growth_check, orlicz_psi1_estimate, orlicz_psi2_estimate, pushforward_samples,
    survival_curve, Centering, EmpiricalTailReport, MaxGrowthReport, SampleSet, SlackRule, Verdict,
};
pub use certificates::{
    certify_gaussian, certify_logconcave, certify_manifold, certify_strongly_logconcave,
    ConstantConfig, ConstantMode, TailCertificate, TailFamily,
};
pub use data_io::{ingest_returns, sample_target, ReturnMode, TargetSpec};
pub use diffusion::{
    certify_diffusion, linear_schedule, per_step_lipschitz, ChainLipschitzBound, DiffusionChain,
    Schedule, SigmaRule,
};
pub use latents::{CertificateParams, GaussianSpec, LatentSpec};
pub use network::{random_network, Activation, FeedForwardNetwork, Layer, LipschitzBound};
pub use numerics::{
    cholesky, frobenius_norm, operator_norm_upper_bound, spectral_norm, Matrix, RngStream, Vector,
    RNG_ALGORITHM,
};

/// Crate-wide error type.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("{what} at index {index} is not finite")]
    NonFinite { what: String, index: usize },

    #[error(
        "{what} did not converge within {iterations} iterations (last estimate {last_estimate})"
    )]
    NonConvergence {
        what: String,
        iterations: usize,
        last_estimate: f64,
    },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("matrix is not positive definite: pivot {pivot} is too small")]
    NotPositiveDefinite { pivot: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("capability error: {0}")]
    Capability(String),

    #[error("network file error in {field}: {message}")]
    NetworkFile { field: String, message: String },

    #[error("ingestion error in {file} at row {row}: {message}")]
    Ingest {
        file: String,
        row: usize,
        message: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
