//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "tailcert",
    version,
    about = "Certify and audit the tail behavior of push-forward generative models",
    after_help = "Latent specs: gaussian:d=64,sigma=I | cube:d=8,h=1 | ball:d=4,r=1 | \
                  slc:d=8,sigma=2I | sphere:d=64,r=1\n\
                  Target specs: cauchy:d=2 | student:d=2,dof=3 | gaussian:d=2,sigma=I\n\
                  Exit codes: 0 ok, 1 usage error, 2 data error, 3 certificate violation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Certify a network over a latent distribution and emit the tail
    /// certificate as JSON.
    Certify(CertifyArgs),
    /// Certify a diffusion sampling chain via its augmented-map reduction.
    CertifyDiffusion(CertifyDiffusionArgs),
    /// Draw samples from a latent spec, a heavy-tailed target, or a
    /// diffusion chain, and write them as CSV.
    Sample(SampleArgs),
    /// Draw latents and push them through a network.
    Push(PushArgs),
    /// Audit a sample CSV against a certificate; exits 3 on violation.
    Audit(AuditArgs),
    /// Join price CSVs on date and emit daily returns in basis points.
    IngestReturns(IngestReturnsArgs),
    /// Generate a random network file (weights N(0, scale^2/fan_in)).
    GenNetwork(GenNetworkArgs),
}

#[derive(Args)]
pub struct CertifyArgs {
    /// Network JSON file.
    #[arg(long)]
    pub model: PathBuf,
    /// Latent spec (mini-grammar), e.g. gaussian:d=64,sigma=I.
    #[arg(long)]
    pub latent: Option<String>,
    /// Spec as a JSON file (escape hatch for full matrices).
    #[arg(long)]
    pub spec_file: Option<PathBuf>,
    /// Constant mode: tight or paper.
    #[arg(long, default_value = "tight")]
    pub mode: String,
    /// Override the output dimension entering paper-form scales.
    #[arg(long)]
    pub p_override: Option<usize>,
    /// User-supplied Cheeger constant for log-concave latents.
    #[arg(long)]
    pub cheeger: Option<f64>,
    /// Absolute constant C for paper-form certificates.
    #[arg(long, default_value_t = 2.0)]
    pub c: f64,
    /// Constant C6 for the tight log-concave bound.
    #[arg(long, default_value_t = 1.0)]
    pub c6: f64,
    /// Relative tolerance for per-layer operator-norm estimation.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Output certificate path (JSON).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct CertifyDiffusionArgs {
    /// Noise-prediction network JSON file (inputs = state dim + 1).
    #[arg(long)]
    pub model: PathBuf,
    /// Schedule as T,beta_start,beta_end (linear betas, sigma = sqrt(beta)).
    #[arg(long)]
    pub schedule: String,
    /// Constant mode: tight or paper.
    #[arg(long, default_value = "tight")]
    pub mode: String,
    /// Absolute constant C for paper-form certificates.
    #[arg(long, default_value_t = 2.0)]
    pub c: f64,
    /// Relative tolerance for per-layer operator-norm estimation.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Output certificate path (JSON).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SampleArgs {
    /// Latent spec (mini-grammar).
    #[arg(long)]
    pub latent: Option<String>,
    /// Latent or target spec as a JSON file (escape hatch for full
    /// matrices).
    #[arg(long)]
    pub spec_file: Option<PathBuf>,
    /// Heavy-tailed target spec (mini-grammar).
    #[arg(long)]
    pub target: Option<String>,
    /// Noise-prediction network file; samples the diffusion chain
    /// (requires --schedule).
    #[arg(long)]
    pub chain: Option<PathBuf>,
    /// Schedule as T,beta_start,beta_end for --chain.
    #[arg(long)]
    pub schedule: Option<String>,
    /// Number of samples.
    #[arg(long)]
    pub n: usize,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// RNG stream id (parallel runs should use distinct streams).
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct PushArgs {
    /// Network JSON file.
    #[arg(long)]
    pub model: PathBuf,
    /// Latent spec (mini-grammar).
    #[arg(long)]
    pub latent: Option<String>,
    /// Latent spec as a JSON file.
    #[arg(long)]
    pub spec_file: Option<PathBuf>,
    /// Number of samples.
    #[arg(long)]
    pub n: usize,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// RNG stream id.
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct AuditArgs {
    /// Sample CSV (header dim_0,...,dim_{p-1}).
    #[arg(long)]
    pub samples: PathBuf,
    /// Certificate JSON produced by certify or certify-diffusion.
    #[arg(long)]
    pub cert: PathBuf,
    /// Direction panel: axes or axes+K extra random unit directions.
    #[arg(long, default_value = "axes+8")]
    pub directions: String,
    /// Grid as t0:t1:points; defaults to 41 points up to the certificate
    /// quantile at the testability floor.
    #[arg(long)]
    pub grid: Option<String>,
    /// Centering: mean or median.
    #[arg(long, default_value = "mean")]
    pub centering: String,
    /// Seed for the random panel directions.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Full report JSON output path.
    #[arg(long)]
    pub out_json: PathBuf,
    /// Exceedance CSV output path (per direction: suffix .dK for K > 0 when
    /// auditing more than one direction).
    #[arg(long)]
    pub out_csv: PathBuf,
    /// Optional survival-curve CSV (log10_t, log10_survival) per direction.
    #[arg(long)]
    pub out_survival: Option<PathBuf>,
}

#[derive(Args)]
pub struct IngestReturnsArgs {
    /// Price CSV path; repeat once per instrument.
    #[arg(long = "csv")]
    pub csv: Vec<PathBuf>,
    /// Name of the date column.
    #[arg(long)]
    pub date_col: String,
    /// Name of the closing-price column.
    #[arg(long)]
    pub price_col: String,
    /// Emit log returns instead of simple returns.
    #[arg(long, default_value_t = false)]
    pub log_returns: bool,
    /// Output returns CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct GenNetworkArgs {
    /// Comma-separated layer widths, e.g. 64,128,256,2.
    #[arg(long)]
    pub widths: String,
    /// Activation for every layer: relu, logistic, tanh, or identity.
    #[arg(long, default_value = "relu")]
    pub activation: String,
    /// Weight scale (std = scale / sqrt(fan_in)).
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// RNG stream id.
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Output network JSON path.
    #[arg(long)]
    pub out: PathBuf,
}
