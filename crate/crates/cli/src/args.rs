use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use robustpr::{FieldTag, NoiseSpec};

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be positive and finite, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn field(s: &str) -> Result<FieldTag, String> {
    s.parse()
}

fn noise(s: &str) -> Result<NoiseSpec, String> {
    s.parse::<NoiseSpec>().map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "robustpr",
    version,
    about = "Robust sparse phase retrieval: generate instances, solve, benchmark and diagnose",
    after_help = "Exit codes: 0 success, 2 usage or validation error, 3 domain error, 4 I/O error.\n\
                  ROBUSTPR_THREADS caps the number of worker threads used for trials."
)]
pub struct Cli {
    /// Read flags from a `key = value` file. Command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize an instance and write it as JSON.
    Gen(GenArgs),
    /// Solve an instance from its spectral initializer.
    Solve(SolveArgs),
    /// Monte Carlo experiments.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Reconstruct a grayscale PGM image from synthetic measurements.
    Image(ImageArgs),
    /// Stability, linear-rate and noise diagnostics.
    #[command(subcommand)]
    Diag(DiagCommand),
}

/// Parameters of a synthetic instance.
#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Scalar field: real or complex.
    #[arg(long, default_value = "real", value_parser = field)]
    pub field: FieldTag,
    /// Signal length.
    #[arg(long, default_value_t = 128, value_parser = positive_usize)]
    pub p: usize,
    /// Number of nonzero entries.
    #[arg(long, default_value_t = 12, value_parser = positive_usize)]
    pub s: usize,
    /// Noise model: none, type1:η, type2:η, type3:η or gaussian:η.
    #[arg(long, default_value = "none", value_parser = noise)]
    pub noise: NoiseSpec,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Huber threshold α (1.345 for dense noise, 0.1345 for outliers).
    #[arg(long, default_value_t = 1.345, value_parser = positive_f64)]
    pub alpha: f64,
    /// Initial step γ of the line search, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Backtracking ratio β, in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    /// Sufficient-decrease constant δ.
    #[arg(long, default_value_t = 1e-4)]
    pub delta: f64,
    /// Stopping tolerance ε.
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    /// Iteration limit.
    #[arg(long, default_value_t = 5000, value_parser = positive_usize)]
    pub max_iter: usize,
    /// Backtracking limit per iteration.
    #[arg(long, default_value_t = 60, value_parser = positive_usize)]
    pub max_backtracks: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SpectralArgs {
    /// Power iterations for the spectral initializer.
    #[arg(long, default_value_t = 200, value_parser = positive_usize)]
    pub power_iterations: usize,
    /// Power iteration stops once successive iterates are this close in angle.
    #[arg(long, default_value_t = 1e-8, value_parser = positive_f64)]
    pub power_tol: f64,
    /// Keep this many largest entries of the initial direction
    /// [default: 2s for complex fields when s is known, otherwise all].
    #[arg(long, value_parser = positive_usize)]
    pub truncation: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Signal length.
    #[arg(long, value_parser = positive_usize)]
    pub p: usize,
    /// Number of nonzero entries.
    #[arg(long, value_parser = positive_usize)]
    pub s: usize,
    /// Number of measurements.
    #[arg(long, value_parser = positive_usize)]
    pub n: usize,
    /// Scalar field: real or complex.
    #[arg(long, default_value = "real", value_parser = field)]
    pub field: FieldTag,
    /// Noise model: none, type1:η, type2:η, type3:η or gaussian:η.
    #[arg(long, default_value = "none", value_parser = noise)]
    pub noise: NoiseSpec,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output instance file.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance file written by `gen`.
    #[arg(long, value_name = "FILE")]
    pub instance: PathBuf,
    /// Regularization weight λ. Required; `bench lambda-grid` helps choose it.
    #[arg(long, value_parser = positive_f64)]
    pub lambda: Option<f64>,
    /// Sparsity level, used for the default truncation of complex initializers.
    #[arg(long, value_parser = positive_usize)]
    pub s: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub spectral: SpectralArgs,
    /// Seed of the power-iteration start vector.
    #[arg(long, default_value_t = 0)]
    pub init_seed: u64,
    /// Result file (JSON).
    #[arg(long, value_name = "FILE", default_value = "result.json")]
    pub out: PathBuf,
    /// Per-iteration trace (CSV).
    #[arg(long, value_name = "FILE", default_value = "trace.csv")]
    pub trace: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Success rate over a grid of n/p ratios.
    SuccessRate(SuccessRateArgs),
    /// Relative error of every iterate on one instance.
    ErrorIter(ErrorIterArgs),
    /// Score a grid of λ values on one instance.
    LambdaGrid(LambdaGridArgs),
    /// Relative error against n.
    Consistency(ConsistencyArgs),
}

#[derive(Debug, Args)]
pub struct SuccessRateArgs {
    #[command(flatten)]
    pub synth: SynthArgs,
    /// Comma-separated n/p ratios, ascending.
    #[arg(long, value_delimiter = ',', required = true, value_parser = positive_f64)]
    pub grid: Vec<f64>,
    /// Trials per grid point.
    #[arg(long, default_value_t = 50, value_parser = positive_usize)]
    pub trials: usize,
    /// A trial succeeds when its relative error is below this.
    #[arg(long, default_value_t = 5e-3, value_parser = positive_f64)]
    pub threshold: f64,
    /// Regularization weight λ. Required.
    #[arg(long, value_parser = positive_f64)]
    pub lambda: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub spectral: SpectralArgs,
    /// Add per-trial wall-clock times to the trial CSV. Makes output nondeterministic.
    #[arg(long)]
    pub timing: bool,
    /// Output prefix: writes PREFIX.csv, PREFIX_trials.csv, PREFIX.json and PREFIX.gp.
    #[arg(long, value_name = "PREFIX", default_value = "success_rate")]
    pub out_prefix: PathBuf,
}

#[derive(Debug, Args)]
pub struct ErrorIterArgs {
    /// Use this instance instead of synthesizing one.
    #[arg(long, value_name = "FILE")]
    pub instance: Option<PathBuf>,
    #[command(flatten)]
    pub synth: SynthArgs,
    /// n/p ratio of the synthesized instance.
    #[arg(long, default_value_t = 6.0, value_parser = positive_f64)]
    pub ratio: f64,
    /// Regularization weight λ. Required.
    #[arg(long, value_parser = positive_f64)]
    pub lambda: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub spectral: SpectralArgs,
    /// Output prefix: writes PREFIX.csv and PREFIX.gp.
    #[arg(long, value_name = "PREFIX", default_value = "error_iter")]
    pub out_prefix: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    /// Smallest relative error against the ground truth.
    Oracle,
    /// Smallest Huber loss on a random 20% of the measurements held out from fitting.
    Holdout,
}

#[derive(Debug, Args)]
pub struct LambdaGridArgs {
    /// Use this instance instead of synthesizing one.
    #[arg(long, value_name = "FILE")]
    pub instance: Option<PathBuf>,
    #[command(flatten)]
    pub synth: SynthArgs,
    /// n/p ratio of the synthesized instance.
    #[arg(long, default_value_t = 6.0, value_parser = positive_f64)]
    pub ratio: f64,
    /// Comma-separated candidate values of λ.
    #[arg(long, value_delimiter = ',', required = true, value_parser = positive_f64)]
    pub lambdas: Vec<f64>,
    /// Validation rule.
    #[arg(long, value_enum, default_value_t = RuleArg::Oracle)]
    pub rule: RuleArg,
    /// Seed of the holdout split.
    #[arg(long, default_value_t = 0)]
    pub holdout_seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub spectral: SpectralArgs,
    /// Output prefix: writes PREFIX.csv, PREFIX.json and PREFIX.gp.
    #[arg(long, value_name = "PREFIX", default_value = "lambda_grid")]
    pub out_prefix: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConsistencyArgs {
    #[command(flatten)]
    pub synth: SynthArgs,
    /// Comma-separated n/p ratios, ascending.
    #[arg(long, value_delimiter = ',', required = true, value_parser = positive_f64)]
    pub grid: Vec<f64>,
    /// Trials per grid point.
    #[arg(long, default_value_t = 20, value_parser = positive_usize)]
    pub trials: usize,
    /// Regularization weight λ. Required.
    #[arg(long, value_parser = positive_f64)]
    pub lambda: Option<f64>,
    /// Scale λ as λ·(p ln n / n)^ϱ with this ϱ [default: λ held fixed].
    #[arg(long)]
    pub lambda_exponent: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub spectral: SpectralArgs,
    /// Output prefix: writes PREFIX.csv, PREFIX_trials.csv and PREFIX.gp.
    #[arg(long, value_name = "PREFIX", default_value = "consistency")]
    pub out_prefix: PathBuf,
}

#[derive(Debug, Args)]
pub struct ImageArgs {
    /// Input image (PGM, P2 or P5).
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Reconstructed image (PGM, same format and depth as the input).
    #[arg(long, value_name = "FILE", default_value = "reconstructed.pgm")]
    pub out: PathBuf,
    /// Metrics file (JSON).
    #[arg(long, value_name = "FILE", default_value = "image_metrics.json")]
    pub metrics: PathBuf,
    /// Copy the image through the reader and writer without solving.
    #[arg(long)]
    pub passthrough: bool,
    /// Measurements per pixel (n/p).
    #[arg(long, default_value_t = 6.0, value_parser = positive_f64)]
    pub ratio: f64,
    /// Noise model: none, type1:η, type2:η, type3:η or gaussian:η.
    #[arg(long, default_value = "none", value_parser = noise)]
    pub noise: NoiseSpec,
    /// Seed of the sampling vectors and noise.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Zero pixels below this value (on the [0, 1] scale) at ingestion [default: keep all].
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Refuse images with more pixels than this.
    #[arg(long, default_value_t = 16384, value_parser = positive_usize)]
    pub max_pixels: usize,
    /// Refuse sampling matrices larger than this many MiB.
    #[arg(long, default_value_t = 4096, value_parser = positive_usize)]
    pub max_matrix_mib: usize,
    /// Regularization weight λ. Required unless --passthrough.
    #[arg(long, value_parser = positive_f64)]
    pub lambda: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub spectral: SpectralArgs,
}

#[derive(Debug, Subcommand)]
pub enum DiagCommand {
    /// Sampled stability constants of a real ensemble.
    Stability(StabilityArgs),
    /// Linear-rate certificate at a solution.
    Certificate(CertificateArgs),
    /// Noise-weighted spectral norms at a solution.
    Remark5(Remark5Args),
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    /// Instance file.
    #[arg(long, value_name = "FILE")]
    pub instance: PathBuf,
    /// Random direction pairs to try before refinement.
    #[arg(long, default_value_t = 1000, value_parser = positive_usize)]
    pub samples: usize,
    /// Inlier fraction ρ₀ of α, in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub rho0: f64,
    /// Huber threshold α.
    #[arg(long, default_value_t = 1.345, value_parser = positive_f64)]
    pub alpha: f64,
    /// Seed of the direction samples.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report file (JSON).
    #[arg(long, value_name = "FILE", default_value = "stability.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CertificateArgs {
    /// Instance file.
    #[arg(long, value_name = "FILE")]
    pub instance: PathBuf,
    /// Result file from `solve`. Without it the instance is solved first.
    #[arg(long, value_name = "FILE")]
    pub solution: Option<PathBuf>,
    /// Regularization weight λ [default: the one recorded in --solution].
    #[arg(long, value_parser = positive_f64)]
    pub lambda: Option<f64>,
    /// Huber threshold α [default: the one recorded in --solution, else 1.345].
    #[arg(long, value_parser = positive_f64)]
    pub alpha: Option<f64>,
    /// Boundary width ε₁ in (0, α) [default: (1 − ρ₀)·α].
    #[arg(long, value_parser = positive_f64)]
    pub eps1: Option<f64>,
    /// ρ₀ used for the default ε₁.
    #[arg(long, default_value_t = 0.5)]
    pub rho0: f64,
    /// Seed of the power-iteration start vector when solving.
    #[arg(long, default_value_t = 0)]
    pub init_seed: u64,
    /// Report file (JSON).
    #[arg(long, value_name = "FILE", default_value = "certificate.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Remark5Args {
    /// Instance file; must carry a noise record.
    #[arg(long, value_name = "FILE")]
    pub instance: PathBuf,
    /// Result file from `solve` [default: evaluate at the ground truth].
    #[arg(long, value_name = "FILE")]
    pub solution: Option<PathBuf>,
    /// Huber threshold α.
    #[arg(long, default_value_t = 1.345, value_parser = positive_f64)]
    pub alpha: f64,
    /// ρ₀, giving ε₁ = (1 − ρ₀)·α.
    #[arg(long, default_value_t = 0.5)]
    pub rho0: f64,
    /// Report file (JSON).
    #[arg(long, value_name = "FILE", default_value = "remark5.json")]
    pub out: PathBuf,
}
