use std::path::{Path, PathBuf};

use boxl0::bench::{Algorithm, Experiment};
use boxl0::baselines::PihtStep;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "boxl0", version, about = "Box-constrained l0 solvers and compressed-sensing benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a benchmark grid and write one CSV row per (n, trial, algorithm).
    Bench(BenchArgs),
    /// Solve an instance given as CSV files.
    Solve(SolveArgs),
    /// Recover an image from partial Fourier samples.
    Image(ImageArgs),
    /// Draw a bench CSV as an SVG line plot.
    Plot(PlotArgs),
    /// Run the built-in invariant checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PihtStepArg {
    Fixed,
    LineSearch,
}

impl PihtStepArg {
    pub fn to_step(self) -> PihtStep<f64> {
        match self {
            PihtStepArg::Fixed => PihtStep::Fixed,
            PihtStepArg::LineSearch => PihtStep::line_search(),
        }
    }
}

/// Solver overrides shared by `bench`, `solve` and `image`.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SolverFlags {
    /// Absolute penalty λ (overrides --lambda-fraction).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Penalty as a fraction of the upper bound λ̄ at the origin.
    #[arg(long)]
    pub lambda_fraction: Option<f64>,
    /// Upper cap on the step size τ.
    #[arg(long)]
    pub tau_cap: Option<f64>,
    /// Relative-change stopping tolerance.
    #[arg(long)]
    pub tol_rel: Option<f64>,
    /// Stop once f(x) ≤ tol-f.
    #[arg(long)]
    pub tol_f: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Use the strict Newton acceptance test instead of the relaxed one.
    #[arg(long)]
    #[serde(default)]
    pub strict: bool,
    /// PIHT step rule.
    #[arg(long, value_enum)]
    pub piht_step: Option<PihtStepArg>,
}

impl SolverFlags {
    /// Flag values win; unset flags fall back to `file`.
    pub fn merged(&self, file: &SolverFlags) -> SolverFlags {
        SolverFlags {
            lambda: self.lambda.or(file.lambda),
            lambda_fraction: self.lambda_fraction.or(file.lambda_fraction),
            tau_cap: self.tau_cap.or(file.tau_cap),
            tol_rel: self.tol_rel.or(file.tol_rel),
            tol_f: self.tol_f.or(file.tol_f),
            max_iter: self.max_iter.or(file.max_iter),
            strict: self.strict || file.strict,
            piht_step: self.piht_step.or(file.piht_step),
        }
    }

    pub fn validate(&self) -> CliResult {
        let positive = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => Err(CliError::usage(format!("--{name} must be positive"))),
            _ => Ok(()),
        };
        positive("lambda", self.lambda)?;
        positive("lambda-fraction", self.lambda_fraction)?;
        positive("tau-cap", self.tau_cap)?;
        positive("tol-rel", self.tol_rel)?;
        if let Some(t) = self.tol_f {
            if !(t >= 0.0) {
                return Err(CliError::usage("--tol-f must be nonnegative"));
            }
        }
        Ok(())
    }
}

fn parse_experiment(s: &str) -> Result<Experiment, String> {
    s.parse().map_err(|e: boxl0::Error| e.to_string())
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: boxl0::Error| e.to_string())
}

#[derive(Debug, Clone, Default, Args)]
pub struct BenchArgs {
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Experiment: e1, e2, e3 or e4.
    #[arg(long, value_parser = parse_experiment)]
    pub exp: Option<Experiment>,
    /// Problem sizes, comma separated (for e4: pixel counts side²).
    #[arg(long = "n", value_delimiter = ',')]
    pub sizes: Vec<usize>,
    /// Measurements per unknown, m/n (e1, e2 and e4).
    #[arg(long)]
    pub m_ratio: Option<f64>,
    /// Independent instances per size.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Master seed; falls back to the config file, then BOXL0_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Measurement SNR in dB for e2.
    #[arg(long)]
    pub snr_db: Option<f64>,
    /// Noise factor for e4.
    #[arg(long)]
    pub nf: Option<f64>,
    /// Algorithms, comma separated (default: all).
    #[arg(long, value_delimiter = ',', value_parser = parse_algorithm)]
    pub algorithms: Vec<Algorithm>,
    /// Worker threads (default: number of processors).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// P5 PGM image for e4 (default: built-in phantom).
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Output CSV (default: `<exp>.csv`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverFlags,
}

/// TOML mirror of [`BenchArgs`].
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct BenchFile {
    pub exp: Option<String>,
    pub n: Option<Vec<usize>>,
    pub m_ratio: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub snr_db: Option<f64>,
    pub nf: Option<f64>,
    pub algorithms: Option<Vec<String>>,
    pub jobs: Option<usize>,
    pub image: Option<PathBuf>,
    pub out: Option<PathBuf>,
    #[serde(flatten)]
    pub solver: SolverFlags,
}

impl BenchFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
    }
}

/// Seed from the environment, used when neither a flag nor the config file
/// sets one.
pub fn env_seed() -> CliResult<Option<u64>> {
    match std::env::var("BOXL0_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::usage(format!("BOXL0_SEED is not an unsigned integer: {v:?}"))),
        Err(_) => Ok(None),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveAlgorithm {
    Bnl0r,
    Piht,
    Pga,
}

impl From<SolveAlgorithm> for Algorithm {
    fn from(a: SolveAlgorithm) -> Self {
        match a {
            SolveAlgorithm::Bnl0r => Algorithm::Bnl0r,
            SolveAlgorithm::Piht => Algorithm::Piht,
            SolveAlgorithm::Pga => Algorithm::Pga,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Dense matrix A, one row per line.
    #[arg(long = "a")]
    pub a: PathBuf,
    /// Observation vector b.
    #[arg(long = "b")]
    pub b: PathBuf,
    /// Lower bound magnitudes l (x ≥ −l).
    #[arg(long = "l")]
    pub l: PathBuf,
    /// Upper bounds u (x ≤ u).
    #[arg(long = "u")]
    pub u: PathBuf,
    #[arg(long, value_enum, default_value = "bnl0r")]
    pub algorithm: SolveAlgorithm,
    /// Seed for the curvature estimate.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the solution to this CSV file, one value per line.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Clone, Args)]
pub struct ImageArgs {
    /// P5 PGM input with a power-of-two side (default: built-in phantom).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Side of the built-in phantom.
    #[arg(long, default_value_t = 256)]
    pub side: usize,
    /// Number of Fourier samples (default: 14369·n/65536).
    #[arg(long)]
    pub m: Option<usize>,
    /// Noise factors, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.05, 0.1])]
    pub nf: Vec<f64>,
    /// Algorithms, comma separated (default: all).
    #[arg(long, value_delimiter = ',', value_parser = parse_algorithm)]
    pub algorithms: Vec<Algorithm>,
    /// Seed for the sampled rows and the noise; falls back to BOXL0_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for recovered images and the CSV.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Res,
    Time,
    Iter,
    Psnr,
    Nnz,
}

impl Metric {
    pub fn column(self) -> &'static str {
        match self {
            Metric::Res => "res",
            Metric::Time => "time_s",
            Metric::Iter => "iter",
            Metric::Psnr => "psnr",
            Metric::Nnz => "nnz",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// Bench CSV.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "res")]
    pub metric: Metric,
    /// Force a logarithmic y axis (always on for res).
    #[arg(long)]
    pub log_y: bool,
    /// Output SVG (default: input with an .svg extension).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Prox,
    Adjoint,
    Partition,
    Descent,
    Identity,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    /// Run only this suite.
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    /// Perturb every check so that it must fail (tests the failure path).
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}
