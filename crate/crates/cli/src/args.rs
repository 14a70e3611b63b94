//! Command-line arguments.

use std::path::PathBuf;

use causal_moments::bootstrap::Resample;
use causal_moments::{ArmPair, DomainBounds};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "causal-moments", version, about = "Moments, covariance and correlation of causal effects from observational data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Point estimates under exogeneity and monotonicity.
    Estimate(EstimateArgs),
    /// Fréchet bounds under exogeneity alone.
    Bounds(EstimateArgs),
    /// Simulate a preset model to CSV.
    Simulate(SimulateArgs),
    /// Run the replicated simulation study for SCM A and SCM B.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum McMode {
    Joint,
    Tensor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ResampleArg {
    Pooled,
    WithinArm,
}

impl From<ResampleArg> for Resample {
    fn from(r: ResampleArg) -> Self {
        match r {
            ResampleArg::Pooled => Resample::Pooled,
            ResampleArg::WithinArm => Resample::WithinArm,
        }
    }
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Seed for every Monte Carlo draw and bootstrap resample.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Joint points, or points per axis in tensor mode. Defaults depend on the
    /// integral's dimension.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub mc_points: Option<u64>,
    #[arg(long, value_enum, default_value_t = McMode::Joint)]
    pub mc_mode: McMode,
    /// Allow tensor grids in three or more dimensions.
    #[arg(long)]
    pub allow_large_tensor: bool,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// CSV with columns x, y and optionally w.
    #[arg(long)]
    pub input: PathBuf,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub mc: McArgs,
    /// Bootstrap replicates; omit for no confidence intervals.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub bootstrap: Option<u64>,
    #[arg(long, default_value_t = 0.95, value_parser = parse_level)]
    pub level: f64,
    #[arg(long, value_enum, default_value_t = ResampleArg::Pooled)]
    pub resample: ResampleArg,
    /// Restrict to one covariate level, as `w=LEVEL`.
    #[arg(long, value_parser = parse_condition, allow_hyphen_values = true)]
    pub condition_on: Option<i64>,
    /// Integration domain `a,b` replacing the data range.
    #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true)]
    pub bounds_override: Option<DomainBounds>,

    /// Contrast `i,j` for single-contrast quantities.
    #[arg(long, value_parser = parse_arms, allow_hyphen_values = true)]
    pub arms: Option<ArmPair>,
    /// First contrast `i,j` of a product-type quantity.
    #[arg(long, value_parser = parse_arms, allow_hyphen_values = true)]
    pub arms_left: Option<ArmPair>,
    /// Second contrast `k,h` of a product-type quantity.
    #[arg(long, value_parser = parse_arms, allow_hyphen_values = true)]
    pub arms_right: Option<ArmPair>,

    /// Moment orders, e.g. `2` or `2,3,4`.
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..))]
    pub moment: Vec<u32>,
    /// Use central moments for --moment and covariance for --product.
    #[arg(long)]
    pub central: bool,
    /// Average causal effect of --arms.
    #[arg(long)]
    pub ate: bool,
    /// Product moment of --arms-left and --arms-right.
    #[arg(long)]
    pub product: bool,
    /// Covariance of --arms-left and --arms-right.
    #[arg(long)]
    pub covariance: bool,
    /// Correlation of --arms-left and --arms-right.
    #[arg(long)]
    pub correlation: bool,
    /// Variance, standard deviation, skewness and kurtosis of --arms.
    #[arg(long)]
    pub derived_stats: bool,
    /// Skewness of --arms.
    #[arg(long)]
    pub skewness: bool,
    /// Kurtosis of --arms.
    #[arg(long)]
    pub kurtosis: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// One of scm-a, scm-b, example-1, example-2, example-3.
    #[arg(long)]
    pub preset: String,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination; a `<output>.manifest.json` sidecar records the run.
    /// Standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub replications: u64,
    #[arg(long, value_delimiter = ',', default_values_t = [20u64, 100, 1000])]
    pub sizes: Vec<u64>,
    #[command(flatten)]
    pub mc: McArgs,
    /// Only one model.
    #[arg(long, value_parser = ["scm-a", "scm-b"])]
    pub only: Option<String>,
    /// JSON artifact path; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write the plain-text tables here.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

pub fn parse_arms(s: &str) -> Result<ArmPair, String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `i,j`, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("bad arm `{t}`: {e}"));
    ArmPair::new(parse(a)?, parse(b)?).map_err(|e| e.to_string())
}

pub fn parse_bounds(s: &str) -> Result<DomainBounds, String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad bound `{t}`: {e}"));
    DomainBounds::new(parse(a)?, parse(b)?).map_err(|e| e.to_string())
}

pub fn parse_condition(s: &str) -> Result<i64, String> {
    let value = s.strip_prefix("w=").unwrap_or(s);
    value.trim().parse::<i64>().map_err(|e| format!("bad covariate level `{value}`: {e}"))
}

pub fn parse_level(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("bad level `{s}`: {e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("level must lie in (0, 1), got {v}"))
    }
}
