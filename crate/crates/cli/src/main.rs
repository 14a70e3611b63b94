mod args;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use causal_moments::bootstrap::BootstrapConfig;
use causal_moments::conditional::{conditional_estimate, StratumRequest};
use causal_moments::data::{ingest_csv, write_csv, CsvSchema};
use causal_moments::estimate::{evaluate, EvalOptions, Mode, Request, Target};
use causal_moments::report::{CiReport, Estimate, EstimateReport, Quantity};
use causal_moments::reproduce::{reproduce, ReproduceConfig};
use causal_moments::synthetic::{simulate, Preset};
use causal_moments::{McOptions, SamplingPlan};
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};
use serde::{Deserialize, Serialize};

use args::{Cli, Command, EstimateArgs, Format, McArgs, McMode, ReproduceArgs, SimulateArgs};

const THREADS_ENV: &str = "CAUSAL_MOMENTS_THREADS";

/// Everything needed to rerun an `estimate` or `bounds` invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub input: PathBuf,
    pub mc: McOptions,
    pub bootstrap: Option<BootstrapConfig>,
    pub condition: Option<i64>,
    pub requests: Vec<QuantityRequest>,
    pub version: String,
}

/// One requested quantity; `only` keeps a single statistic of a multi-report
/// request (skewness or kurtosis out of the derived statistics).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantityRequest {
    pub request: Request,
    pub only: Option<Quantity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantityError {
    pub request: QuantityRequest,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateOutput {
    pub manifest: RunManifest,
    pub reports: Vec<EstimateReport>,
    pub errors: Vec<QuantityError>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let outcome = match cli.command {
        Command::Estimate(a) => run_estimate(a, Mode::Identified),
        Command::Bounds(a) => run_estimate(a, Mode::Bounds),
        Command::Simulate(a) => run_simulate(a),
        Command::Reproduce(a) => run_reproduce(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("{THREADS_ENV} must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn usage_error(kind: ErrorKind, message: impl std::fmt::Display) -> ! {
    Cli::command().error(kind, message).exit()
}

fn mc_options(a: &McArgs) -> McOptions {
    let points = a.mc_points.map(|p| p as usize);
    McOptions {
        plan: match a.mc_mode {
            McMode::Joint => SamplingPlan::Joint { points },
            McMode::Tensor => SamplingPlan::Tensor { points_per_axis: points },
        },
        seed: a.seed,
        bounds_override: None,
        allow_large_tensor: a.allow_large_tensor,
    }
}

fn requests(a: &EstimateArgs, mode: Mode) -> Vec<QuantityRequest> {
    let mut out = Vec::new();
    let mut push = |target: Target, only: Option<Quantity>| {
        out.push(QuantityRequest {
            request: Request { target, mode },
            only,
        })
    };
    let single = |flag: &str| {
        a.arms
            .unwrap_or_else(|| usage_error(ErrorKind::MissingRequiredArgument, format!("{flag} needs --arms i,j")))
    };
    let pair = |flag: &str| match (a.arms_left, a.arms_right) {
        (Some(l), Some(r)) => (l, r),
        _ => usage_error(
            ErrorKind::MissingRequiredArgument,
            format!("{flag} needs --arms-left i,j and --arms-right k,h"),
        ),
    };
    if a.ate {
        push(Target::Ate { arms: single("--ate") }, None);
    }
    for &order in &a.moment {
        let arms = single("--moment");
        push(
            Target::Moment {
                order,
                arms,
                centered: a.central,
            },
            None,
        );
    }
    if a.product {
        let (left, right) = pair("--product");
        push(
            Target::Product {
                left,
                right,
                centered: a.central,
            },
            None,
        );
    }
    if a.covariance {
        let (left, right) = pair("--covariance");
        push(
            Target::Product {
                left,
                right,
                centered: true,
            },
            None,
        );
    }
    if a.correlation {
        let (left, right) = pair("--correlation");
        push(Target::Correlation { left, right }, None);
    }
    if a.derived_stats {
        push(Target::DerivedStats { arms: single("--derived-stats") }, None);
    }
    if a.skewness {
        push(Target::DerivedStats { arms: single("--skewness") }, Some(Quantity::Skewness));
    }
    if a.kurtosis {
        push(Target::DerivedStats { arms: single("--kurtosis") }, Some(Quantity::Kurtosis));
    }
    if out.is_empty() {
        usage_error(
            ErrorKind::MissingRequiredArgument,
            "request at least one quantity (--ate, --moment, --product, --covariance, --correlation, \
             --derived-stats, --skewness, --kurtosis)",
        );
    }
    out
}

fn run_estimate(a: EstimateArgs, mode: Mode) -> Result<ExitCode> {
    let requests = requests(&a, mode);
    let mut mc = mc_options(&a.mc);
    mc.bounds_override = a.bounds_override;
    let bootstrap = a.bootstrap.map(|b| BootstrapConfig {
        replicates: b as usize,
        level: a.level,
        seed: a.mc.seed,
        resample: a.resample.into(),
    });
    let manifest = RunManifest {
        subcommand: match mode {
            Mode::Identified => "estimate".into(),
            Mode::Bounds => "bounds".into(),
        },
        input: a.input.clone(),
        mc,
        bootstrap,
        condition: a.condition_on,
        requests: requests.clone(),
        version: env!("CARGO_PKG_VERSION").into(),
    };

    let table = ingest_csv(&a.input, &CsvSchema::default()).with_context(|| format!("reading {}", a.input.display()))?;
    let options = EvalOptions { mc, bootstrap };
    let mut reports = Vec::new();
    let mut errors = Vec::new();
    for q in &requests {
        let result = match a.condition_on {
            Some(level) => conditional_estimate(
                &table,
                &StratumRequest {
                    level,
                    request: q.request,
                },
                &options,
            ),
            None => evaluate(&table, &q.request, &options, None),
        };
        match result {
            Ok(rs) => reports.extend(rs.into_iter().filter(|r| q.only.is_none_or(|only| r.quantity == only))),
            Err(e) => errors.push(QuantityError {
                request: *q,
                message: e.to_string(),
            }),
        }
    }
    let output = EstimateOutput {
        manifest,
        reports,
        errors,
    };
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&output)? + "\n",
        Format::Table => render_reports(&output),
    };
    emit(a.output.as_deref(), &text)?;
    for e in &output.errors {
        eprintln!("error: {}", e.message);
    }
    Ok(if output.errors.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn quantity_name(q: Quantity) -> &'static str {
    match q {
        Quantity::Ate => "ate",
        Quantity::Moment => "moment",
        Quantity::CentralMoment => "central_moment",
        Quantity::ProductMoment => "product_moment",
        Quantity::Covariance => "covariance",
        Quantity::Correlation => "correlation",
        Quantity::Variance => "variance",
        Quantity::StdDev => "std_dev",
        Quantity::Skewness => "skewness",
        Quantity::Kurtosis => "kurtosis",
    }
}

fn render_reports(output: &EstimateOutput) -> String {
    let mut s = String::new();
    for r in &output.reports {
        let arms: Vec<String> = r.arms.iter().map(|a| a.to_string()).collect();
        let mut label = format!("{} {}", quantity_name(r.quantity), arms.join("x"));
        if let Some(m) = r.order.filter(|_| r.quantity != Quantity::Ate) {
            label += &format!(" m={m}");
        }
        if let Some(w) = r.condition {
            label += &format!(" | w={w}");
        }
        let value = match r.estimate {
            Estimate::Point(v) => format!("{v:.3}"),
            Estimate::Interval { lower, upper } => format!("[{lower:.3}, {upper:.3}]"),
        };
        let ci = match r.ci {
            Some(CiReport::Point(c)) => format!(
                "  mean {:.3} ({:.0}% CI: [{:.3}, {:.3}])",
                c.mean,
                c.level * 100.0,
                c.lower,
                c.upper
            ),
            Some(CiReport::Bounds {
                lower_bound,
                upper_bound,
            }) => format!(
                "  lower {:.3} ({:.0}% CI: [{:.3}, {:.3}]), upper {:.3} ({:.0}% CI: [{:.3}, {:.3}])",
                lower_bound.mean,
                lower_bound.level * 100.0,
                lower_bound.lower,
                lower_bound.upper,
                upper_bound.mean,
                upper_bound.level * 100.0,
                upper_bound.lower,
                upper_bound.upper
            ),
            None => String::new(),
        };
        let flags = if r.flags.is_empty() {
            String::new()
        } else {
            format!("  [{} flag(s)]", r.flags.len())
        };
        s += &format!("{label:<36} {value}{ci}{flags}\n");
    }
    for e in &output.errors {
        s += &format!("error: {}\n", e.message);
    }
    s
}

#[derive(Debug, Serialize)]
struct SimulationManifest<'a> {
    preset: &'a str,
    n: u64,
    seed: u64,
    arm_probabilities: &'a [(i64, f64)],
    version: &'a str,
}

fn run_simulate(a: SimulateArgs) -> Result<ExitCode> {
    let preset: Preset = a
        .preset
        .parse()
        .unwrap_or_else(|e: causal_moments::Error| usage_error(ErrorKind::InvalidValue, e));
    let spec = preset.spec();
    let table = simulate(&spec, a.n as usize, a.seed)?;
    match &a.output {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(&table, BufWriter::new(file))?;
            let manifest = SimulationManifest {
                preset: preset.name(),
                n: a.n,
                seed: a.seed,
                arm_probabilities: &spec.arm_probabilities,
                version: env!("CARGO_PKG_VERSION"),
            };
            let mut sidecar = path.clone().into_os_string();
            sidecar.push(".manifest.json");
            std::fs::write(&sidecar, serde_json::to_string_pretty(&manifest)? + "\n")?;
        }
        None => write_csv(&table, io::stdout().lock())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn run_reproduce(a: ReproduceArgs) -> Result<ExitCode> {
    if a.sizes.contains(&0) {
        usage_error(ErrorKind::InvalidValue, "sample sizes must be positive");
    }
    let config = ReproduceConfig {
        replications: a.replications as usize,
        sizes: a.sizes.iter().map(|&n| n as usize).collect(),
        seed: a.mc.seed,
        mc: mc_options(&a.mc),
        scm_a: a.only.as_deref() != Some("scm-b"),
        scm_b: a.only.as_deref() != Some("scm-a"),
    };
    let report = reproduce(&config);
    let json = serde_json::to_string_pretty(&report)? + "\n";
    let table = report.render();
    if let Some(path) = &a.table {
        std::fs::write(path, &table).with_context(|| format!("writing {}", path.display()))?;
    }
    match (&a.output, a.format) {
        (Some(path), Format::Json) => emit(Some(path), &json)?,
        (Some(path), Format::Table) => {
            emit(Some(path), &json)?;
            emit(None, &table)?;
        }
        (None, Format::Json) => emit(None, &json)?,
        (None, Format::Table) => emit(None, &table)?,
    }
    Ok(ExitCode::SUCCESS)
}
