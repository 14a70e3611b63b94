//! Nonparametric percentile bootstrap around any estimator.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Observation, ObservationTable};
use crate::error::{Error, Result};
use crate::report::{ConfidenceInterval, Flag};
use crate::rng;

const RESAMPLE_TAG: u64 = 0x7265_7361_6d70;
const MC_TAG: u64 = 0x6d63_7365_6564;

/// Replicate failure fraction above which the result carries a warning.
pub const FAILURE_WARNING_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Resample {
    /// Rows drawn with replacement from the whole table.
    #[default]
    Pooled,
    /// Each arm resampled separately, keeping arm sizes fixed.
    WithinArm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub level: f64,
    pub seed: u64,
    pub resample: Resample,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            replicates: 1000,
            level: 0.95,
            seed: 0,
            resample: Resample::Pooled,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates < 2 {
            return Err(Error::Config("bootstrap needs at least 2 replicates".into()));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::Config(format!("confidence level {} not in (0, 1)", self.level)));
        }
        Ok(())
    }

    /// Seed handed to the estimator for replicate `b`.
    pub fn replicate_mc_seed(&self, b: usize) -> u64 {
        rng::derive_seed(self.seed, MC_TAG, b as u64)
    }
}

/// The `b`-th resampled table.
pub fn resample(table: &ObservationTable, config: &BootstrapConfig, b: usize) -> Result<ObservationTable> {
    let mut rng = rng::stream(rng::derive_seed(config.seed, RESAMPLE_TAG, b as u64), 0);
    let rows = table.rows();
    let drawn: Vec<Observation> = match config.resample {
        Resample::Pooled => (0..rows.len()).map(|_| rows[rng.gen_range(0..rows.len())]).collect(),
        Resample::WithinArm => {
            let mut out = Vec::with_capacity(rows.len());
            for &arm in table.arms() {
                let members: Vec<&Observation> = rows.iter().filter(|r| r.x == arm).collect();
                out.extend((0..members.len()).map(|_| *members[rng.gen_range(0..members.len())]));
            }
            out
        }
    };
    ObservationTable::new(drawn)
}

/// Nearest-rank quantile of ascending `sorted` values.
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let rank = (p * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

/// Bootstrap distribution of a vector-valued estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapResult {
    /// Values of the successful replicates, in replicate order.
    pub replicate_values: Vec<Vec<f64>>,
    pub failed: usize,
    pub config: BootstrapConfig,
}

impl BootstrapResult {
    pub fn replicates(&self) -> usize {
        self.config.replicates
    }

    /// Values of component `k` over successful replicates.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.replicate_values.iter().map(|v| v[k]).collect()
    }

    /// Percentile interval and replicate mean of component `k`.
    pub fn interval(&self, k: usize) -> ConfidenceInterval {
        let mut values = self.component(k);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        values.sort_by(f64::total_cmp);
        let alpha = 1.0 - self.config.level;
        ConfidenceInterval {
            level: self.config.level,
            mean,
            lower: nearest_rank(&values, alpha / 2.0),
            upper: nearest_rank(&values, 1.0 - alpha / 2.0),
            replicates: self.config.replicates,
            failed: self.failed,
        }
    }

    /// A failure flag when any replicate failed; `warning` is set past the
    /// failure threshold.
    pub fn failure_flag(&self) -> Option<Flag> {
        (self.failed > 0).then_some(Flag::BootstrapFailures {
            failed: self.failed,
            replicates: self.config.replicates,
            warning: self.failed as f64 > FAILURE_WARNING_FRACTION * self.config.replicates as f64,
        })
    }
}

/// Runs `estimator(replicate_table, mc_seed)` on every replicate. Replicates
/// that error or return non-finite values are excluded and counted.
pub fn bootstrap<F>(estimator: F, table: &ObservationTable, config: &BootstrapConfig) -> Result<BootstrapResult>
where
    F: Fn(&ObservationTable, u64) -> Result<Vec<f64>> + Sync,
{
    config.validate()?;
    let outcomes: Vec<Option<Vec<f64>>> = (0..config.replicates)
        .into_par_iter()
        .map(|b| {
            let sample = resample(table, config, b).ok()?;
            let values = estimator(&sample, config.replicate_mc_seed(b)).ok()?;
            values.iter().all(|v| v.is_finite()).then_some(values)
        })
        .collect();
    let failed = outcomes.iter().filter(|o| o.is_none()).count();
    if failed == config.replicates {
        return Err(Error::BootstrapFailed(failed));
    }
    let replicate_values: Vec<Vec<f64>> = outcomes.into_iter().flatten().collect();
    let width = replicate_values[0].len();
    if replicate_values.iter().any(|v| v.len() != width) {
        return Err(Error::Validation("estimator returned vectors of varying length".into()));
    }
    Ok(BootstrapResult {
        replicate_values,
        failed,
        config: *config,
    })
}

/// Scalar bootstrap summary.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapCi {
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
    pub replicate_values: Vec<f64>,
    pub failed: usize,
    pub flag: Option<Flag>,
}

pub fn bootstrap_ci<F>(estimator: F, table: &ObservationTable, config: &BootstrapConfig) -> Result<BootstrapCi>
where
    F: Fn(&ObservationTable, u64) -> Result<f64> + Sync,
{
    let result = bootstrap(|t, seed| estimator(t, seed).map(|v| vec![v]), table, config)?;
    let ci = result.interval(0);
    Ok(BootstrapCi {
        mean: ci.mean,
        lower: ci.lower,
        upper: ci.upper,
        replicate_values: result.component(0),
        failed: result.failed,
        flag: result.failure_flag(),
    })
}
