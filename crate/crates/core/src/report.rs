//! Report types shared by the estimators and the command line: quality flags,
//! the denominator guard, and the serialisable estimate report.

use serde::{Deserialize, Serialize};

use crate::bootstrap::BootstrapConfig;
use crate::data::DomainBounds;
use crate::identify::ArmPair;
use crate::quadrature::McOptions;

/// Denominators smaller than this in magnitude are replaced by it.
pub const DENOMINATOR_FLOOR: f64 = 0.01;

/// Replaces a near-zero denominator by [`DENOMINATOR_FLOOR`], recording a flag.
pub fn guard_denominator(value: f64, name: &str, flags: &mut Vec<Flag>) -> f64 {
    if value.abs() < DENOMINATOR_FLOOR {
        flags.push(Flag::DenominatorGuarded {
            denominator: name.to_string(),
            raw: value,
            replaced: DENOMINATOR_FLOOR,
        });
        DENOMINATOR_FLOOR
    } else {
        value
    }
}

/// Clips a correlation-type value to `[-1, 1]`, recording a flag.
pub fn clip_unit(value: f64, name: &str, flags: &mut Vec<Flag>) -> f64 {
    if value.abs() > 1.0 {
        flags.push(Flag::CorrelationClipped {
            value: name.to_string(),
            raw: value,
        });
        value.clamp(-1.0, 1.0)
    } else {
        value
    }
}

/// Something the estimator adjusted or wants the reader to notice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Flag {
    /// A negative second central moment was clipped to zero.
    VarianceClipped { raw: f64 },
    DenominatorGuarded {
        denominator: String,
        raw: f64,
        replaced: f64,
    },
    CorrelationClipped { value: String, raw: f64 },
    /// Monte Carlo noise put the lower bound above the upper bound; the two
    /// were swapped.
    IntervalSwapped { gap: f64, tolerance: f64 },
    /// The identified value falls outside its own bounds by more than three
    /// standard errors, which contradicts the monotonicity assumption.
    MonotonicityConflict { identified: f64, lower: f64, upper: f64 },
    BootstrapFailures {
        failed: usize,
        replicates: usize,
        warning: bool,
    },
}

/// The estimand a report describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Ate,
    Moment,
    CentralMoment,
    ProductMoment,
    Covariance,
    Correlation,
    Variance,
    StdDev,
    Skewness,
    Kurtosis,
}

/// A point value or a `[lower, upper]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Estimate {
    Point(f64),
    Interval { lower: f64, upper: f64 },
}

/// Which side of a bound interval is known to be sharp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sharpness {
    Upper,
    None,
}

/// Percentile bootstrap interval for one scalar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub level: f64,
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
    pub replicates: usize,
    pub failed: usize,
}

/// Bootstrap intervals for a point estimate or for each end of a bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CiReport {
    Point(ConfidenceInterval),
    Bounds {
        lower_bound: ConfidenceInterval,
        upper_bound: ConfidenceInterval,
    },
}

/// Settings sufficient to rerun an estimate exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mc: McOptions,
    /// Integration domain actually used (before any per-replicate rederivation).
    pub domain: Option<DomainBounds>,
    pub centered: bool,
    pub denominator_floor: f64,
    pub bootstrap: Option<BootstrapConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub quantity: Quantity,
    /// One contrast, or two for product-type quantities.
    pub arms: Vec<ArmPair>,
    pub order: Option<u32>,
    /// Covariate level conditioned on.
    pub condition: Option<i64>,
    pub estimate: Estimate,
    pub std_error: Option<Estimate>,
    pub sharp: Option<Sharpness>,
    pub ci: Option<CiReport>,
    pub flags: Vec<Flag>,
    pub config: RunConfig,
}
