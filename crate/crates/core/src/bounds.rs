//! Bounds that need exogeneity only, built from Fréchet inequalities.

use serde::{Deserialize, Serialize};

use crate::data::ObservationTable;
use crate::error::{Error, Result};
use crate::identify::{moment_family, product_family, ArmPair, MomentFamily};
use crate::quadrature::{McEstimate, McOptions};
use crate::report::{clip_unit, guard_denominator, Flag, Sharpness};

pub use crate::integrands::frechet_integrands;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsEstimate {
    pub interval: Interval,
    /// Monte Carlo standard errors of each end; absent for composed ratios.
    pub lower_se: Option<f64>,
    pub upper_se: Option<f64>,
    pub sharp: Sharpness,
    pub flags: Vec<Flag>,
}

/// Orders a Monte Carlo lower/upper pair. Inversions within three standard
/// errors of the difference are swapped and flagged; larger ones are errors.
pub fn reconcile(lower: McEstimate, upper: McEstimate, flags: &mut Vec<Flag>) -> Result<Interval> {
    if lower.value <= upper.value {
        return Ok(Interval {
            lower: lower.value,
            upper: upper.value,
        });
    }
    let gap = lower.value - upper.value;
    let tolerance = 3.0 * lower.std_error.hypot(upper.std_error);
    if gap < tolerance {
        flags.push(Flag::IntervalSwapped { gap, tolerance });
        Ok(Interval {
            lower: upper.value,
            upper: lower.value,
        })
    } else {
        Err(Error::IntervalInverted { gap, tolerance })
    }
}

/// Flags an identified value lying outside its own bounds by more than three
/// standard errors.
pub fn monotonicity_check(family: &MomentFamily) -> Option<Flag> {
    let id = family.identified.value;
    let below = family.lower.value - 3.0 * family.lower.std_error.hypot(family.identified.std_error);
    let above = family.upper.value + 3.0 * family.upper.std_error.hypot(family.identified.std_error);
    (id < below || id > above).then_some(Flag::MonotonicityConflict {
        identified: id,
        lower: family.lower.value,
        upper: family.upper.value,
    })
}

fn from_family(family: &MomentFamily, sharp: Sharpness) -> Result<BoundsEstimate> {
    let mut flags = Vec::new();
    let interval = reconcile(family.lower, family.upper, &mut flags)?;
    Ok(BoundsEstimate {
        interval,
        lower_se: Some(family.lower.std_error),
        upper_se: Some(family.upper.std_error),
        sharp,
        flags,
    })
}

/// Bounds on the `order`-th moment (central moment when `centered`) of
/// `Y_i - Y_j`. Only the upper end of even-order bounds is sharp.
pub fn moment_bounds(
    table: &ObservationTable,
    order: u32,
    arms: ArmPair,
    centered: bool,
    mc: &McOptions,
) -> Result<BoundsEstimate> {
    let family = moment_family(table, order, arms, centered, mc)?;
    let sharp = if order % 2 == 0 { Sharpness::Upper } else { Sharpness::None };
    from_family(&family, sharp)
}

/// Bounds on the product moment (covariance when `centered`) of `Y_i - Y_j`
/// and `Y_k - Y_h`.
pub fn product_bounds(
    table: &ObservationTable,
    left: ArmPair,
    right: ArmPair,
    centered: bool,
    mc: &McOptions,
) -> Result<BoundsEstimate> {
    let family = product_family(table, left, right, centered, mc)?;
    from_family(&family, Sharpness::None)
}

fn composed(lower: f64, upper: f64, mut flags: Vec<Flag>) -> Result<BoundsEstimate> {
    let interval = reconcile(
        McEstimate { value: lower, std_error: 0.0 },
        McEstimate { value: upper, std_error: 0.0 },
        &mut flags,
    )?;
    Ok(BoundsEstimate {
        interval,
        lower_se: None,
        upper_se: None,
        sharp: Sharpness::None,
        flags,
    })
}

/// Skewness bounds from the central-moment bounds of orders two and three.
pub fn skewness_from_bounds(second: Interval, third: Interval) -> Result<BoundsEstimate> {
    let mut flags = Vec::new();
    let lower = if third.lower >= 0.0 {
        third.lower / guard_denominator(second.upper.powf(1.5), "upper_second^1.5", &mut flags)
    } else {
        third.lower / guard_denominator(second.lower.powf(1.5), "lower_second^1.5", &mut flags)
    };
    let upper = if third.upper >= 0.0 {
        third.upper / guard_denominator(second.lower.powf(1.5), "lower_second^1.5", &mut flags)
    } else {
        third.upper / guard_denominator(second.upper.powf(1.5), "upper_second^1.5", &mut flags)
    };
    composed(lower, upper, flags)
}

/// Kurtosis bounds from the central-moment bounds of orders two and four.
pub fn kurtosis_from_bounds(second: Interval, fourth: Interval) -> Result<BoundsEstimate> {
    let mut flags = Vec::new();
    let lower = fourth.lower / guard_denominator(second.upper.powi(2), "upper_second^2", &mut flags);
    let upper = fourth.upper / guard_denominator(second.lower.powi(2), "lower_second^2", &mut flags);
    composed(lower, upper, flags)
}

/// Correlation bounds from covariance bounds and the second-central-moment
/// bounds of both contrasts, clipped to `[-1, 1]`.
pub fn correlation_from_bounds(covariance: Interval, left: Interval, right: Interval) -> Result<BoundsEstimate> {
    let mut flags = Vec::new();
    let sd_product = |a: f64, b: f64| a.max(0.0).sqrt() * b.max(0.0).sqrt();
    let upper_sd = sd_product(left.upper, right.upper);
    let lower_sd = sd_product(left.lower, right.lower);
    let lower = if covariance.lower >= 0.0 {
        covariance.lower / guard_denominator(upper_sd, "upper_sd_product", &mut flags)
    } else {
        covariance.lower / guard_denominator(lower_sd, "lower_sd_product", &mut flags)
    };
    let upper = if covariance.upper >= 0.0 {
        covariance.upper / guard_denominator(lower_sd, "lower_sd_product", &mut flags)
    } else {
        covariance.upper / guard_denominator(upper_sd, "upper_sd_product", &mut flags)
    };
    let lower = clip_unit(lower, "correlation_lower", &mut flags);
    let upper = clip_unit(upper, "correlation_upper", &mut flags);
    composed(lower, upper, flags)
}

fn central(table: &ObservationTable, order: u32, arms: ArmPair, mc: &McOptions) -> Result<Interval> {
    Ok(moment_bounds(table, order, arms, true, mc)?.interval)
}

pub fn skewness_bounds(table: &ObservationTable, arms: ArmPair, mc: &McOptions) -> Result<BoundsEstimate> {
    skewness_from_bounds(central(table, 2, arms, mc)?, central(table, 3, arms, mc)?)
}

pub fn kurtosis_bounds(table: &ObservationTable, arms: ArmPair, mc: &McOptions) -> Result<BoundsEstimate> {
    kurtosis_from_bounds(central(table, 2, arms, mc)?, central(table, 4, arms, mc)?)
}

pub fn correlation_bounds(
    table: &ObservationTable,
    left: ArmPair,
    right: ArmPair,
    mc: &McOptions,
) -> Result<BoundsEstimate> {
    let covariance = product_bounds(table, left, right, true, mc)?.interval;
    correlation_from_bounds(covariance, central(table, 2, left, mc)?, central(table, 2, right, mc)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lower: f64, upper: f64) -> Interval {
        Interval { lower, upper }
    }

    #[test]
    fn reconcile_swaps_small_inversions() {
        let mut flags = Vec::new();
        let lo = McEstimate { value: 1.01, std_error: 0.01 };
        let hi = McEstimate { value: 1.0, std_error: 0.01 };
        let i = reconcile(lo, hi, &mut flags).unwrap();
        assert_eq!((i.lower, i.upper), (1.0, 1.01));
        assert!(matches!(flags[0], Flag::IntervalSwapped { .. }));
        let lo = McEstimate { value: 2.0, std_error: 0.01 };
        assert!(matches!(reconcile(lo, hi, &mut flags), Err(Error::IntervalInverted { .. })));
    }

    #[test]
    fn skewness_branches() {
        let b = skewness_from_bounds(iv(1.0, 4.0), iv(2.0, 16.0)).unwrap();
        assert_eq!((b.interval.lower, b.interval.upper), (2.0 / 8.0, 16.0));
        let b = skewness_from_bounds(iv(1.0, 4.0), iv(-3.0, -1.0)).unwrap();
        assert_eq!((b.interval.lower, b.interval.upper), (-3.0, -1.0 / 8.0));
        let b = skewness_from_bounds(iv(0.0, 4.0), iv(-1.0, 1.0)).unwrap();
        assert_eq!((b.interval.lower, b.interval.upper), (-100.0, 100.0));
        assert_eq!(b.flags.len(), 2);
    }

    #[test]
    fn kurtosis_guard() {
        let b = kurtosis_from_bounds(iv(0.0, 2.0), iv(0.0, 3.0)).unwrap();
        assert_eq!((b.interval.lower, b.interval.upper), (0.0, 300.0));
    }

    #[test]
    fn correlation_branches_and_clip() {
        let b = correlation_from_bounds(iv(-0.5, 0.5), iv(1.0, 4.0), iv(1.0, 4.0)).unwrap();
        assert_eq!((b.interval.lower, b.interval.upper), (-0.5, 0.5));
        let b = correlation_from_bounds(iv(0.4, 0.8), iv(1.0, 4.0), iv(1.0, 1.0)).unwrap();
        assert_eq!((b.interval.lower, b.interval.upper), (0.2, 0.8));
        let b = correlation_from_bounds(iv(-3.0, 3.0), iv(0.0, 4.0), iv(1.0, 4.0)).unwrap();
        assert_eq!((b.interval.lower, b.interval.upper), (-1.0, 1.0));
        assert!(b.flags.iter().any(|f| matches!(f, Flag::CorrelationClipped { .. })));
    }
}
