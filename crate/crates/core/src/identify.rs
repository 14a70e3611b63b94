//! Point-identified estimators under exogeneity and monotonicity.
//!
//! Every integral is evaluated by [`quadrature`](crate::quadrature) with
//! multi-output integrands, so the Fréchet bounds of the same quantity come
//! out of the same pass at no extra cost (see [`MomentFamily`]).

use serde::{Deserialize, Serialize};

use crate::data::{Arm, DomainBounds, EmpiricalConditionalCdf, ObservationTable};
use crate::error::{Error, Result};
use crate::integrands::{MomentIntegrand, ProductIntegrand, IDENTIFIED, LOWER, UPPER};
use crate::quadrature::{integrate_all, IntegrationConfig, McEstimate, McOptions};
use crate::report::{clip_unit, guard_denominator, Flag};

/// The contrast `Y_treated - Y_control`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArmPair {
    pub treated: Arm,
    pub control: Arm,
}

impl ArmPair {
    pub fn new(treated: Arm, control: Arm) -> Result<Self> {
        if treated == control {
            return Err(Error::Validation(format!(
                "arm pair needs two distinct arms (got {treated},{control})"
            )));
        }
        Ok(Self { treated, control })
    }

    pub fn reversed(self) -> Self {
        Self {
            treated: self.control,
            control: self.treated,
        }
    }
}

impl std::fmt::Display for ArmPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.treated, self.control)
    }
}

/// A moment of one contrast.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentRequest {
    pub order: u32,
    pub arms: ArmPair,
    pub centered: bool,
    pub mc: McOptions,
}

impl MomentRequest {
    pub fn new(order: u32, arms: ArmPair, centered: bool, mc: McOptions) -> Self {
        Self {
            order,
            arms,
            centered,
            mc,
        }
    }
}

/// The identified value of an integral together with its Fréchet bounds, all
/// estimated from the same Monte Carlo points.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentFamily {
    pub identified: McEstimate,
    pub lower: McEstimate,
    pub upper: McEstimate,
    pub config: IntegrationConfig,
}

fn check_order(order: u32) -> Result<usize> {
    if order == 0 {
        Err(Error::InvalidOrder(order))
    } else {
        Ok(order as usize)
    }
}

fn family(estimates: Vec<McEstimate>, config: IntegrationConfig) -> MomentFamily {
    MomentFamily {
        identified: estimates[IDENTIFIED],
        lower: estimates[LOWER],
        upper: estimates[UPPER],
        config,
    }
}

fn cdf_pair(
    table: &ObservationTable,
    arms: ArmPair,
    centered: bool,
) -> Result<(EmpiricalConditionalCdf, EmpiricalConditionalCdf)> {
    Ok((
        table.empirical_cdf(arms.treated, centered)?,
        table.empirical_cdf(arms.control, centered)?,
    ))
}

/// Data-derived integration domain, after validating that the arms exist.
pub fn domain_for(table: &ObservationTable, arms: &[ArmPair], centered: bool) -> Result<DomainBounds> {
    for pair in arms {
        for arm in [pair.treated, pair.control] {
            if table.arm_count(arm) == 0 {
                return Err(Error::EmptyArm(arm));
            }
        }
    }
    table.domain_bounds(centered)
}

/// `order`-th (central) moment of `Y_i - Y_j` with bounds, integrated under an
/// explicit config.
pub fn moment_family_with(
    table: &ObservationTable,
    order: u32,
    arms: ArmPair,
    centered: bool,
    config: &IntegrationConfig,
) -> Result<MomentFamily> {
    let m = check_order(order)?;
    let (fi, fj) = cdf_pair(table, arms, centered)?;
    let estimates = integrate_all(&MomentIntegrand::new(m, &fi, &fj), config)?;
    Ok(family(estimates, config.clone()))
}

/// `order`-th (central) moment of `Y_i - Y_j` with bounds over the data domain.
pub fn moment_family(
    table: &ObservationTable,
    order: u32,
    arms: ArmPair,
    centered: bool,
    mc: &McOptions,
) -> Result<MomentFamily> {
    let m = check_order(order)?;
    let domain = domain_for(table, &[arms], centered)?;
    moment_family_with(table, order, arms, centered, &mc.config(m, domain))
}

/// Product moment (or covariance when `centered`) of `Y_i - Y_j` and
/// `Y_k - Y_h` with bounds, integrated under an explicit config.
pub fn product_family_with(
    table: &ObservationTable,
    left: ArmPair,
    right: ArmPair,
    centered: bool,
    config: &IntegrationConfig,
) -> Result<MomentFamily> {
    let (fi, fj) = cdf_pair(table, left, centered)?;
    let (fk, fh) = cdf_pair(table, right, centered)?;
    let estimates = integrate_all(&ProductIntegrand::new(&fi, &fj, &fk, &fh), config)?;
    Ok(family(estimates, config.clone()))
}

pub fn product_family(
    table: &ObservationTable,
    left: ArmPair,
    right: ArmPair,
    centered: bool,
    mc: &McOptions,
) -> Result<MomentFamily> {
    let domain = domain_for(table, &[left, right], centered)?;
    product_family_with(table, left, right, centered, &mc.config(2, domain))
}

/// Plug-in estimate of `E[(Y_i - Y_j)^m]`.
pub fn moment_identified(table: &ObservationTable, req: &MomentRequest) -> Result<McEstimate> {
    Ok(moment_family(table, req.order, req.arms, false, &req.mc)?.identified)
}

/// Plug-in estimate of `E[((Y_i - Y_j) - E[Y_i - Y_j])^m]` from arm-centred CDFs.
pub fn central_moment_identified(table: &ObservationTable, req: &MomentRequest) -> Result<McEstimate> {
    Ok(moment_family(table, req.order, req.arms, true, &req.mc)?.identified)
}

/// Plug-in estimate of `E[(Y_i - Y_j)(Y_k - Y_h)]`.
pub fn product_moment_identified(
    table: &ObservationTable,
    left: ArmPair,
    right: ArmPair,
    mc: &McOptions,
) -> Result<McEstimate> {
    Ok(product_family(table, left, right, false, mc)?.identified)
}

/// Plug-in estimate of the covariance of `Y_i - Y_j` and `Y_k - Y_h`.
pub fn central_product_moment_identified(
    table: &ObservationTable,
    left: ArmPair,
    right: ArmPair,
    mc: &McOptions,
) -> Result<McEstimate> {
    Ok(product_family(table, left, right, true, mc)?.identified)
}

/// A value that went through clipping or the denominator guard.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuardedValue {
    pub value: f64,
    pub flags: Vec<Flag>,
}

fn clip_variance(raw: f64, flags: &mut Vec<Flag>) -> f64 {
    if raw < 0.0 {
        flags.push(Flag::VarianceClipped { raw });
        0.0
    } else {
        raw
    }
}

/// Correlation of `Y_i - Y_j` and `Y_k - Y_h`: covariance over the product of
/// the two standard deviations, guarded and clipped to `[-1, 1]`.
pub fn correlation_identified(
    table: &ObservationTable,
    left: ArmPair,
    right: ArmPair,
    mc: &McOptions,
) -> Result<GuardedValue> {
    let cov = central_product_moment_identified(table, left, right, mc)?.value;
    let var_left = central_moment_identified(table, &MomentRequest::new(2, left, true, *mc))?.value;
    let var_right = central_moment_identified(table, &MomentRequest::new(2, right, true, *mc))?.value;
    Ok(correlation_from_parts(cov, var_left, var_right))
}

/// Combines a covariance and two variances into a guarded correlation.
pub fn correlation_from_parts(cov: f64, var_left: f64, var_right: f64) -> GuardedValue {
    let mut flags = Vec::new();
    let var_left = clip_variance(var_left, &mut flags);
    let var_right = clip_variance(var_right, &mut flags);
    let denominator = guard_denominator(var_left.sqrt() * var_right.sqrt(), "sd_left*sd_right", &mut flags);
    let value = clip_unit(cov / denominator, "correlation", &mut flags);
    GuardedValue { value, flags }
}

/// Variance, standard deviation, skewness and kurtosis of one contrast.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedStats {
    pub variance: f64,
    pub std_dev: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub flags: Vec<Flag>,
}

impl DerivedStats {
    /// From the second, third and fourth central moments.
    pub fn from_central_moments(mu2: f64, mu3: f64, mu4: f64) -> Self {
        let mut flags = Vec::new();
        let variance = clip_variance(mu2, &mut flags);
        let skew_den = guard_denominator(variance.powf(1.5), "variance^1.5", &mut flags);
        let kurt_den = guard_denominator(variance * variance, "variance^2", &mut flags);
        Self {
            variance,
            std_dev: variance.sqrt(),
            skewness: mu3 / skew_den,
            kurtosis: mu4 / kurt_den,
            flags,
        }
    }

    pub fn values(&self) -> [f64; 4] {
        [self.variance, self.std_dev, self.skewness, self.kurtosis]
    }
}

pub fn derived_stats(table: &ObservationTable, arms: ArmPair, mc: &McOptions) -> Result<DerivedStats> {
    let central = |m| central_moment_identified(table, &MomentRequest::new(m, arms, true, *mc)).map(|e| e.value);
    Ok(DerivedStats::from_central_moments(central(2)?, central(3)?, central(4)?))
}

/// `E[Y | X = i] - E[Y | X = j]`.
pub fn ate(table: &ObservationTable, arms: ArmPair) -> Result<f64> {
    Ok(table.conditional_mean(arms.treated)? - table.conditional_mean(arms.control)?)
}
