//! One entry point from a request to finished reports, with optional
//! bootstrap intervals.

use serde::{Deserialize, Serialize};

use crate::bootstrap::{bootstrap, BootstrapConfig, BootstrapResult};
use crate::bounds::{self, monotonicity_check, BoundsEstimate};
use crate::data::ObservationTable;
use crate::error::Result;
use crate::identify::{self, domain_for, ArmPair, MomentFamily};
use crate::quadrature::McOptions;
use crate::report::{CiReport, Estimate, EstimateReport, Flag, Quantity, RunConfig, Sharpness, DENOMINATOR_FLOOR};

/// What to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum Target {
    Ate { arms: ArmPair },
    Moment { order: u32, arms: ArmPair, centered: bool },
    Product { left: ArmPair, right: ArmPair, centered: bool },
    Correlation { left: ArmPair, right: ArmPair },
    /// Variance, standard deviation, skewness and kurtosis.
    DerivedStats { arms: ArmPair },
}

/// Point identification (exogeneity and monotonicity) or bounds (exogeneity
/// only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Identified,
    Bounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub target: Target,
    pub mode: Mode,
}

impl Request {
    pub fn identified(target: Target) -> Self {
        Self {
            target,
            mode: Mode::Identified,
        }
    }

    pub fn bounds(target: Target) -> Self {
        Self {
            target,
            mode: Mode::Bounds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalOptions {
    pub mc: McOptions,
    pub bootstrap: Option<BootstrapConfig>,
}

/// Per-quantity output of one evaluation, before bootstrap.
#[derive(Debug, Clone, PartialEq)]
struct Part {
    quantity: Quantity,
    estimate: Estimate,
    std_error: Option<Estimate>,
    sharp: Option<Sharpness>,
    flags: Vec<Flag>,
}

impl Part {
    fn point(quantity: Quantity, value: f64, se: Option<f64>, flags: Vec<Flag>) -> Self {
        Self {
            quantity,
            estimate: Estimate::Point(value),
            std_error: se.map(Estimate::Point),
            sharp: None,
            flags,
        }
    }

    fn bounds(quantity: Quantity, b: BoundsEstimate) -> Self {
        let std_error = match (b.lower_se, b.upper_se) {
            (Some(lower), Some(upper)) => Some(Estimate::Interval { lower, upper }),
            _ => None,
        };
        Self {
            quantity,
            estimate: Estimate::Interval {
                lower: b.interval.lower,
                upper: b.interval.upper,
            },
            std_error,
            sharp: Some(b.sharp),
            flags: b.flags,
        }
    }

    fn values(&self) -> Vec<f64> {
        match self.estimate {
            Estimate::Point(v) => vec![v],
            Estimate::Interval { lower, upper } => vec![lower, upper],
        }
    }
}

fn moment_quantity(centered: bool) -> Quantity {
    if centered {
        Quantity::CentralMoment
    } else {
        Quantity::Moment
    }
}

fn family_bounds(family: &MomentFamily, order: u32, quantity: Quantity) -> Result<Part> {
    let sharp = if order % 2 == 0 { Sharpness::Upper } else { Sharpness::None };
    let mut flags = Vec::new();
    let interval = bounds::reconcile(family.lower, family.upper, &mut flags)?;
    flags.extend(monotonicity_check(family));
    Ok(Part::bounds(
        quantity,
        BoundsEstimate {
            interval,
            lower_se: Some(family.lower.std_error),
            upper_se: Some(family.upper.std_error),
            sharp,
            flags,
        },
    ))
}

fn parts(table: &ObservationTable, request: &Request, mc: &McOptions) -> Result<Vec<Part>> {
    use Mode::*;
    use Target::*;
    Ok(match (request.target, request.mode) {
        (Ate { arms }, Identified) => vec![Part::point(Quantity::Ate, identify::ate(table, arms)?, None, Vec::new())],
        (Ate { arms }, Bounds) => {
            let family = identify::moment_family(table, 1, arms, false, mc)?;
            vec![family_bounds(&family, 1, Quantity::Ate)?]
        }
        (Moment { order, arms, centered }, Identified) => {
            let family = identify::moment_family(table, order, arms, centered, mc)?;
            let est = family.identified;
            vec![Part::point(moment_quantity(centered), est.value, Some(est.std_error), Vec::new())]
        }
        (Moment { order, arms, centered }, Bounds) => {
            let family = identify::moment_family(table, order, arms, centered, mc)?;
            vec![family_bounds(&family, order, moment_quantity(centered))?]
        }
        (Product { left, right, centered }, mode) => {
            let family = identify::product_family(table, left, right, centered, mc)?;
            let quantity = if centered {
                Quantity::Covariance
            } else {
                Quantity::ProductMoment
            };
            match mode {
                Identified => {
                    let est = family.identified;
                    vec![Part::point(quantity, est.value, Some(est.std_error), Vec::new())]
                }
                Bounds => vec![family_bounds(&family, 1, quantity)?],
            }
        }
        (Correlation { left, right }, Identified) => {
            let g = identify::correlation_identified(table, left, right, mc)?;
            vec![Part::point(Quantity::Correlation, g.value, None, g.flags)]
        }
        (Correlation { left, right }, Bounds) => {
            vec![Part::bounds(
                Quantity::Correlation,
                bounds::correlation_bounds(table, left, right, mc)?,
            )]
        }
        (DerivedStats { arms }, Identified) => {
            let s = identify::derived_stats(table, arms, mc)?;
            [Quantity::Variance, Quantity::StdDev, Quantity::Skewness, Quantity::Kurtosis]
                .into_iter()
                .zip(s.values())
                .map(|(q, v)| Part::point(q, v, None, s.flags.clone()))
                .collect()
        }
        (DerivedStats { arms }, Bounds) => {
            let second = bounds::moment_bounds(table, 2, arms, true, mc)?;
            let third = bounds::moment_bounds(table, 3, arms, true, mc)?.interval;
            let fourth = bounds::moment_bounds(table, 4, arms, true, mc)?.interval;
            let sd = BoundsEstimate {
                interval: bounds::Interval {
                    lower: second.interval.lower.max(0.0).sqrt(),
                    upper: second.interval.upper.max(0.0).sqrt(),
                },
                lower_se: None,
                upper_se: None,
                sharp: second.sharp,
                flags: Vec::new(),
            };
            let skew = bounds::skewness_from_bounds(second.interval, third)?;
            let kurt = bounds::kurtosis_from_bounds(second.interval, fourth)?;
            vec![
                Part::bounds(Quantity::Variance, second),
                Part::bounds(Quantity::StdDev, sd),
                Part::bounds(Quantity::Skewness, skew),
                Part::bounds(Quantity::Kurtosis, kurt),
            ]
        }
    })
}

/// All scalars the request produces, flattened in report order; the unit of
/// bootstrap resampling.
pub fn request_values(table: &ObservationTable, request: &Request, mc: &McOptions) -> Result<Vec<f64>> {
    Ok(parts(table, request, mc)?.iter().flat_map(Part::values).collect())
}

impl Target {
    pub fn arms(&self) -> Vec<ArmPair> {
        match *self {
            Target::Ate { arms } | Target::Moment { arms, .. } | Target::DerivedStats { arms } => vec![arms],
            Target::Product { left, right, .. } | Target::Correlation { left, right } => vec![left, right],
        }
    }

    pub fn order(&self) -> Option<u32> {
        match *self {
            Target::Ate { .. } => Some(1),
            Target::Moment { order, .. } => Some(order),
            _ => None,
        }
    }

    pub fn centered(&self) -> bool {
        match *self {
            Target::Moment { centered, .. } | Target::Product { centered, .. } => centered,
            Target::Correlation { .. } | Target::DerivedStats { .. } => true,
            Target::Ate { .. } => false,
        }
    }
}

/// Evaluates `request` on `table`, attaching bootstrap intervals when
/// configured. `condition` is recorded in the reports only.
pub fn evaluate(
    table: &ObservationTable,
    request: &Request,
    options: &EvalOptions,
    condition: Option<i64>,
) -> Result<Vec<EstimateReport>> {
    let target = request.target;
    let centered = target.centered();
    let domain = domain_for(table, &target.arms(), centered)?;
    let domain = Some(options.mc.bounds_override.unwrap_or(domain));
    let parts = parts(table, request, &options.mc)?;
    let boot: Option<BootstrapResult> = match &options.bootstrap {
        Some(cfg) => Some(bootstrap(
            |t, seed| request_values(t, request, &options.mc.reseeded(seed)),
            table,
            cfg,
        )?),
        None => None,
    };
    let config = RunConfig {
        mc: options.mc,
        domain,
        centered,
        denominator_floor: DENOMINATOR_FLOOR,
        bootstrap: options.bootstrap,
    };
    let mut component = 0;
    let mut reports = Vec::with_capacity(parts.len());
    for part in parts {
        let width = part.values().len();
        let mut flags = part.flags;
        let ci = boot.as_ref().map(|b| {
            flags.extend(b.failure_flag());
            if width == 1 {
                CiReport::Point(b.interval(component))
            } else {
                CiReport::Bounds {
                    lower_bound: b.interval(component),
                    upper_bound: b.interval(component + 1),
                }
            }
        });
        component += width;
        reports.push(EstimateReport {
            quantity: part.quantity,
            arms: target.arms(),
            order: match part.quantity {
                Quantity::Moment | Quantity::CentralMoment | Quantity::Ate => target.order(),
                _ => None,
            },
            condition,
            estimate: part.estimate,
            std_error: part.std_error,
            sharp: part.sharp,
            ci,
            flags,
            config: config.clone(),
        });
    }
    Ok(reports)
}
