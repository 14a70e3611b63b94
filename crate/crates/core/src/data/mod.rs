//! Observational data model: the observation table, empirical conditional
//! CDFs and expectations, and the integration domain derived from the data.

mod cdf;
mod csv_io;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cdf::{ConditionalCdf, FnCdf, StepCdf};
pub use csv_io::{ingest_csv, read_csv, write_csv, CsvSchema};

/// Treatment arm label.
pub type Arm = i64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub x: Arm,
    pub y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<i64>,
}

impl Observation {
    pub fn new(x: Arm, y: f64) -> Self {
        Self { x, y, w: None }
    }

    pub fn with_covariate(x: Arm, y: f64, w: i64) -> Self {
        Self { x, y, w: Some(w) }
    }
}

/// Rows of `(arm, outcome, optional covariate level)`; immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationTable {
    rows: Vec<Observation>,
    arms: BTreeSet<Arm>,
    has_covariate: bool,
}

impl ObservationTable {
    /// Validates and wraps `rows`.
    ///
    /// Rejects an empty row set, non-finite outcomes, and a covariate column
    /// that is present on some rows but not others.
    pub fn new(rows: Vec<Observation>) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyTable)?;
        let has_covariate = first.w.is_some();
        for (i, row) in rows.iter().enumerate() {
            if !row.y.is_finite() {
                return Err(Error::Validation(format!(
                    "row {}: outcome {} is not finite",
                    i + 1,
                    row.y
                )));
            }
            if row.w.is_some() != has_covariate {
                return Err(Error::Validation(format!(
                    "row {}: covariate must be present on all rows or on none",
                    i + 1
                )));
            }
        }
        let arms = rows.iter().map(|r| r.x).collect();
        Ok(Self {
            rows,
            arms,
            has_covariate,
        })
    }

    pub fn rows(&self) -> &[Observation] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn arms(&self) -> &BTreeSet<Arm> {
        &self.arms
    }

    pub fn has_covariate(&self) -> bool {
        self.has_covariate
    }

    pub fn arm_count(&self, arm: Arm) -> usize {
        self.rows.iter().filter(|r| r.x == arm).count()
    }

    /// Outcomes of one arm in row order.
    pub fn outcomes(&self, arm: Arm) -> Result<Vec<f64>> {
        let ys: Vec<f64> = self.rows.iter().filter(|r| r.x == arm).map(|r| r.y).collect();
        if ys.is_empty() {
            return Err(Error::EmptyArm(arm));
        }
        Ok(ys)
    }

    /// Arithmetic mean of the outcomes in `arm`, summed in row order.
    pub fn conditional_mean(&self, arm: Arm) -> Result<f64> {
        let ys = self.outcomes(arm)?;
        Ok(sequential_mean(&ys))
    }

    /// Empirical `P(Y < y | X = arm)`, or its centred version
    /// `P(Y - E[Y | X = arm] < y | X = arm)` when `centered` is set.
    pub fn empirical_cdf(&self, arm: Arm, centered: bool) -> Result<EmpiricalConditionalCdf> {
        let ys = self.outcomes(arm)?;
        let center = if centered { sequential_mean(&ys) } else { 0.0 };
        Ok(EmpiricalConditionalCdf {
            arm,
            n_arm: ys.len(),
            centered,
            center,
            steps: StepCdf::empirical(&ys),
        })
    }

    /// `[min, max]` of the outcomes pooled over every arm; in centred mode each
    /// outcome first has its own arm mean subtracted.
    pub fn domain_bounds(&self, centered: bool) -> Result<DomainBounds> {
        if self.rows.is_empty() {
            return Err(Error::EmptyTable);
        }
        let mut lower = f64::INFINITY;
        let mut upper = f64::NEG_INFINITY;
        for &arm in &self.arms {
            let ys = self.outcomes(arm)?;
            let shift = if centered { sequential_mean(&ys) } else { 0.0 };
            for y in ys {
                let v = y - shift;
                lower = lower.min(v);
                upper = upper.max(v);
            }
        }
        DomainBounds::new(lower, upper)
    }

    /// Distinct covariate levels, ascending. Empty without a covariate column.
    pub fn covariate_levels(&self) -> BTreeSet<i64> {
        self.rows.iter().filter_map(|r| r.w).collect()
    }

    /// Rows selected by `keep`, with the arm set recomputed.
    pub fn filter<F: Fn(&Observation) -> bool>(&self, keep: F) -> Result<Self> {
        Self::new(self.rows.iter().copied().filter(|r| keep(r)).collect())
    }
}

fn sequential_mean(ys: &[f64]) -> f64 {
    let mut sum = 0.0;
    for y in ys {
        sum += y;
    }
    sum / ys.len() as f64
}

/// Empirical conditional CDF of one arm, optionally centred at the arm mean.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalConditionalCdf {
    arm: Arm,
    n_arm: usize,
    centered: bool,
    center: f64,
    steps: StepCdf,
}

impl EmpiricalConditionalCdf {
    pub fn arm(&self) -> Arm {
        self.arm
    }

    pub fn n_arm(&self) -> usize {
        self.n_arm
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    /// The subtracted arm mean; zero when not centred.
    pub fn center(&self) -> f64 {
        self.center
    }

    /// Raw (uncentred) outcomes of the arm, ascending.
    pub fn sorted_values(&self) -> &[f64] {
        self.steps.atoms()
    }

    /// Evaluates the step function at `y`.
    pub fn eval(&self, y: f64) -> f64 {
        self.steps.prob_below(y + self.center)
    }

    /// The law this CDF describes as a standalone step function (centred
    /// atoms when centred).
    pub fn to_step_cdf(&self) -> StepCdf {
        if self.centered {
            self.steps.shifted(-self.center)
        } else {
            self.steps.clone()
        }
    }
}

impl ConditionalCdf for EmpiricalConditionalCdf {
    #[inline]
    fn prob_below(&self, y: f64) -> f64 {
        self.eval(y)
    }
}

/// Closed integration interval `[lower, upper]` for outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainBounds {
    pub lower: f64,
    pub upper: f64,
}

impl DomainBounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) || lower > upper {
            return Err(Error::InvalidBounds { lower, upper });
        }
        Ok(Self { lower, upper })
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}
