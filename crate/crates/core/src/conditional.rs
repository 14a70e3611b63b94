//! Estimates conditioned on a discrete covariate level.
//!
//! Every estimator applied to a stratum sees only that stratum's rows, so the
//! domain bounds and arm means are rederived inside it.

use serde::{Deserialize, Serialize};

use crate::data::ObservationTable;
use crate::error::{Error, Result};
use crate::estimate::{evaluate, EvalOptions, Request};
use crate::report::EstimateReport;

/// Rows with covariate level `w`.
pub fn stratify(table: &ObservationTable, w: i64) -> Result<ObservationTable> {
    if !table.has_covariate() {
        return Err(Error::Schema("table has no covariate column".into()));
    }
    table.filter(|r| r.w == Some(w)).map_err(|e| match e {
        Error::EmptyTable => Error::EmptyStratum(w),
        other => other,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StratumRequest {
    pub level: i64,
    pub request: Request,
}

/// The request evaluated on `stratify(table, level)`.
pub fn conditional_estimate(
    table: &ObservationTable,
    req: &StratumRequest,
    options: &EvalOptions,
) -> Result<Vec<EstimateReport>> {
    let stratum = stratify(table, req.level)?;
    evaluate(&stratum, &req.request, options, Some(req.level))
}

/// Empirical covariate distribution `P(W = w)`, ascending by level.
pub fn level_weights(table: &ObservationTable) -> Vec<(i64, f64)> {
    let n = table.len() as f64;
    table
        .covariate_levels()
        .into_iter()
        .map(|w| (w, table.rows().iter().filter(|r| r.w == Some(w)).count() as f64 / n))
        .collect()
}
