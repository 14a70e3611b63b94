use thiserror::Error;

use crate::data::Arm;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}: cannot parse column `{column}` value {value:?}")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("no observations for arm {0}")]
    EmptyArm(Arm),

    #[error("no observations with covariate level {0}")]
    EmptyStratum(i64),

    #[error("observation table is empty")]
    EmptyTable,

    #[error("moment order must be at least 1 (got {0})")]
    InvalidOrder(u32),

    #[error("invalid integration bounds [{lower}, {upper}]")]
    InvalidBounds { lower: f64, upper: f64 },

    #[error("integration config: {0}")]
    Config(String),

    #[error(
        "tensor-mode integration in {dimension} dimensions needs {evaluations:.3e} integrand \
         evaluations; use joint mode or opt in to large tensor grids"
    )]
    TensorGuard { dimension: usize, evaluations: f64 },

    #[error(
        "bound estimate inverted by {gap} (more than 3 standard errors, {tolerance}); \
         increase the Monte Carlo point count"
    )]
    IntervalInverted { gap: f64, tolerance: f64 },

    #[error("all {0} bootstrap replicates failed")]
    BootstrapFailed(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
