use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the numerical routines.
///
/// Values carried for diagnostics are converted to `f64` so that the error type
/// does not depend on the scalar the computation ran with.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("`{name}` = {value} lies outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("quadrature did not converge: error estimate {achieved:e} exceeds requested {requested:e} after {intervals} subintervals")]
    QuadratureNonConvergence {
        achieved: f64,
        requested: f64,
        intervals: usize,
    },

    #[error("quantile tolerance not reached; final bracket [{lo}, {hi}], residual {residual:e}")]
    ToleranceNotReached { lo: f64, hi: f64, residual: f64 },

    #[error("objective is singular at ({a}, {b})")]
    Singular { a: f64, b: f64 },

    #[error("finite-difference step {h:e} too small: estimates at h and 2h differ by {spread:e}")]
    StepTooSmall { h: f64, spread: f64 },

    #[error("certification failed: numeric curvature {numeric} below analytic bound {analytic}")]
    CertificationFailure { numeric: f64, analytic: f64 },

    #[error("grid M={grid} too coarse: relative change {relative_change:e} between refinements")]
    GridTooCoarse { grid: usize, relative_change: f64 },

    #[error("sector audit failed: level 2 value {level2} below level 1 value {level1}")]
    SectorAudit { level1: f64, level2: f64 },

    #[error("norm validation failed: {0}")]
    NormValidation(String),

    #[error("{rejected} of {total} walks hit the step cap (limit 0.1%)")]
    TooManyRejections { rejected: usize, total: usize },

    #[error("malformed sample file: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
