use thiserror::Error;

use crate::front::ValidationReport;

/// Errors produced by front construction, solvers and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point set is not a valid front: {0}")]
    Validation(ValidationReport),
    #[error("front is empty")]
    EmptyFront,
    #[error("point {index} has a non-finite coordinate")]
    NonFinite { index: usize },
    #[error("alpha must be finite and > 0, got {0}")]
    InvalidAlpha(f64),
    #[error("index {index} out of range for a front of {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("p = {p} is infeasible for a front of {n} points (need {min} <= p <= n)")]
    InvalidP { p: usize, n: usize, min: usize },
    #[error("enumeration of {combinations} selections exceeds the budget of {limit}")]
    BudgetExceeded { combinations: u128, limit: u128 },
    #[error("greedy walk could not place {p} points at distance >= {opt}")]
    InconsistentOptimum { p: usize, opt: f64 },
    #[error("malformed selection: {0}")]
    MalformedSelection(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
