use thiserror::Error;

/// Errors raised by grid construction, operators and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("missing period data: {0}")]
    MissingPeriods(String),
    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },
    #[error("blow-up at t = {time}: sup-norm {sup_norm:e} exceeds limit, dominant mode k = {mode}")]
    BlowUp { time: f64, sup_norm: f64, mode: i64 },
    #[error("value out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
