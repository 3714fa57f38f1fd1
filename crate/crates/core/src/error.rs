use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Domain(String),

    #[error("capacity exceeded: {what} = {got}, limit {limit}")]
    Capacity {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("quadrature did not converge after {intervals} subintervals (estimate {estimate}, error {error_estimate:e})")]
    NoConvergence {
        intervals: usize,
        estimate: f64,
        error_estimate: f64,
    },

    #[error("correlation undefined: {0} has zero variance")]
    UndefinedCorrelation(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
