use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the certification engine and its oracles.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates the precondition of the operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A query falls outside the range a table was built for.
    #[error("{what} = {value} exceeds the table limit {limit}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        limit: f64,
    },

    /// An explicit estimate is evaluated outside the range where it is valid.
    #[error("{bound} is only valid for {domain}, got x = {x}")]
    OutOfDomain {
        bound: &'static str,
        domain: &'static str,
        x: f64,
    },

    /// A brute-force oracle refuses a problem larger than its cap.
    #[error("{what} = {value} exceeds the oracle cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: f64,
        cap: f64,
    },

    /// A formula is evaluated where one of its logarithms has argument <= 1.
    #[error("formula outside intended regime: {0}")]
    OutsideRegime(String),

    /// No modulus threshold below the search cap certifies the target.
    #[error("unattainable at B = {b}: no q0 <= 1e{max_log10} certifies c = {target_c}")]
    Unattainable {
        b: f64,
        target_c: f64,
        max_log10: f64,
    },

    /// Allocation would exceed the configured memory budget.
    #[error("{what} needs {needed} bytes, budget is {budget} bytes")]
    Resource {
        what: &'static str,
        needed: u64,
        budget: u64,
    },

    #[error("sieve cache {path}: {reason}")]
    Cache { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
