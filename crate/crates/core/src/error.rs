use thiserror::Error;

/// Errors raised while building fields, assembling systems or solving them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid combination of settings (orders, kinds, intervals).
    #[error("configuration error: {0}")]
    Config(String),
    /// A point or parameter lies outside the region where it is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical routine failed (non-convergence, non-finite values).
    #[error("numeric error: {0}")]
    Numeric(String),
    /// User-supplied data is inconsistent, e.g. mismatched corner values.
    #[error("data error: {0}")]
    Data(String),
    /// A vector or matrix has the wrong length.
    #[error("shape error: expected length {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    /// An operation was requested in a mode that cannot support it.
    #[error("mode error: {0}")]
    Mode(String),
    /// Relative constraints are cyclic, conflicting or target fixed entries.
    #[error("constraint error: {0}")]
    Constraint(String),
    /// The support functions of a constrained expression are degenerate.
    #[error("support basis error: {0}")]
    SupportBasis(String),
    /// Gauss-Newton gave up; `trace` holds the residual norm per iteration.
    #[error("convergence failure after {iterations} iterations: {reason}")]
    Convergence {
        iterations: usize,
        reason: String,
        trace: Vec<f64>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
