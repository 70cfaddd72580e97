use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A row or column block with zero Frobenius norm.
    #[error("degenerate {side} block {index}: zero Frobenius norm")]
    DegenerateBlock { side: &'static str, index: usize },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// The primal point is not `grad_conj(dual)`.
    #[error("inconsistent dual/primal pair (max deviation {0:e})")]
    InconsistentPair(f64),

    #[error("infeasible noise: {0}")]
    InfeasibleNoise(String),

    /// The request exceeds what a brute-force routine supports.
    #[error("capability exceeded: {0}")]
    Capability(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
