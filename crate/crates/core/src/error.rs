use thiserror::Error;

/// Errors produced by the clustering and tuning routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input parameter is outside its valid range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A documented precondition on the inputs was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Operand shapes do not agree.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// An iterative numerical routine failed to converge.
    #[error("{what} failed to converge (residual {residual:e})")]
    SolverFailure { what: String, residual: f64 },

    /// Input is degenerate for the requested operation (e.g. all-zero matrix).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Parameter estimation is ill-posed (singular or badly conditioned system).
    #[error("estimation failed: {0}")]
    Estimation(String),

    /// Hyperparameter tuning or model selection could not produce a result.
    #[error("tuning failed: {0}")]
    Tuning(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
