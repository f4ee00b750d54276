use thiserror::Error;

/// Errors produced by the construction, verification and disc-bound routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("internal error: {0}")]
    Internal(String),

    /// The chosen polygon order does not leave a positive coverage margin.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// Residual strips could not be certified even after shrinking the strip.
    #[error("certification failed: {0}")]
    Certification(String),

    /// The exact tile-count forecast exceeds the configured budget.
    #[error("tile budget exceeded: forecast {forecast} tiles, budget {budget}")]
    TileBudget { forecast: u128, budget: usize },

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("constants infeasible: {0}")]
    ConstantsInfeasible(String),

    #[error("calibration error: {0}")]
    Calibration(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
