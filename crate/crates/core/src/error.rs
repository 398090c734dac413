use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KmError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {n} exceeds the supported maximum {max}")]
    DimensionTooLarge { n: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("state budget exceeded: {states} states > budget {budget}")]
    StateBudgetExceeded { states: u128, budget: u128 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, KmError>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(KmError::DimensionMismatch { expected, found })
    }
}

pub(crate) fn check_max_dim(n: usize, max: usize) -> Result<()> {
    if n > max {
        Err(KmError::DimensionTooLarge { n, max })
    } else {
        Ok(())
    }
}
