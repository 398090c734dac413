use kmlab::KmError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Core(#[from] KmError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(KmError::Infeasible(_) | KmError::DimensionTooLarge { .. } | KmError::DimensionMismatch { .. }) => 3,
            CliError::Core(KmError::StateBudgetExceeded { .. }) => 4,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}
