use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config validation error: {0}")]
    Validation(String),
    #[error("{context}: {source}")]
    Numerics {
        context: String,
        source: spinbus_core::CoreError,
    },
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Attach experiment context to a core-crate error.
pub fn numerics(context: &str) -> impl Fn(spinbus_core::CoreError) -> CliError + '_ {
    move |source| CliError::Numerics {
        context: context.to_string(),
        source,
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Validation(_) => 2,
            CliError::Schema(_) => 3,
            _ => 1,
        }
    }
}
