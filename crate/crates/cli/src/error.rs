use qpe_core::QpeError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Config could not be parsed or failed validation; names the offending key.
    #[error("config error: {0}")]
    Config(String),

    #[error("runtime error: {0}")]
    Runtime(#[from] QpeError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// An oracle cross-check failed; names the failing invariant.
    #[error("oracle check failed: {0}")]
    OracleCheck(String),
}

impl CliError {
    pub fn config(key: &str, message: impl std::fmt::Display) -> Self {
        CliError::Config(format!("`{key}`: {message}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) | CliError::Io(_) => 3,
            CliError::OracleCheck(_) => 4,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
