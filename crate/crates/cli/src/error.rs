use std::fmt::Display;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// The scenario file is missing, malformed or violates a constraint.
    #[error("config error: {0}")]
    Config(String),
    /// The analysis itself failed, or output could not be written.
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn config(path: impl Display, message: impl Display) -> Self {
        CliError::Config(format!("{path}: {message}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }
}

impl From<tcr_core::TcrError> for CliError {
    fn from(e: tcr_core::TcrError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
