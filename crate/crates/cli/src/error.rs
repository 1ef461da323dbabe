use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// A computed property or table did not hold; the output is still written.
    #[error("{0}")]
    Check(String),
    #[error("{0}")]
    Budget(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Internal(String),
}

impl From<turanlab::Error> for CliError {
    fn from(e: turanlab::Error) -> Self {
        use turanlab::Error as E;
        match e {
            E::Budget { .. } | E::CostLimit(_) => CliError::Budget(e.to_string()),
            E::Internal(_) => CliError::Internal(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Check(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) | CliError::Internal(_) => 1,
        })
    }
}
