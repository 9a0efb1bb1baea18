use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid `{field}`: {message}")]
    Invalid { field: &'static str, message: String },

    #[error("cannot read `{}`: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },

    #[error("malformed config `{}`: {message}", path.display())]
    Config { path: PathBuf, message: String },

    #[error("cannot write `{}`: {message}", path.display())]
    Write { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] gossipfpp_core::Error),

    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed(_) => 1,
            _ => 2,
        }
    }
}

pub fn invalid(field: &'static str, message: impl Into<String>) -> CliError {
    CliError::Invalid { field, message: message.into() }
}
