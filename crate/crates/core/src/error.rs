use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("no unique stationary distribution: {0}")]
    NoUniqueStationary(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// Too many nodes were still unreached inside the measurement window.
    #[error("insufficient burn-in: not-reached fraction {0} exceeds the allowed limit")]
    InsufficientBurnIn(f64),

    #[error("unsupported chain: {0}")]
    UnsupportedChain(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
