use thiserror::Error;

/// Errors produced anywhere in the simulator and its analytics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("degenerate channel: {0}")]
    Degenerate(String),
    #[error("outside the approximation regime: {0}")]
    OutOfRegime(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
