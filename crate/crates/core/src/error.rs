use thiserror::Error;

/// Errors surfaced by the numerical pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("FCIDUMP header: {0}")]
    Header(String),
    #[error("FCIDUMP line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("index out of range: {0}")]
    Bounds(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("dimension {dim} exceeds budget {budget}")]
    OverBudget { dim: usize, budget: usize },
    #[error("missing estimate for {0}")]
    Missing(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
