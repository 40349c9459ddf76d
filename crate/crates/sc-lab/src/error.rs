use thiserror::Error;

/// Error type shared by every module of the crate.
///
/// `Domain` means an argument is outside the mathematical domain of the
/// operation (e.g. evaluating a weight at index 0). `Contract` means a
/// documented precondition between otherwise valid values was violated
/// (e.g. mixing vectors built over different weight functions, or shifting
/// a grid function by a step that is not grid aligned).
#[derive(Debug, Error)]
pub enum ScError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, ScError>;
