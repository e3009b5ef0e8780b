use thiserror::Error;

/// Errors of the numerical layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] partlab_core::Error),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    Budget { what: String, needed: u128, budget: u128 },
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("malformed matrix data: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
