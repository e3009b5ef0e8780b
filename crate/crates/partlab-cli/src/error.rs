use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Schema or semantic violation; `path` is a JSON pointer into the config.
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },
    #[error(transparent)]
    Lab(#[from] partlab::Error),
    #[error(transparent)]
    Core(#[from] partlab_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn config_err<T>(path: &str, message: impl Into<String>) -> Result<T> {
    Err(CliError::Config { path: path.to_string(), message: message.into() })
}
