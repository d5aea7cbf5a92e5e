use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] mcplan_core::Error),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("invalid experiment spec: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, CliError>;
