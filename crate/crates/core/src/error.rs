use std::path::PathBuf;

/// Errors produced anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("tape does not belong to the current network parameters")]
    StaleTape,

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("training diverged during {phase} at {step}: {loss} is non-finite")]
    Diverged {
        phase: &'static str,
        step: String,
        loss: &'static str,
    },

    #[error("{path}: file not found")]
    FileNotFound { path: PathBuf },

    #[error("{path}, line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
