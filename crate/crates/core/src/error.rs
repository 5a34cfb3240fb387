use thiserror::Error;

/// Errors raised by profile validation, fitting and file handling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no peak candidates detected in profile '{0}'")]
    NoPeaks(String),

    #[error("non-finite objective or gradient at {point:?}")]
    NonFinite { point: Vec<f64> },

    #[error("all {0} optimizer starts failed with non-finite loss")]
    AllStartsFailed(usize),

    #[error("series length mismatch: observed {observed}, predicted {predicted}")]
    LengthMismatch { observed: usize, predicted: usize },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("{0}")]
    Format(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
