use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite sample {value} on trigger channel `{channel}`")]
    NonFiniteSample { channel: String, value: f64 },

    #[error("target rate {0} is outside (0, 1]")]
    InvalidRate(f64),

    #[error("trigger channel `{0}` is already registered")]
    DuplicateChannel(String),

    #[error("expected {expected} trigger samples, got {actual}")]
    SampleCount { expected: usize, actual: usize },

    #[error("{what} index {index} out of range (size {size})")]
    IndexOutOfRange { what: &'static str, index: usize, size: usize },

    #[error("episode is over; reset the environment before stepping")]
    EpisodeOver,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid config:\n  - {}", .0.join("\n  - "))]
    InvalidConfig(Vec<String>),

    #[error("failed to parse config: {0}")]
    ConfigParse(String),

    #[error("series length mismatch: series 0 has {expected} bins, series {index} has {actual}")]
    SeriesLengthMismatch { expected: usize, index: usize, actual: usize },

    #[error("no series to aggregate")]
    EmptyAggregate,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for errors caused by bad user input rather than a failure while running.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_) | Error::ConfigParse(_) | Error::InvalidParameter(_) | Error::InvalidRate(_)
        )
    }
}
