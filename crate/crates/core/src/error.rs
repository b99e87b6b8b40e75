use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse grouping used for CLI exit codes and FFI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Argument,
    Simulation,
    Compressor,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration width mismatch: system has {expected} cells, got {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("enumeration exhausted: {requested} inputs requested but only 2^{width} configurations exist")]
    ExhaustedEnumeration { width: usize, requested: usize },

    #[error("operation not supported for this system: {0}")]
    Unsupported(String),

    #[error("black-box system failed: {0}")]
    BlackBox(String),

    #[error("compressor integrity: {0}")]
    CompressorIntegrity(String),

    #[error("decode error: {0}")]
    Decode(String),

    #[error("degenerate regression: all runtimes are equal")]
    DegenerateRegression,

    #[error("incomparable cohort: {0}")]
    IncomparableCohort(String),

    #[error("corrupted record: stored hash {stored}, computed {computed}")]
    CorruptedRecord { stored: String, computed: String },

    #[error("unsupported record schema version {found} (this build reads up to {supported})")]
    SchemaVersion { found: u32, supported: u32 },

    #[error("malformed record: {0}")]
    MalformedRecord(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidArgument(_)
            | Error::ExhaustedEnumeration { .. }
            | Error::DegenerateRegression
            | Error::IncomparableCohort(_) => ErrorCategory::Argument,
            Error::WidthMismatch { .. } | Error::Unsupported(_) | Error::BlackBox(_) => {
                ErrorCategory::Simulation
            }
            Error::CompressorIntegrity(_) | Error::Decode(_) => ErrorCategory::Compressor,
            Error::CorruptedRecord { .. }
            | Error::SchemaVersion { .. }
            | Error::MalformedRecord(_)
            | Error::Io(_)
            | Error::Json(_) => ErrorCategory::Io,
        }
    }
}
