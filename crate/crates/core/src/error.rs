use thiserror::Error;

/// Errors produced by the color-model pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("ill-conditioned fit: condition estimate {condition:.3e} exceeds {limit:.0e}")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("unsupported quantization method: {0}")]
    UnsupportedMethod(String),

    #[error("mismatched dimensions: expected {expected}, found {found}")]
    MismatchedDimensions { expected: String, found: String },

    #[error("malformed model document: {0}")]
    MalformedDocument(String),

    #[error("model document version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
