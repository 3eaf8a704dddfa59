use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Step size outside the admissible range `(0, 2 / L)`.
    #[error("step size {gamma} outside (0, {upper}); Lipschitz constant L = {lipschitz}")]
    StepSizeOutOfRange {
        gamma: f64,
        upper: f64,
        lipschitz: f64,
    },

    /// Malformed image file; `field` names the offending header field.
    #[error("invalid image file: {field}: {message}")]
    ImageFormat {
        field: &'static str,
        message: String,
    },

    /// Malformed input text (image headers, toy-instance specs).
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
