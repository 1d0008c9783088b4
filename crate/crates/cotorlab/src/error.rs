//! Crate-wide error type.
//!
//! Errors split into two families: *validation* errors (bad user input,
//! mismatched shapes, inputs that fail a structural precondition) and
//! *internal* errors (an invariant the library itself is responsible for
//! turned out false, e.g. a differential failing to square to zero). The
//! CLI maps the first family to exit code 2 and the second to exit code 3.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter is outside its documented range or otherwise malformed.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Matrix or graded-object shapes do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Two values from incompatible coefficient contexts were combined.
    #[error("context mismatch: {0}")]
    ContextMismatch(String),

    /// A structural check certifying formal-curve input failed.
    #[error("not a formal curve: {0}")]
    NotACurve(String),

    /// An invariant the library guarantees was violated. Always a bug or a
    /// precision-analysis failure, never a user error.
    #[error("internal invariant violation: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors that indicate a library bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
