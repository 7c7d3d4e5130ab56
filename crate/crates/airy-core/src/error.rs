//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong when building or evaluating a structure.
///
/// Validation *failures* (a structure whose tensors do not satisfy the
/// required identities) are not errors: they are reported through
/// [`crate::relations::RelationReport`] so that callers can inspect every
/// violated family.  `AiryError` is reserved for malformed input, unusable
/// requests and internal limits.
#[derive(Debug, Error)]
pub enum AiryError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexRange { index: usize, dim: usize },

    #[error("expected {expected} indices, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("scalars belong to different coefficient fields")]
    FieldMismatch,

    #[error("division by zero")]
    DivisionByZero,

    #[error("complexity budget exceeded: 2g-2+n = {cost} > {limit} (raise the budget to allow this)")]
    Budget { cost: i64, limit: i64 },

    #[error("{0}")]
    Unsupported(String),

    #[error("inconsistent duplicate entry for {tensor}[{key}]: {a} vs {b}")]
    DuplicateEntry {
        tensor: &'static str,
        key: String,
        a: String,
        b: String,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, AiryError>;
