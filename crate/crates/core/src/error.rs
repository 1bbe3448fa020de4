use thiserror::Error;

/// Errors produced by the KEM toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A serialized object had the wrong length for its role.
    #[error("malformed {role}: expected {expected} bytes, got {actual}")]
    MalformedInput {
        role: &'static str,
        expected: usize,
        actual: usize,
    },

    /// Explicit rejection from a transform that signals decapsulation failure.
    #[error("ciphertext rejected")]
    Rejected,

    #[error("backend unavailable: {0}")]
    BackendUnavailable(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
