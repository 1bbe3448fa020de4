use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// A message was malformed or out of place; the connection is closed.
    #[error("protocol error: {0}")]
    Protocol(String),

    /// Key confirmation failed: the two sides did not derive the same secrets.
    #[error("handshake failure: {0}")]
    HandshakeFailure(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown kem id 0x{0:04x}")]
    UnknownKemId(u16),

    #[error("peer sent alert {0}")]
    Alert(u8),

    #[error(transparent)]
    Kem(#[from] pqkem::Error),

    #[error("{addr}: {source}")]
    Io {
        addr: String,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub(crate) fn io(addr: impl std::fmt::Display, source: std::io::Error) -> Self {
        HarnessError::Io {
            addr: addr.to_string(),
            source,
        }
    }
}

pub type Result<T> = core::result::Result<T, HarnessError>;
