//! A minimal ephemeral key exchange over the `pqkem` KEMs: one KEM
//! round trip, a transcript hash, traffic-secret derivation and finished
//! MACs in both directions, over an in-memory channel or TCP. The
//! [`bench`] module drives it in a closed loop and reports
//! handshakes per second.

pub mod bench;
pub mod error;
pub mod ffdh;
pub mod pool;
pub mod protocol;
pub mod suite;
pub mod tcp;
pub mod wire;

pub use error::{HarnessError, Result};
pub use pool::KeyPool;
pub use protocol::{client_complete, client_init, run_in_memory, server_finish, server_respond, ClientState, SessionSecrets};
pub use suite::Suite;
pub use wire::{HandshakeMessage, MsgType};
