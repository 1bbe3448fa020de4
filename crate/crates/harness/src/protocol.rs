//! Client and server state machines.
//!
//! ```text
//! client                                server
//!   client_hello(ek)          ──▶
//!                             ◀──  server_hello(ct ‖ server mac)
//!   finished(client mac)      ──▶
//! ```
//!
//! th = SHA3-256(client_hello ‖ server_hello without its mac),
//! ts = SHAKE256("pqkex traffic" ‖ K ‖ th),
//! server mac = SHAKE256("pqkex finished" ‖ ts ‖ th),
//! client mac = SHAKE256("pqkex client finished" ‖ ts ‖ th).

use crate::error::{HarnessError, Result};
use crate::ffdh::FfdhKem;
use crate::pool::KeyPool;
use crate::suite::{Suite, FINISHED_LEN};
use crate::wire::{HandshakeMessage, MsgType};
use pqkem::keccak::{sha3_256, shake256};
use pqkem::rng::CryptoRngCore;
use pqkem::{Backend, Error as KemError, KemScheme};
use std::cell::Cell;
use std::fmt;
use subtle::ConstantTimeEq;
use zeroize::{Zeroize, Zeroizing};

const TRAFFIC_LABEL: &[u8] = b"pqkex traffic";
const SERVER_FINISHED_LABEL: &[u8] = b"pqkex finished";
const CLIENT_FINISHED_LABEL: &[u8] = b"pqkex client finished";

thread_local! {
    static DECAPS_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Client decapsulations performed on this thread.
pub fn decaps_calls() -> u64 {
    DECAPS_CALLS.with(Cell::get)
}

/// Keys and transcript digest of one completed handshake.
#[derive(Clone, PartialEq, Eq)]
pub struct SessionSecrets {
    pub shared_secret: [u8; 32],
    pub transcript_hash: [u8; 32],
    pub traffic_secret: [u8; 32],
    pub finished_mac: [u8; 32],
}

impl SessionSecrets {
    fn derive(shared_secret: [u8; 32], transcript_hash: [u8; 32]) -> Self {
        let mut traffic_secret = [0u8; 32];
        shake256(&[TRAFFIC_LABEL, &shared_secret, &transcript_hash], &mut traffic_secret);
        let mut finished_mac = [0u8; 32];
        shake256(&[SERVER_FINISHED_LABEL, &traffic_secret, &transcript_hash], &mut finished_mac);
        SessionSecrets { shared_secret, transcript_hash, traffic_secret, finished_mac }
    }

    pub fn client_finished_mac(&self) -> [u8; 32] {
        let mut out = [0u8; 32];
        shake256(&[CLIENT_FINISHED_LABEL, &self.traffic_secret, &self.transcript_hash], &mut out);
        out
    }
}

impl Drop for SessionSecrets {
    fn drop(&mut self) {
        self.shared_secret.zeroize();
        self.traffic_secret.zeroize();
    }
}

impl fmt::Debug for SessionSecrets {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SessionSecrets")
            .field("transcript_hash", &hex_string(&self.transcript_hash))
            .finish_non_exhaustive()
    }
}

fn hex_string(b: &[u8]) -> String {
    b.iter().map(|x| format!("{x:02x}")).collect()
}

/// What the client keeps between its hello and the server's reply. The
/// decapsulation key is consumed by [`client_complete`] and wiped.
pub struct ClientState {
    suite: Suite,
    backend: Backend,
    dk: Zeroizing<Vec<u8>>,
    client_hello: Vec<u8>,
}

impl ClientState {
    pub fn suite(&self) -> Suite {
        self.suite
    }

    pub fn client_hello(&self) -> &[u8] {
        &self.client_hello
    }
}

impl fmt::Debug for ClientState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClientState").field("suite", &self.suite.to_string()).finish_non_exhaustive()
    }
}

fn expect(msg: &HandshakeMessage, t: MsgType, kem_id: Option<u16>, body_len: Option<usize>) -> Result<()> {
    if msg.msg_type != t {
        return Err(HarnessError::Protocol(format!("expected {t:?}, got {:?}", msg.msg_type)));
    }
    if let Some(id) = kem_id {
        if msg.kem_id != id {
            return Err(HarnessError::Protocol(format!("kem id 0x{:04x} does not match session 0x{id:04x}", msg.kem_id)));
        }
    }
    if let Some(len) = body_len {
        if msg.body.len() != len {
            return Err(HarnessError::Protocol(format!("{t:?} body is {} bytes, expected {len}", msg.body.len())));
        }
    }
    Ok(())
}

fn ephemeral_keypair(
    suite: Suite,
    backend: Backend,
    pool: Option<&mut KeyPool>,
    rng: &mut dyn CryptoRngCore,
) -> Result<(Vec<u8>, Zeroizing<Vec<u8>>)> {
    let Some(pool) = pool else {
        return Ok(suite.scheme(backend).keygen(rng));
    };
    if pool.set() != suite.set || pool.transform() != suite.transform {
        return Err(HarnessError::Config(format!(
            "key pool holds {}/{} keys, suite {suite} needs {}/{}",
            pool.set().name,
            pool.transform(),
            suite.set.name,
            suite.transform
        )));
    }
    let pair = pool.take(rng)?;
    let mut ek = pair.ek.clone();
    let mut dk = Zeroizing::new(pair.dk.to_vec());
    if suite.hybrid {
        let (ek_b, dk_b) = FfdhKem.keygen(rng);
        ek.extend_from_slice(&ek_b);
        dk.extend_from_slice(&dk_b);
    }
    Ok((ek, dk))
}

/// Generates the ephemeral key pair (from `pool` when given) and the
/// client_hello carrying its encapsulation key.
pub fn client_init(
    kem_id: u16,
    backend: Backend,
    pool: Option<&mut KeyPool>,
    rng: &mut dyn CryptoRngCore,
) -> Result<(HandshakeMessage, ClientState)> {
    let suite = Suite::from_id(kem_id)?;
    let (ek, dk) = ephemeral_keypair(suite, backend, pool, rng)?;
    let hello = HandshakeMessage::new(MsgType::ClientHello, kem_id, ek);
    let client_hello = hello.encode();
    Ok((hello, ClientState { suite, backend, dk, client_hello }))
}

fn transcript_hash(client_hello: &[u8], server_hello: &[u8]) -> [u8; 32] {
    sha3_256(&[client_hello, &server_hello[..server_hello.len() - FINISHED_LEN]])
}

/// Encapsulates to the client's key and answers with ct ‖ server mac.
pub fn server_respond(
    msg: &HandshakeMessage,
    backend: Backend,
    rng: &mut dyn CryptoRngCore,
) -> Result<(HandshakeMessage, SessionSecrets)> {
    expect(msg, MsgType::ClientHello, None, None)?;
    let suite = Suite::from_id(msg.kem_id)?;
    expect(msg, MsgType::ClientHello, None, Some(suite.client_hello_len()))?;
    let (ct, k) = suite
        .scheme(backend)
        .encaps(&msg.body, rng)
        .map_err(|e| HarnessError::Protocol(format!("client_hello rejected: {e}")))?;
    let mut body = ct;
    body.extend_from_slice(&[0u8; FINISHED_LEN]);
    let mut reply = HandshakeMessage::new(MsgType::ServerHello, msg.kem_id, body);
    let secrets = SessionSecrets::derive(k, transcript_hash(&msg.encode(), &reply.encode()));
    let n = reply.body.len();
    reply.body[n - FINISHED_LEN..].copy_from_slice(&secrets.finished_mac);
    Ok((reply, secrets))
}

/// Decapsulates exactly once, checks the server's mac and returns the
/// secrets together with the client's finished message.
pub fn client_complete(msg: &HandshakeMessage, state: ClientState) -> Result<(SessionSecrets, HandshakeMessage)> {
    let ClientState { suite, backend, dk, client_hello } = state;
    let kem_id = suite.id();
    expect(msg, MsgType::ServerHello, Some(kem_id), Some(suite.server_hello_len()))?;
    let (ct, mac) = msg.body.split_at(suite.ct_len());
    DECAPS_CALLS.with(|c| c.set(c.get() + 1));
    let decapsulated = suite.scheme(backend).decaps(&dk, ct);
    drop(dk);
    let k = match decapsulated {
        Ok(k) => k,
        Err(KemError::Rejected) => return Err(HarnessError::HandshakeFailure("ciphertext rejected")),
        Err(e) => return Err(HarnessError::Protocol(format!("server_hello rejected: {e}"))),
    };
    let secrets = SessionSecrets::derive(k, transcript_hash(&client_hello, &msg.encode()));
    if !bool::from(secrets.finished_mac.ct_eq(mac)) {
        return Err(HarnessError::HandshakeFailure("server finished mac mismatch"));
    }
    let fin = HandshakeMessage::new(MsgType::Finished, kem_id, secrets.client_finished_mac().to_vec());
    Ok((secrets, fin))
}

/// Checks the client's finished mac against the server's secrets.
pub fn server_finish(msg: &HandshakeMessage, kem_id: u16, secrets: &SessionSecrets) -> Result<()> {
    expect(msg, MsgType::Finished, Some(kem_id), Some(FINISHED_LEN))?;
    if !bool::from(secrets.client_finished_mac().ct_eq(&msg.body)) {
        return Err(HarnessError::HandshakeFailure("client finished mac mismatch"));
    }
    Ok(())
}

/// One full handshake with both sides in this thread.
pub fn run_in_memory(
    kem_id: u16,
    backend: Backend,
    pool: Option<&mut KeyPool>,
    rng: &mut dyn CryptoRngCore,
) -> Result<(SessionSecrets, SessionSecrets)> {
    let (ch, state) = client_init(kem_id, backend, pool, rng)?;
    let ch = HandshakeMessage::decode(&ch.encode())?;
    let (sh, server) = server_respond(&ch, backend, rng)?;
    let sh = HandshakeMessage::decode(&sh.encode())?;
    let (client, fin) = client_complete(&sh, state)?;
    let fin = HandshakeMessage::decode(&fin.encode())?;
    server_finish(&fin, kem_id, &server)?;
    Ok((client, server))
}
