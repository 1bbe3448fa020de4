//! Plain TCP transport: one handshake per connection, a thread per
//! accepted connection, and the server closes once the client's finished
//! message has been checked.

use crate::error::{HarnessError, Result};
use crate::pool::KeyPool;
use crate::protocol::{client_complete, client_init, server_finish, server_respond, SessionSecrets};
use crate::wire::{parse_header, HandshakeMessage, MsgType, HEADER_LEN};
use pqkem::rng::{CryptoRngCore, OsRng};
use pqkem::Backend;
use std::collections::HashMap;
use std::io::{Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

pub const ALERT_PROTOCOL: u8 = 1;
pub const ALERT_HANDSHAKE_FAILURE: u8 = 2;
pub const ALERT_UNKNOWN_KEM: u8 = 3;

const IO_TIMEOUT: Duration = Duration::from_secs(10);

fn alert_code(e: &HarnessError) -> u8 {
    match e {
        HarnessError::HandshakeFailure(_) => ALERT_HANDSHAKE_FAILURE,
        HarnessError::UnknownKemId(_) => ALERT_UNKNOWN_KEM,
        _ => ALERT_PROTOCOL,
    }
}

/// Reads one framed message. An alert from the peer becomes
/// [`HarnessError::Alert`].
pub fn read_message(stream: &mut TcpStream, peer: SocketAddr) -> Result<HandshakeMessage> {
    let mut header = [0u8; HEADER_LEN];
    stream.read_exact(&mut header).map_err(|e| HarnessError::io(peer, e))?;
    let (msg_type, kem_id, len) = parse_header(&header)?;
    let mut body = vec![0u8; len];
    stream.read_exact(&mut body).map_err(|e| HarnessError::io(peer, e))?;
    if msg_type == MsgType::Alert {
        return Err(HarnessError::Alert(body.first().copied().unwrap_or(0)));
    }
    Ok(HandshakeMessage { msg_type, kem_id, body })
}

pub fn write_message(stream: &mut TcpStream, peer: SocketAddr, msg: &HandshakeMessage) -> Result<()> {
    stream.write_all(&msg.encode()).map_err(|e| HarnessError::io(peer, e))
}

fn send_alert(stream: &mut TcpStream, peer: SocketAddr, kem_id: u16, e: &HarnessError) {
    let alert = HandshakeMessage::new(MsgType::Alert, kem_id, vec![alert_code(e)]);
    let _ = write_message(stream, peer, &alert);
}

/// Counters shared by every connection a server handles.
#[derive(Debug, Default)]
pub struct ServerStats {
    pub completed: AtomicU64,
    pub failed: AtomicU64,
    /// Total time spent in `server_respond`, in nanoseconds.
    pub respond_ns: AtomicU64,
}

type SecretLog = Arc<Mutex<HashMap<[u8; 32], [u8; 32]>>>;

pub struct Server {
    listener: TcpListener,
    addr: SocketAddr,
    backend: Backend,
    log: Option<SecretLog>,
}

impl Server {
    pub fn bind(addr: impl ToSocketAddrs + std::fmt::Display, backend: Backend) -> Result<Server> {
        let shown = addr.to_string();
        let listener = TcpListener::bind(addr).map_err(|e| HarnessError::io(format!("bind {shown}"), e))?;
        let addr = listener.local_addr().map_err(|e| HarnessError::io(&shown, e))?;
        Ok(Server { listener, addr, backend, log: None })
    }

    /// Keeps transcript hash → traffic secret for every completed handshake
    /// so tests can compare both sides.
    pub fn record_secrets(mut self) -> Self {
        self.log = Some(Arc::default());
        self
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// Runs the accept loop on a background thread.
    pub fn spawn(self) -> ServerHandle {
        let stats = Arc::new(ServerStats::default());
        let stop = Arc::new(AtomicBool::new(false));
        let (addr, log) = (self.addr, self.log.clone());
        let thread = {
            let (stats, stop) = (stats.clone(), stop.clone());
            std::thread::spawn(move || self.accept_loop(&stats, &stop))
        };
        ServerHandle { addr, stats, stop, log, thread: Some(thread) }
    }

    /// Serves connections on the current thread until the process exits.
    pub fn run(self) -> Result<()> {
        let stats = ServerStats::default();
        self.accept_loop(&Arc::new(stats), &Arc::new(AtomicBool::new(false)));
        Ok(())
    }

    fn accept_loop(self, stats: &Arc<ServerStats>, stop: &Arc<AtomicBool>) {
        let mut workers = Vec::new();
        for conn in self.listener.incoming() {
            if stop.load(Ordering::Acquire) {
                break;
            }
            let Ok(stream) = conn else { continue };
            let (stats, backend, log) = (stats.clone(), self.backend, self.log.clone());
            workers.push(std::thread::spawn(move || {
                if serve_connection(stream, backend, &mut OsRng, &stats, log.as_ref()).is_err() {
                    stats.failed.fetch_add(1, Ordering::AcqRel);
                }
            }));
            workers.retain(|w| !w.is_finished());
        }
        for w in workers {
            let _ = w.join();
        }
    }
}

fn serve_connection(
    mut stream: TcpStream,
    backend: Backend,
    rng: &mut dyn CryptoRngCore,
    stats: &ServerStats,
    log: Option<&SecretLog>,
) -> Result<()> {
    let peer = stream.peer_addr().map_err(|e| HarnessError::io("accepted connection", e))?;
    stream.set_nodelay(true).map_err(|e| HarnessError::io(peer, e))?;
    stream.set_read_timeout(Some(IO_TIMEOUT)).map_err(|e| HarnessError::io(peer, e))?;
    let mut kem_id = 0;
    let result = (|| {
        let hello = read_message(&mut stream, peer)?;
        kem_id = hello.kem_id;
        let start = Instant::now();
        let (reply, secrets) = server_respond(&hello, backend, rng)?;
        stats.respond_ns.fetch_add(start.elapsed().as_nanos() as u64, Ordering::Relaxed);
        write_message(&mut stream, peer, &reply)?;
        let fin = read_message(&mut stream, peer)?;
        server_finish(&fin, kem_id, &secrets)?;
        stats.completed.fetch_add(1, Ordering::AcqRel);
        if let Some(log) = log {
            log.lock().expect("secret log").insert(secrets.transcript_hash, secrets.traffic_secret);
        }
        Ok(())
    })();
    if let Err(e) = &result {
        if !matches!(e, HarnessError::Io { .. } | HarnessError::Alert(_)) {
            send_alert(&mut stream, peer, kem_id, e);
        }
    }
    result
}

pub struct ServerHandle {
    addr: SocketAddr,
    stats: Arc<ServerStats>,
    stop: Arc<AtomicBool>,
    log: Option<SecretLog>,
    thread: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn stats(&self) -> &ServerStats {
        &self.stats
    }

    /// Traffic secret the server derived for a transcript, if recorded.
    pub fn traffic_secret(&self, transcript_hash: &[u8; 32]) -> Option<[u8; 32]> {
        self.log.as_ref()?.lock().expect("secret log").get(transcript_hash).copied()
    }

    /// Stops accepting and waits for in-flight connections to finish.
    pub fn shutdown(mut self) {
        self.stop_and_join();
    }

    fn stop_and_join(&mut self) {
        self.stop.store(true, Ordering::Release);
        let _ = TcpStream::connect(self.addr);
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop_and_join();
    }
}

/// Client-side wall-clock split of one TCP handshake.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClientTimings {
    pub keygen: Duration,
    pub decaps: Duration,
    pub total: Duration,
}

/// Connects, runs one handshake and returns the client's secrets.
pub fn client_handshake(
    addr: SocketAddr,
    kem_id: u16,
    backend: Backend,
    pool: Option<&mut KeyPool>,
    rng: &mut dyn CryptoRngCore,
) -> Result<(SessionSecrets, ClientTimings)> {
    let start = Instant::now();
    let (hello, state) = client_init(kem_id, backend, pool, rng)?;
    let keygen = start.elapsed();
    let mut stream = TcpStream::connect(addr).map_err(|e| HarnessError::io(format!("connect {addr}"), e))?;
    stream.set_nodelay(true).map_err(|e| HarnessError::io(addr, e))?;
    stream.set_read_timeout(Some(IO_TIMEOUT)).map_err(|e| HarnessError::io(addr, e))?;
    write_message(&mut stream, addr, &hello)?;
    let reply = read_message(&mut stream, addr)?;
    let t = Instant::now();
    let completed = client_complete(&reply, state);
    let decaps = t.elapsed();
    let (secrets, fin) = match completed {
        Ok(v) => v,
        Err(e) => {
            send_alert(&mut stream, addr, kem_id, &e);
            return Err(e);
        }
    };
    write_message(&mut stream, addr, &fin)?;
    // The server closes after checking finished; an alert means it refused.
    let mut tail = [0u8; HEADER_LEN];
    match stream.read_exact(&mut tail) {
        Ok(()) => {
            let mut code = [0u8; 1];
            let _ = stream.read_exact(&mut code);
            return Err(HarnessError::Alert(code[0]));
        }
        Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => {}
        Err(e) => return Err(HarnessError::io(addr, e)),
    }
    Ok((secrets, ClientTimings { keygen, decaps, total: start.elapsed() }))
}
