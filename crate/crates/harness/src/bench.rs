//! Closed-loop handshake benchmark.

use crate::error::{HarnessError, Result};
use crate::pool::KeyPool;
use crate::protocol::{client_complete, client_init, server_finish, server_respond};
use crate::suite::Suite;
use crate::tcp::{client_handshake, Server};
use crate::wire::HandshakeMessage;
use pqkem::rng::CounterRng;
use pqkem::Backend;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::atomic::Ordering;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportKind {
    InMemory,
    Tcp,
}

impl TransportKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TransportKind::InMemory => "memory",
            TransportKind::Tcp => "tcp",
        }
    }
}

impl fmt::Display for TransportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TransportKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "memory" | "mem" | "in-memory" => Ok(TransportKind::InMemory),
            "tcp" => Ok(TransportKind::Tcp),
            other => Err(HarnessError::Config(format!("unknown transport `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub kem_ids: Vec<u16>,
    pub duration: Duration,
    pub runs: usize,
    pub connections: usize,
    pub transport: TransportKind,
    pub batch_pool: bool,
    pub shared_z: bool,
    pub backend: Backend,
    /// Seeds the per-client deterministic RNGs.
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            kem_ids: Vec::new(),
            duration: Duration::from_secs(1),
            runs: 3,
            connections: 1,
            transport: TransportKind::InMemory,
            batch_pool: false,
            shared_z: false,
            backend: Backend::current(),
            seed: 0,
        }
    }
}

impl BenchConfig {
    fn validate(&self) -> Result<Vec<Suite>> {
        if self.kem_ids.is_empty() {
            return Err(HarnessError::Config("no kem ids to benchmark".into()));
        }
        if self.runs < 3 {
            return Err(HarnessError::Config(format!("need at least 3 runs, got {}", self.runs)));
        }
        if self.connections == 0 {
            return Err(HarnessError::Config("need at least one connection".into()));
        }
        if self.duration.is_zero() {
            return Err(HarnessError::Config("duration must be positive".into()));
        }
        self.kem_ids.iter().map(|&id| Suite::from_id(id)).collect()
    }
}

/// Mean time per handshake in each phase, in microseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Phases {
    pub keygen_us: f64,
    pub encaps_us: f64,
    pub decaps_us: f64,
    pub transport_us: f64,
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub suite: Suite,
    pub transport: TransportKind,
    /// Connections per second of each run, in run order.
    pub run_rates: Vec<f64>,
    pub conn_per_sec: f64,
    pub mean_conn_per_sec: f64,
    pub handshakes: u64,
    pub failures: u64,
    pub p50_us: f64,
    pub p99_us: f64,
    pub phases: Phases,
}

#[derive(Debug, Clone)]
pub struct HostInfo {
    pub cpu: String,
    pub threads: usize,
    pub backend: &'static str,
    pub os: &'static str,
}

impl HostInfo {
    pub fn collect(backend: Backend) -> Self {
        let cpu = std::fs::read_to_string("/proc/cpuinfo")
            .ok()
            .and_then(|s| {
                s.lines()
                    .find(|l| l.starts_with("model name"))
                    .and_then(|l| l.split(':').nth(1))
                    .map(|m| m.trim().to_string())
            })
            .unwrap_or_else(|| "unknown".into());
        HostInfo {
            cpu,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            backend: backend.name(),
            os: std::env::consts::OS,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub host: HostInfo,
    pub duration: Duration,
    pub runs: usize,
    pub connections: usize,
    pub batch_pool: bool,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, kem_id: u16) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.suite.id() == kem_id)
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "host: {} ({} threads, {} backend, {})",
            self.host.cpu, self.host.threads, self.host.backend, self.host.os
        );
        let _ = writeln!(
            s,
            "{} runs x {:.1}s, {} connection(s), batch pool {}",
            self.runs,
            self.duration.as_secs_f64(),
            self.connections,
            if self.batch_pool { "on" } else { "off" }
        );
        let _ = writeln!(
            s,
            "{:<26} {:>6} {:>7} {:>10} {:>9} {:>9} {:>8} {:>8} {:>8} {:>8}",
            "suite", "id", "transp", "conn/s", "p50 us", "p99 us", "keygen", "encaps", "decaps", "transp"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<26} 0x{:04x} {:>7} {:>10.1} {:>9.1} {:>9.1} {:>8.1} {:>8.1} {:>8.1} {:>8.1}",
                r.suite.to_string(),
                r.suite.id(),
                r.transport.as_str(),
                r.conn_per_sec,
                r.p50_us,
                r.p99_us,
                r.phases.keygen_us,
                r.phases.encaps_us,
                r.phases.decaps_us,
                r.phases.transport_us
            );
        }
        s
    }

    /// One `key=value` line per row.
    pub fn records(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            let runs: Vec<String> = r.run_rates.iter().map(|x| format!("{x:.2}")).collect();
            let _ = writeln!(
                s,
                "kem_id=0x{:04x} suite={} transform={} hybrid={} transport={} conn_per_sec={:.2} p50_us={:.1} p99_us={:.1} handshakes={} failures={} runs={} backend={} batch_pool={}",
                r.suite.id(),
                r.suite,
                r.suite.transform,
                r.suite.hybrid,
                r.transport,
                r.conn_per_sec,
                r.p50_us,
                r.p99_us,
                r.handshakes,
                r.failures,
                runs.join(","),
                self.host.backend,
                self.batch_pool
            );
        }
        s
    }
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Nearest-rank percentile of sorted samples.
fn percentile(sorted: &[u64], p: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

#[derive(Default)]
struct Tally {
    handshakes: u64,
    failures: u64,
    latencies_ns: Vec<u64>,
    keygen: Duration,
    encaps: Duration,
    decaps: Duration,
    transport: Duration,
}

impl Tally {
    fn merge(&mut self, o: Tally) {
        self.handshakes += o.handshakes;
        self.failures += o.failures;
        self.latencies_ns.extend(o.latencies_ns);
        self.keygen += o.keygen;
        self.encaps += o.encaps;
        self.decaps += o.decaps;
        self.transport += o.transport;
    }
}

fn memory_loop(suite: Suite, cfg: &BenchConfig, rng: &mut CounterRng, deadline: Instant) -> Result<Tally> {
    let mut pool = cfg.batch_pool.then(|| KeyPool::new(suite.set, suite.transform, cfg.backend, cfg.shared_z));
    let mut t = Tally::default();
    let id = suite.id();
    while Instant::now() < deadline {
        let t0 = Instant::now();
        let (ch, state) = client_init(id, cfg.backend, pool.as_mut(), rng)?;
        let t1 = Instant::now();
        let ch = HandshakeMessage::decode(&ch.encode())?;
        let t2 = Instant::now();
        let (sh, server) = server_respond(&ch, cfg.backend, rng)?;
        let t3 = Instant::now();
        let sh = HandshakeMessage::decode(&sh.encode())?;
        let t4 = Instant::now();
        let done = client_complete(&sh, state).and_then(|(client, fin)| {
            let t5 = Instant::now();
            let fin = HandshakeMessage::decode(&fin.encode())?;
            let t6 = Instant::now();
            server_finish(&fin, id, &server)?;
            Ok((client, t5, t6))
        });
        let t7 = Instant::now();
        match done {
            Ok((client, t5, t6)) if client.traffic_secret == server.traffic_secret => {
                t.handshakes += 1;
                t.latencies_ns.push((t7 - t0).as_nanos() as u64);
                t.keygen += t1 - t0;
                t.encaps += t3 - t2;
                t.decaps += (t5 - t4) + (t7 - t6);
                t.transport += (t2 - t1) + (t4 - t3) + (t6 - t5);
            }
            _ => t.failures += 1,
        }
    }
    Ok(t)
}

fn tcp_loop(suite: Suite, cfg: &BenchConfig, addr: std::net::SocketAddr, rng: &mut CounterRng, deadline: Instant) -> Result<Tally> {
    let mut pool = cfg.batch_pool.then(|| KeyPool::new(suite.set, suite.transform, cfg.backend, cfg.shared_z));
    let mut t = Tally::default();
    while Instant::now() < deadline {
        match client_handshake(addr, suite.id(), cfg.backend, pool.as_mut(), rng) {
            Ok((_, timings)) => {
                t.handshakes += 1;
                t.latencies_ns.push(timings.total.as_nanos() as u64);
                t.keygen += timings.keygen;
                t.decaps += timings.decaps;
                t.transport += timings.total - timings.keygen - timings.decaps;
            }
            Err(e @ HarnessError::Io { .. }) if t.handshakes == 0 => return Err(e),
            Err(_) => t.failures += 1,
        }
    }
    Ok(t)
}

fn one_run(suite: Suite, cfg: &BenchConfig, run: usize) -> Result<(f64, Tally)> {
    let server = match cfg.transport {
        TransportKind::Tcp => Some(Server::bind("127.0.0.1:0", cfg.backend)?.spawn()),
        TransportKind::InMemory => None,
    };
    let deadline = Instant::now() + cfg.duration;
    let start = Instant::now();
    let results: Vec<Result<Tally>> = std::thread::scope(|scope| {
        let workers: Vec<_> = (0..cfg.connections)
            .map(|c| {
                let seed = cfg.seed ^ ((suite.id() as u64) << 32) ^ ((run as u64) << 16) ^ c as u64;
                let server = server.as_ref();
                scope.spawn(move || {
                    let mut rng = CounterRng::from_u64(seed);
                    match server {
                        Some(s) => tcp_loop(suite, cfg, s.addr(), &mut rng, deadline),
                        None => memory_loop(suite, cfg, &mut rng, deadline),
                    }
                })
            })
            .collect();
        workers.into_iter().map(|w| w.join().expect("bench worker panicked")).collect()
    });
    let elapsed = start.elapsed();
    let mut tally = Tally::default();
    for r in results {
        tally.merge(r?);
    }
    if let Some(server) = server {
        // Server-side encapsulation time is only known in aggregate.
        let respond = Duration::from_nanos(server.stats().respond_ns.load(Ordering::Relaxed));
        tally.encaps += respond;
        tally.transport = tally.transport.saturating_sub(respond);
        server.shutdown();
    }
    Ok((tally.handshakes as f64 / elapsed.as_secs_f64(), tally))
}

/// Runs every configured suite for `runs` rounds. Rounds are interleaved
/// across suites so slow drift in clock speed affects all of them alike.
pub fn bench_run(cfg: &BenchConfig) -> Result<BenchReport> {
    let suites = cfg.validate()?;
    let mut rates = vec![Vec::with_capacity(cfg.runs); suites.len()];
    let mut tallies: Vec<Tally> = suites.iter().map(|_| Tally::default()).collect();
    for run in 0..cfg.runs {
        for (i, &suite) in suites.iter().enumerate() {
            let (rate, tally) = one_run(suite, cfg, run)?;
            rates[i].push(rate);
            tallies[i].merge(tally);
        }
    }
    let rows = suites
        .into_iter()
        .zip(rates)
        .zip(tallies)
        .map(|((suite, run_rates), mut t)| {
            t.latencies_ns.sort_unstable();
            let n = t.handshakes.max(1) as f64;
            let per = |d: Duration| d.as_secs_f64() * 1e6 / n;
            BenchRow {
                suite,
                transport: cfg.transport,
                conn_per_sec: median(&run_rates),
                mean_conn_per_sec: run_rates.iter().sum::<f64>() / run_rates.len() as f64,
                run_rates,
                handshakes: t.handshakes,
                failures: t.failures,
                p50_us: percentile(&t.latencies_ns, 50.0) as f64 / 1e3,
                p99_us: percentile(&t.latencies_ns, 99.0) as f64 / 1e3,
                phases: Phases {
                    keygen_us: per(t.keygen),
                    encaps_us: per(t.encaps),
                    decaps_us: per(t.decaps),
                    transport_us: per(t.transport),
                },
            }
        })
        .collect();
    Ok(BenchReport {
        host: HostInfo::collect(cfg.backend),
        duration: cfg.duration,
        runs: cfg.runs,
        connections: cfg.connections,
        batch_pool: cfg.batch_pool,
        rows,
    })
}
