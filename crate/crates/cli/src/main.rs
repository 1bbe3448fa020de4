use clap::{Args, Parser, Subcommand, ValueEnum};
use pqkem::kat::{set_from_path, verify_rsp_file, KatError};
use pqkem::rng::OsRng;
use pqkem::{Backend, Kem, ParameterSet, ParameterSetName, Transform};
use pqkem_cli::{bench_batch, bench_kem, KemTimings, Stat};
use pqkex::bench::{bench_run, BenchConfig, HostInfo, TransportKind};
use pqkex::tcp::{client_handshake, Server};
use pqkex::{HarnessError, KeyPool, Suite};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_ENVIRONMENT: u8 = 3;

#[derive(Parser)]
#[command(name = "pqkem", version, about = "ML-KEM toolkit: KAT verification, benchmarks and a key-exchange harness")]
struct Cli {
    /// Arithmetic backend.
    #[arg(long, global = true, value_enum, default_value_t = BackendArg::Auto)]
    backend: BackendArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Scalar,
    Vector,
    Auto,
}

#[derive(Subcommand)]
enum Command {
    /// Verify `.rsp` known-answer files.
    Kat(KatArgs),
    /// Median keygen/encaps/decaps times per transform.
    Bench(BenchArgs),
    /// One batch keygen of eight against eight single keygens.
    BatchBench(BatchArgs),
    /// Closed-loop handshake benchmark.
    HandshakeBench(HandshakeArgs),
    /// Accept handshakes over TCP.
    Serve(ServeArgs),
    /// Run handshakes against a server.
    Client(ClientArgs),
}

#[derive(Args)]
struct KatArgs {
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    /// Parameter set; inferred from each file name when omitted.
    #[arg(long, value_parser = parse_set)]
    set: Option<ParameterSet>,
    /// Check every file on the scalar and the vector backend.
    #[arg(long, conflicts_with = "backend")]
    all_backends: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_parser = parse_set, default_value = "768")]
    set: ParameterSet,
    #[arg(long, value_parser = parse_transform, num_args = 1.., default_values = ["fo", "tch", "trh"])]
    transform: Vec<Transform>,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(3..))]
    runs: u32,
    /// Operations per run.
    #[arg(long, default_value_t = 200)]
    iters: usize,
    /// Exit 1 unless TRH decapsulation is faster than FO.
    #[arg(long)]
    assert: bool,
}

#[derive(Args)]
struct BatchArgs {
    #[arg(long, value_parser = parse_set, num_args = 1.., default_values = ["512", "768", "1024"])]
    set: Vec<ParameterSet>,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(3..))]
    runs: u32,
    #[arg(long, default_value_t = 50)]
    iters: usize,
    /// One implicit-rejection secret shared by all eight keys of a batch.
    #[arg(long)]
    shared_z: bool,
    /// Exit 1 unless the batch beats eight single keygens.
    #[arg(long)]
    assert: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Pq,
    Hybrid,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Records,
    Both,
}

#[derive(Args)]
struct HandshakeArgs {
    #[arg(long, value_parser = parse_set, num_args = 1.., default_values = ["768"])]
    set: Vec<ParameterSet>,
    #[arg(long, value_parser = parse_transform, num_args = 1.., default_values = ["fo", "tch", "trh"])]
    transform: Vec<Transform>,
    #[arg(long, value_enum, default_value_t = Mode::Both)]
    mode: Mode,
    /// Explicit suites by name or hex id; replaces --set/--transform/--mode.
    #[arg(long, value_parser = parse_suite, num_args = 1.., conflicts_with_all = ["set", "transform", "mode"])]
    suite: Vec<Suite>,
    #[arg(long, value_parser = parse_transport, default_value = "memory")]
    transport: TransportKind,
    /// Seconds per run.
    #[arg(long, default_value_t = 1.0)]
    duration: f64,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(3..))]
    runs: u32,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    connections: u32,
    /// Draw client keys from a pool refilled eight at a time.
    #[arg(long)]
    batch_pool: bool,
    #[arg(long, requires = "batch_pool")]
    shared_z: bool,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,
    /// Exit 1 unless TRH >= FO and hybrid < PQ-only in connections per second.
    #[arg(long)]
    assert: bool,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:4433")]
    listen: String,
}

#[derive(Args)]
struct ClientArgs {
    #[arg(long, default_value = "127.0.0.1:4433")]
    connect: String,
    #[arg(long, value_parser = parse_suite, default_value = "ML-KEM-768/fo")]
    suite: Suite,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long)]
    batch_pool: bool,
    #[arg(long, requires = "batch_pool")]
    shared_z: bool,
}

fn parse_set(s: &str) -> Result<ParameterSet, String> {
    s.parse::<ParameterSetName>().map(ParameterSet::from).map_err(|e| e.to_string())
}

fn parse_transform(s: &str) -> Result<Transform, String> {
    s.parse().map_err(|e: pqkem::Error| e.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: HarnessError| e.to_string())
}

fn parse_transport(s: &str) -> Result<TransportKind, String> {
    s.parse().map_err(|e: HarnessError| e.to_string())
}

enum Failure {
    Verify(String),
    Usage(String),
    Environment(String),
}

type Outcome = Result<(), Failure>;

fn backend(arg: BackendArg) -> Result<Backend, Failure> {
    let b = match arg {
        BackendArg::Scalar => Backend::scalar(),
        BackendArg::Vector => Backend::vector().map_err(|e| Failure::Environment(e.to_string()))?,
        BackendArg::Auto => Backend::detect(),
    };
    Backend::set_default(b);
    Ok(b)
}

fn harness_failure(e: HarnessError) -> Failure {
    match e {
        HarnessError::Io { .. } => Failure::Environment(e.to_string()),
        HarnessError::Config(_) | HarnessError::UnknownKemId(_) => Failure::Usage(e.to_string()),
        _ => Failure::Verify(e.to_string()),
    }
}

fn run_kat(args: &KatArgs, b: BackendArg) -> Outcome {
    let backends = if args.all_backends {
        let mut v = vec![Backend::scalar()];
        v.push(Backend::vector().map_err(|e| Failure::Environment(e.to_string()))?);
        v
    } else {
        vec![backend(b)?]
    };
    let mut failed = false;
    for path in &args.paths {
        let set = args.set.or_else(|| set_from_path(path)).ok_or_else(|| {
            Failure::Usage(format!("{}: cannot infer the parameter set from the name; pass --set", path.display()))
        })?;
        for &be in &backends {
            match verify_rsp_file(set, be, path) {
                Ok(s) => println!(
                    "{}: {} {}: PASS {} records ({} keygen, {} encaps, {} decaps)",
                    path.display(),
                    set.name,
                    be.name(),
                    s.records,
                    s.keygen,
                    s.encaps,
                    s.decaps
                ),
                Err(KatError::Io { path, message }) => return Err(Failure::Usage(format!("{path}: {message}"))),
                Err(e) => {
                    println!("{}: {} {}: FAIL {e}", path.display(), set.name, be.name());
                    failed = true;
                }
            }
        }
    }
    if failed {
        Err(Failure::Verify("known-answer verification failed".into()))
    } else {
        Ok(())
    }
}

fn host_line(b: Backend) -> String {
    let h = HostInfo::collect(b);
    let timer = if pqkem_cli::cycles().is_some() { "ns and TSC cycles" } else { "ns (no cycle counter)" };
    format!("host: {} ({} threads, {}); timer: {timer}", h.cpu, h.threads, h.os)
}

fn fmt_stat(s: &Stat) -> String {
    match s.median_cycles() {
        Some(c) => format!("{:>10.0} ns {:>10.0} cyc", s.median_ns(), c),
        None => format!("{:>10.0} ns", s.median_ns()),
    }
}

fn run_bench(args: &BenchArgs, b: BackendArg) -> Outcome {
    let selected = backend(b)?;
    let mut backends = vec![selected];
    if selected.is_vector() {
        backends.insert(0, Backend::scalar());
    }
    println!("{}", host_line(selected));
    println!("{}: median of {} runs x {} ops", args.set.name, args.runs, args.iters);
    let mut results: Vec<(Backend, Transform, KemTimings)> = Vec::new();
    for &be in &backends {
        for &t in &args.transform {
            let kem = Kem::new(t, args.set).with_backend(be);
            let r = bench_kem(&kem, args.runs as usize, args.iters, 1);
            println!(
                "{:<7} {:<4} keygen {}  encaps {}  decaps {}",
                be.name(),
                t,
                fmt_stat(&r.keygen),
                fmt_stat(&r.encaps),
                fmt_stat(&r.decaps)
            );
            results.push((be, t, r));
        }
    }
    let find = |be: Backend, t: Transform| results.iter().find(|(b, x, _)| *b == be && *x == t).map(|r| &r.2);
    if backends.len() == 2 {
        for &t in &args.transform {
            let (s, v) = (find(backends[0], t).unwrap(), find(backends[1], t).unwrap());
            println!(
                "ratio vector/scalar {:<4} keygen {:.3}  encaps {:.3}  decaps {:.3}",
                t,
                v.keygen.median_ns() / s.keygen.median_ns(),
                v.encaps.median_ns() / s.encaps.median_ns(),
                v.decaps.median_ns() / s.decaps.median_ns()
            );
        }
    }
    let mut slow = false;
    for &be in &backends {
        if let (Some(fo), Some(trh)) = (find(be, Transform::Fo), find(be, Transform::Trh)) {
            let ratio = trh.decaps.median_ns() / fo.decaps.median_ns();
            println!("ratio trh/fo decaps ({}) {:.3} (speedup {:.2}x)", be.name(), ratio, 1.0 / ratio);
            slow |= ratio >= 1.0;
        }
    }
    if args.assert && slow {
        return Err(Failure::Verify("TRH decapsulation is not faster than FO".into()));
    }
    Ok(())
}

fn run_batch_bench(args: &BatchArgs, b: BackendArg) -> Outcome {
    let be = backend(b)?;
    println!("{}", host_line(be));
    println!(
        "backend {}, z {}, median of {} runs x {} batches",
        be.name(),
        if args.shared_z { "shared" } else { "per key" },
        args.runs,
        args.iters
    );
    let mut slow = false;
    for &set in &args.set {
        let kem = Kem::new(Transform::Fo, set).with_backend(be);
        let r = bench_batch(&kem, args.runs as usize, args.iters, args.shared_z, 2).map_err(|e| Failure::Verify(e.to_string()))?;
        println!(
            "{:<12} batch_keygen(8) {}  8 x keygen {}  ratio {:.3} (speedup {:.2}x)",
            set.name.to_string(),
            fmt_stat(&r.batch),
            fmt_stat(&r.single_x8),
            r.ratio(),
            1.0 / r.ratio()
        );
        slow |= r.ratio() >= 1.0;
    }
    if args.assert && slow {
        return Err(Failure::Verify("batch keygen is not faster than eight single keygens".into()));
    }
    Ok(())
}

fn handshake_suites(args: &HandshakeArgs) -> Vec<Suite> {
    if !args.suite.is_empty() {
        return args.suite.clone();
    }
    let modes: &[bool] = match args.mode {
        Mode::Pq => &[false],
        Mode::Hybrid => &[true],
        Mode::Both => &[false, true],
    };
    let mut out = Vec::new();
    for &set in &args.set {
        for &hybrid in modes {
            for &t in &args.transform {
                out.push(Suite::new(set, t, hybrid));
            }
        }
    }
    out
}

fn run_handshake_bench(args: &HandshakeArgs, b: BackendArg) -> Outcome {
    if !(args.duration.is_finite() && args.duration > 0.0) {
        return Err(Failure::Usage(format!("--duration must be positive, got {}", args.duration)));
    }
    let suites = handshake_suites(args);
    let cfg = BenchConfig {
        kem_ids: suites.iter().map(Suite::id).collect(),
        duration: Duration::from_secs_f64(args.duration),
        runs: args.runs as usize,
        connections: args.connections as usize,
        transport: args.transport,
        batch_pool: args.batch_pool,
        shared_z: args.shared_z,
        backend: backend(b)?,
        seed: 0,
    };
    let report = bench_run(&cfg).map_err(harness_failure)?;
    if args.format != Format::Records {
        print!("{}", report.table());
    }
    if args.format != Format::Table {
        print!("{}", report.records());
    }
    let rate = |s: Suite| report.row(s.id()).map(|r| r.conn_per_sec);
    let mut violations = Vec::new();
    for &s in &suites {
        if s.transform == Transform::Trh {
            if let (Some(trh), Some(fo)) = (rate(s), rate(Suite::new(s.set, Transform::Fo, s.hybrid))) {
                println!("ratio trh/fo conn/s ({s}) {:.3}", trh / fo);
                if trh < fo {
                    violations.push(format!("{s}: TRH below FO"));
                }
            }
        }
        if s.hybrid {
            if let (Some(h), Some(pq)) = (rate(s), rate(Suite::new(s.set, s.transform, false))) {
                println!("ratio hybrid/pq conn/s ({s}) {:.3}", h / pq);
                if h >= pq {
                    violations.push(format!("{s}: hybrid not below PQ-only"));
                }
            }
        }
    }
    if report.rows.iter().any(|r| r.failures > 0) {
        return Err(Failure::Verify("some handshakes failed".into()));
    }
    if args.assert && !violations.is_empty() {
        return Err(Failure::Verify(violations.join("; ")));
    }
    Ok(())
}

fn run_serve(args: &ServeArgs, b: BackendArg) -> Outcome {
    let be = backend(b)?;
    let server = Server::bind(args.listen.as_str(), be).map_err(harness_failure)?;
    eprintln!("listening on {} ({} backend)", server.local_addr(), be.name());
    server.run().map_err(harness_failure)
}

fn run_client(args: &ClientArgs, b: BackendArg) -> Outcome {
    let be = backend(b)?;
    let addr = std::net::ToSocketAddrs::to_socket_addrs(&args.connect)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.connect)))?
        .next()
        .ok_or_else(|| Failure::Usage(format!("{}: no address", args.connect)))?;
    let mut pool = args.batch_pool.then(|| KeyPool::new(args.suite.set, args.suite.transform, be, args.shared_z));
    for i in 0..args.count {
        let (secrets, t) = client_handshake(addr, args.suite.id(), be, pool.as_mut(), &mut OsRng).map_err(harness_failure)?;
        let th: String = secrets.transcript_hash.iter().map(|b| format!("{b:02x}")).collect();
        println!("{i}: {} ok transcript {th} in {} us", args.suite, t.total.as_micros());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Kat(a) => run_kat(a, cli.backend),
        Command::Bench(a) => run_bench(a, cli.backend),
        Command::BatchBench(a) => run_batch_bench(a, cli.backend),
        Command::HandshakeBench(a) => run_handshake_bench(a, cli.backend),
        Command::Serve(a) => run_serve(a, cli.backend),
        Command::Client(a) => run_client(a, cli.backend),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_FAILURE)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Environment(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_ENVIRONMENT)
        }
    }
}
