use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn pqkem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pqkem")).args(args).output().expect("spawn pqkem")
}

fn kat_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/kat")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pqkem-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited by signal")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn kat_passes_on_shipped_files() {
    let files: Vec<PathBuf> = ["ml-kem-512.rsp", "ml-kem-768.rsp", "ml-kem-1024.rsp"].iter().map(|f| kat_dir().join(f)).collect();
    let mut args = vec!["kat"];
    args.extend(files.iter().map(|p| s(p)));
    let o = pqkem(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = String::from_utf8_lossy(&o.stdout);
    assert_eq!(out.matches("PASS").count(), 3, "{out}");
}

#[test]
fn kat_reports_a_corrupted_shared_secret() {
    let text = std::fs::read_to_string(kat_dir().join("ml-kem-768.rsp")).unwrap();
    let pos = text.find("ss = ").unwrap() + 5;
    let mut bytes = text.into_bytes();
    bytes[pos] = if bytes[pos] == b'0' { b'1' } else { b'0' };
    let path = scratch("ml-kem-768.rsp", std::str::from_utf8(&bytes).unwrap());
    let o = pqkem(&["--backend", "scalar", "kat", s(&path)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn kat_rejects_an_empty_file() {
    let path = scratch("empty.rsp", "");
    let o = pqkem(&["kat", "--set", "512", s(&path)]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn kat_missing_file_or_unknown_set_is_a_usage_error() {
    assert_eq!(code(&pqkem(&["kat", "/nonexistent/ml-kem-512.rsp"])), 2);
    let path = scratch("vectors.rsp", "count = 0\n");
    assert_eq!(code(&pqkem(&["kat", s(&path)])), 2);
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(code(&pqkem(&[])), 2);
    assert_eq!(code(&pqkem(&["bench", "--set", "640"])), 2);
    assert_eq!(code(&pqkem(&["bench", "--runs", "2"])), 2);
    assert_eq!(code(&pqkem(&["handshake-bench", "--transport", "udp"])), 2);
    assert_eq!(code(&pqkem(&["handshake-bench", "--shared-z"])), 2);
    assert_eq!(code(&pqkem(&["client", "--shared-z"])), 2);
    assert_eq!(code(&pqkem(&["handshake-bench", "--suite", "0x0140"])), 2);
    assert_eq!(code(&pqkem(&["handshake-bench", "--duration", "0"])), 2);
}

#[test]
fn handshake_bench_prints_records() {
    let o = pqkem(&[
        "handshake-bench",
        "--suite",
        "ML-KEM-512/trh",
        "0x0110",
        "--duration",
        "0.05",
        "--format",
        "records",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("kem_id=0x0112"), "{out}");
    assert!(out.contains("kem_id=0x0110"), "{out}");
    assert!(out.contains("failures=0"), "{out}");
}

#[test]
fn client_against_unreachable_server_is_an_environment_error() {
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let addr = format!("127.0.0.1:{port}");
    let o = pqkem(&["client", "--connect", &addr]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains(&addr));
}
