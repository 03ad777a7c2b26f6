use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use worldsync_core::diff::detect_desync;
use worldsync_core::runlog::RunLog;
use worldsync_core::sim::{self, SimConfig};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.toml"))
}

fn worldsync(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_worldsync")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn simulate(name: &str, dir: &Path) -> PathBuf {
    let out = dir.join(format!("{name}.jsonl"));
    let o = worldsync(&["simulate", "--config", scenario(name).to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn bad_flags_print_usage() {
    let o = worldsync(&["detect", "--bogus"]);
    assert_eq!(o.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(worldsync(&[]).status.code(), Some(64));
    assert_eq!(worldsync(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_input_is_66() {
    assert_eq!(worldsync(&["detect", "--log", "/nonexistent/run.jsonl"]).status.code(), Some(66));
    let o = worldsync(&["simulate", "--config", "/nonexistent.toml", "--out", "/tmp/never.jsonl"]);
    assert_eq!(o.status.code(), Some(66));
}

#[test]
fn malformed_log_is_65() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.jsonl");
    std::fs::write(&path, "not json\n").unwrap();
    let o = worldsync(&["report", "--log", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(65));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn simulate_matches_in_process_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = simulate("isolated", dir.path());
    let cfg = SimConfig::load(&scenario("isolated")).unwrap();
    let expected = RunLog::new(cfg.clone(), sim::run(cfg).unwrap()).to_bytes();
    assert_eq!(std::fs::read(&path).unwrap(), expected);
}

#[test]
fn detect_exit_codes_and_sets() {
    let dir = tempfile::tempdir().unwrap();
    let o = worldsync(&["detect", "--log", simulate("allsync", dir.path()).to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("in sync"));

    let o = worldsync(&["detect", "--log", simulate("bipartition", dir.path()).to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert!(text.contains("{0,6,7,8,ST} / {1,2,3,4,5}"), "{text}");
}

#[test]
fn detect_agrees_with_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["allsync", "isolated", "bipartition"] {
        let path = simulate(name, dir.path());
        let log = RunLog::read(&path).unwrap();
        let first = log
            .snapshots
            .iter()
            .find(|s| !detect_desync(&s.diffs).unwrap().in_sync)
            .map(|s| s.tick);
        let text = stdout(&worldsync(&["detect", "--log", path.to_str().unwrap()]));
        match first {
            Some(t) => assert!(text.starts_with(&format!("desynchronized at tick {t}\n")), "{name}: {text}"),
            None => assert!(text.starts_with("in sync"), "{name}: {text}"),
        }
    }
}

#[test]
fn diff_before_the_fault_agrees_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let log = simulate("bipartition", dir.path());
    for attr in ["battery", "sciencezone", "comm"] {
        let o = worldsync(&["diff", "--log", log.to_str().unwrap(), "--tick", "2", "--attribute", attr]);
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        let rows: Vec<&str> = text.lines().skip(2).take(10).collect();
        for row in rows {
            let cells: Vec<&str> = row.split_whitespace().skip(1).collect();
            assert_eq!(cells.len(), 10);
            assert_eq!(cells.iter().filter(|c| **c == ".").count(), 9, "{row}");
        }
        assert!(text.lines().last().unwrap().split_whitespace().skip(1).all(|c| c == "0"));
    }
    let o = worldsync(&["diff", "--log", log.to_str().unwrap(), "--tick", "2", "--attribute", "location"]);
    assert_eq!(o.status.code(), Some(64));
    let o = worldsync(&["diff", "--log", log.to_str().unwrap(), "--tick", "999", "--attribute", "battery"]);
    assert_eq!(o.status.code(), Some(65));
}

#[test]
fn trace_shows_the_relocated_step() {
    let dir = tempfile::tempdir().unwrap();
    let log = simulate("allsync", dir.path());
    let o = worldsync(&["trace", "--log", log.to_str().unwrap(), "--task", "5.sci.2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.contains("5.sci.2")).unwrap();
    assert!(line.contains('*') && line.contains("executor  4"), "{line}");
    let o = worldsync(&["trace", "--log", log.to_str().unwrap(), "--task", "42.nav"]);
    assert_eq!(o.status.code(), Some(65));
    let o = worldsync(&["trace", "--log", log.to_str().unwrap(), "--task", "banana"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn report_has_a_row_per_tick() {
    let dir = tempfile::tempdir().unwrap();
    let log = simulate("bipartition", dir.path());
    let text = stdout(&worldsync(&["report", "--log", log.to_str().unwrap()]));
    assert_eq!(text.lines().count(), 61);
    assert!(text.lines().nth(6).unwrap().contains("WARN"));
    let json = stdout(&worldsync(&["report", "--log", log.to_str().unwrap(), "--json"]));
    let docs: Vec<serde_json::Value> = json.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(docs.len(), 60);
    assert_eq!(docs[59]["tick"], 59);
}

#[test]
fn serve_answers_over_tcp() {
    let dir = tempfile::tempdir().unwrap();
    let log = simulate("allsync", dir.path());
    let mut child = Command::new(env!("CARGO_BIN_EXE_worldsync"))
        .args(["serve", "--log", log.to_str().unwrap(), "--port", "0"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut banner = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut banner).unwrap();
    let addr = banner.trim().strip_prefix("serving on http://").unwrap().to_string();

    let mut conn = TcpStream::connect(&addr).unwrap();
    write!(conn, "GET /api/meta HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n").unwrap();
    let mut response = String::new();
    conn.read_to_string(&mut response).unwrap();
    child.kill().unwrap();
    let _ = child.wait();

    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    let body = response.split("\r\n\r\n").nth(1).unwrap();
    let meta: serde_json::Value = serde_json::from_str(body).unwrap();
    assert_eq!(meta["ticks"]["count"], 45);
}
