//! Command-line front end and HTTP service for worldsync run logs.

pub mod api;
mod render;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use worldsync_core::analytics::chain_trace;
use worldsync_core::diff::detect_desync;
use worldsync_core::runlog::RunLog;
use worldsync_core::sim::{self, SimConfig};
use worldsync_core::{AttributeKind, Error};

/// Process exit codes, following the BSD sysexits convention.
pub mod exit {
    pub const OK: i32 = 0;
    pub const DESYNC: i32 = 2;
    pub const USAGE: i32 = 64;
    pub const DATA: i32 = 65;
    pub const NO_INPUT: i32 = 66;
    pub const SOFTWARE: i32 = 70;
    pub const CANT_CREATE: i32 = 73;
}

#[derive(Debug, Parser)]
#[command(name = "worldsync", version, about = "Simulate shared-world fleets and inspect worldview divergence")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario and write its run log.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the Difference Matrix of one attribute at one tick.
    Diff {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        tick: u64,
        #[arg(long, value_parser = parse_monitored)]
        attribute: AttributeKind,
    },
    /// Report the first desynchronized tick, if any.
    Detect {
        #[arg(long)]
        log: PathBuf,
    },
    /// Print every run of the chain containing a task.
    Trace {
        #[arg(long)]
        log: PathBuf,
        /// Task (`5.sci.2`) or chain (`5.sci`).
        #[arg(long)]
        task: String,
    },
    /// Print the summary overview for every tick.
    Report {
        #[arg(long)]
        log: PathBuf,
        /// Emit one JSON document per tick instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Serve the read-only HTTP API.
    Serve {
        #[arg(long)]
        log: PathBuf,
        #[arg(long, env = "WORLDSYNC_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
    },
}

fn parse_monitored(s: &str) -> Result<AttributeKind, String> {
    match AttributeKind::parse(s) {
        Some(k) if k.monitored() => Ok(k),
        _ => Err(format!("expected one of battery, sciencezone, comm; got {s:?}")),
    }
}

/// A failure carrying the exit code it should produce.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => exit::NO_INPUT,
            Error::Io { .. } => exit::CANT_CREATE,
            Error::Config(_) | Error::Parse { .. } | Error::SchemaVersion { .. } => exit::DATA,
            Error::NotFound(_) => exit::DATA,
            _ => exit::SOFTWARE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(exit::SOFTWARE, e.to_string())
    }
}

fn load(path: &Path) -> Result<RunLog, Failure> {
    Ok(RunLog::read(path)?)
}

/// Run a parsed command, writing human output to `out`. Returns the exit
/// code on success.
pub fn run(cmd: Command, out: &mut impl Write) -> Result<i32, Failure> {
    match cmd {
        Command::Simulate { config, out: path } => {
            let cfg = SimConfig::load(&config)?;
            let snapshots = sim::run(cfg.clone())?;
            let n = snapshots.len();
            RunLog::new(cfg, snapshots).write(&path)?;
            writeln!(out, "wrote {n} snapshots to {}", path.display())?;
            Ok(exit::OK)
        }
        Command::Diff { log, tick, attribute } => {
            let log = load(&log)?;
            let fleet = log.header.config.fleet()?;
            let snap = log
                .snapshot(tick)
                .ok_or_else(|| Failure::new(exit::DATA, format!("no snapshot for tick {tick}")))?;
            let egos: Vec<_> = snap.worldviews.iter().map(|w| w.ego().value(attribute)).collect();
            write!(out, "{}", render::difference_table(&snap.diffs[&attribute], &egos, &fleet, tick))?;
            Ok(exit::OK)
        }
        Command::Detect { log } => {
            let log = load(&log)?;
            let fleet = log.header.config.fleet()?;
            for snap in &log.snapshots {
                let report = detect_desync(&snap.diffs)?;
                if !report.in_sync {
                    write!(out, "{}", render::desync_report(&report, &fleet, snap.tick))?;
                    return Ok(exit::DESYNC);
                }
            }
            writeln!(out, "in sync at all {} ticks", log.snapshots.len())?;
            Ok(exit::OK)
        }
        Command::Trace { log, task } => {
            let log = load(&log)?;
            let fleet = log.header.config.fleet()?;
            let events = log.snapshots.last().map(|s| s.events.as_slice()).unwrap_or_default();
            let trace = chain_trace(&task, events, &fleet).map_err(|e| match e {
                Error::Contract(m) => Failure::new(exit::USAGE, m),
                e => e.into(),
            })?;
            write!(out, "{}", render::trace_table(&trace, &fleet))?;
            Ok(exit::OK)
        }
        Command::Report { log, json } => {
            let log = load(&log)?;
            let fleet = log.header.config.fleet()?;
            if json {
                for snap in &log.snapshots {
                    let line = serde_json::json!({
                        "tick": snap.tick,
                        "summary": snap.summary,
                        "anomalies": snap.anomalies,
                    });
                    writeln!(out, "{line}")?;
                }
            } else {
                write!(out, "{}", render::report_table(&log.snapshots, &fleet))?;
            }
            Ok(exit::OK)
        }
        Command::Serve { log, port, bind } => {
            let log = load(&log)?;
            let app = api::router(log).map_err(|e| Failure::new(exit::DATA, e.to_string()))?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind((bind.as_str(), port)).await?;
                writeln!(out, "serving on http://{}", listener.local_addr()?)?;
                out.flush()?;
                axum::serve(listener, app).await
            })?;
            Ok(exit::OK)
        }
    }
}
