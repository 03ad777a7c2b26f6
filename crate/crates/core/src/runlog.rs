//! JSON Lines run log: one header line, then one snapshot per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::SimConfig;
use crate::snapshot::Snapshot;

pub const FORMAT: &str = "worldsync-runlog";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub format: String,
    pub schema_version: u32,
    pub seed: u64,
    pub config: SimConfig,
}

impl Header {
    pub fn new(config: SimConfig) -> Self {
        Self {
            format: FORMAT.to_string(),
            schema_version: SCHEMA_VERSION,
            seed: config.seed,
            config,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub header: Header,
    pub snapshots: Vec<Snapshot>,
}

impl RunLog {
    pub fn new(config: SimConfig, snapshots: Vec<Snapshot>) -> Self {
        Self {
            header: Header::new(config),
            snapshots,
        }
    }

    pub fn snapshot(&self, tick: u64) -> Option<&Snapshot> {
        self.snapshots
            .binary_search_by_key(&tick, |s| s.tick)
            .ok()
            .map(|i| &self.snapshots[i])
    }

    pub fn tick_range(&self) -> Option<(u64, u64)> {
        Some((self.snapshots.first()?.tick, self.snapshots.last()?.tick))
    }

    pub fn write_to(&self, out: &mut impl Write) -> std::io::Result<()> {
        serde_json::to_writer(&mut *out, &self.header)?;
        out.write_all(b"\n")?;
        for s in &self.snapshots {
            serde_json::to_writer(&mut *out, s)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        buf
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let io = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut w = BufWriter::new(File::create(path).map_err(io)?);
        self.write_to(&mut w).map_err(io)?;
        w.flush().map_err(io)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read_from(BufReader::new(file), path)
    }

    /// `path` is used only in error messages.
    pub fn read_from(input: impl BufRead, path: &Path) -> Result<Self> {
        let parse = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, first) = lines.next().ok_or_else(|| parse(1, "empty file, expected a header".into()))?;
        let first = first.map_err(|e| parse(1, e.to_string()))?;
        let header: Header = serde_json::from_str(&first).map_err(|e| parse(1, e.to_string()))?;
        if header.format != FORMAT {
            return Err(parse(1, format!("unknown format {:?}", header.format)));
        }
        if header.schema_version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                path: path.to_path_buf(),
                found: header.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        let mut snapshots: Vec<Snapshot> = Vec::new();
        for (no, line) in lines {
            let line = line.map_err(|e| parse(no, e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            let s: Snapshot = serde_json::from_str(&line).map_err(|e| parse(no, e.to_string()))?;
            if let Some(prev) = snapshots.last() {
                if s.tick <= prev.tick {
                    return Err(parse(no, format!("tick {} does not follow tick {}", s.tick, prev.tick)));
                }
            }
            snapshots.push(s);
        }
        Ok(Self { header, snapshots })
    }
}
