//! Plain-text tables for terminal output.

use std::fmt::Write;

use worldsync_core::analytics::ChainTrace;
use worldsync_core::diff::{DiffCell, DifferenceMatrix, SyncReport};
use worldsync_core::snapshot::Snapshot;
use worldsync_core::{AgentId, AttributeValue, Fleet};

fn pad(s: &str, w: usize) -> String {
    format!("{s:>w$}")
}

/// Ego cells in brackets, agreeing cells as `.`, disagreeing cells show the
/// presumed value. Column sums follow the matrix.
pub fn difference_table(y: &DifferenceMatrix, egos: &[AttributeValue], fleet: &Fleet, tick: u64) -> String {
    let n = y.n();
    let cells: Vec<Vec<String>> = y
        .cells
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .map(|c| match c {
                    DiffCell::Ego => format!("[{}]", egos[i].brief()),
                    DiffCell::Agree => ".".to_string(),
                    DiffCell::Differ { presumed } => presumed.brief(),
                })
                .collect()
        })
        .collect();
    let summaries = y.column_summaries();
    let width = cells
        .iter()
        .flatten()
        .map(String::len)
        .chain([4])
        .max()
        .unwrap_or(4);

    let mut out = String::new();
    let _ = writeln!(out, "{} ({}) at tick {tick}", y.kind.as_str(), y.kind.code());
    let _ = write!(out, "{}", pad("", 6));
    for j in 0..n {
        let _ = write!(out, " {}", pad(&fleet.label(AgentId(j)), width));
    }
    out.push('\n');
    for (i, row) in cells.iter().enumerate() {
        let _ = write!(out, "{}", pad(&fleet.label(AgentId(i)), 6));
        for c in row {
            let _ = write!(out, " {}", pad(c, width));
        }
        out.push('\n');
    }
    for (name, pick) in [("sim", 0usize), ("diff", 1)] {
        let _ = write!(out, "{}", pad(name, 6));
        for s in &summaries {
            let v = if pick == 0 { s.similarity_sum } else { s.difference_sum };
            let _ = write!(out, " {}", pad(&v.to_string(), width));
        }
        out.push('\n');
    }
    out
}

pub fn desync_report(report: &SyncReport, fleet: &Fleet, tick: u64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "desynchronized at tick {tick}");
    for (kind, cells) in &report.per_attribute {
        if cells.is_empty() {
            let _ = writeln!(out, "  {}: consistent", kind.code());
            continue;
        }
        let sets: Vec<String> = report.contrarian_sets[kind].iter().map(|s| fleet.format_set(s)).collect();
        let _ = writeln!(out, "  {}: {} differing cells, sets {}", kind.code(), cells.len(), sets.join(" / "));
    }
    out
}

pub fn trace_table(t: &ChainTrace, fleet: &Fleet) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "chain {} owner {} ({})",
        t.chain,
        fleet.label(t.owner),
        if t.mandatory { "mandatory" } else { "optional" }
    );
    if t.events.is_empty() {
        let _ = writeln!(out, "  not started");
    }
    for e in &t.events {
        let mark = if e.relocated { "*" } else { " " };
        let _ = writeln!(
            out,
            "  {:<9}{mark} executor {:>2}  {} - {}  {:?}",
            e.task.to_string(),
            fleet.label(e.executor),
            e.start,
            e.end,
            e.status
        );
    }
    out
}

pub fn report_table(snapshots: &[Snapshot], fleet: &Fleet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:>5} {:>8} {:>6} {:>17} {:>4} {:>4}  sets", "tick", "time", "sync", "science", "dup", "orph");
    for s in snapshots {
        let sum = &s.summary;
        let science = match sum.science_fractions {
            Some([a, b, c]) => format!("{a:.2}/{b:.2}/{c:.2}"),
            None => "-".to_string(),
        };
        let sets: Vec<String> = sum
            .contrarian_sets
            .iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(k, v)| {
                let parts: Vec<String> = v.iter().map(|g| fleet.format_set(g)).collect();
                format!("{}={}", k.code(), parts.join("/"))
            })
            .collect();
        let _ = writeln!(
            out,
            "{:>5} {:>8} {:>6} {:>17} {:>4} {:>4}  {}",
            s.tick,
            s.time.to_string(),
            if sum.sync_warning { "WARN" } else { "ok" },
            science,
            s.anomalies.duplicates.len(),
            s.anomalies.orphans.len(),
            sets.join(" ")
        );
    }
    out
}
