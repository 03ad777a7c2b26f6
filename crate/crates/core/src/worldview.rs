//! The worldview data model: six attributes per agent, held by every agent
//! about every agent.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::agent::AgentId;
use crate::error::{Error, Result};
use crate::task::{RunStatus, TaskId};
use crate::time::Millis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeKind {
    Location,
    ScienceZone,
    BatteryLevel,
    CpuUtilization,
    Actions,
    Communication,
}

impl AttributeKind {
    pub const ALL: [AttributeKind; 6] = [
        AttributeKind::Location,
        AttributeKind::ScienceZone,
        AttributeKind::BatteryLevel,
        AttributeKind::CpuUtilization,
        AttributeKind::Actions,
        AttributeKind::Communication,
    ];

    /// The attributes that drive scheduling and feed the desync warning, in
    /// panel order (CN, BT, SZ).
    pub const MONITORED: [AttributeKind; 3] = [
        AttributeKind::Communication,
        AttributeKind::BatteryLevel,
        AttributeKind::ScienceZone,
    ];

    pub fn monitored(self) -> bool {
        Self::MONITORED.contains(&self)
    }

    /// Two-letter panel code used by the summary strip.
    pub fn code(self) -> &'static str {
        match self {
            AttributeKind::Location => "LC",
            AttributeKind::ScienceZone => "SZ",
            AttributeKind::BatteryLevel => "BT",
            AttributeKind::CpuUtilization => "CPU",
            AttributeKind::Actions => "AC",
            AttributeKind::Communication => "CN",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AttributeKind::Location => "location",
            AttributeKind::ScienceZone => "science_zone",
            AttributeKind::BatteryLevel => "battery_level",
            AttributeKind::CpuUtilization => "cpu_utilization",
            AttributeKind::Actions => "actions",
            AttributeKind::Communication => "communication",
        }
    }

    /// Accepts the short operator spellings (`battery`, `sciencezone`,
    /// `comm`, panel codes) as well as the canonical names.
    pub fn parse(s: &str) -> Option<AttributeKind> {
        let k = s.to_ascii_lowercase().replace(['-', '_'], "");
        Some(match k.as_str() {
            "location" | "lc" => AttributeKind::Location,
            "sciencezone" | "sz" => AttributeKind::ScienceZone,
            "battery" | "batterylevel" | "bt" => AttributeKind::BatteryLevel,
            "cpu" | "cpuutilization" => AttributeKind::CpuUtilization,
            "actions" | "ac" => AttributeKind::Actions,
            "comm" | "communication" | "cn" => AttributeKind::Communication,
            _ => return None,
        })
    }
}

impl fmt::Display for AttributeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Percentage on the 10-point ordinal grid `{0, 10, ..., 100}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Level(u8);

impl Level {
    pub const STEP: u8 = 10;
    pub const EMPTY: Level = Level(0);
    pub const FULL: Level = Level(100);

    pub fn new(percent: u8) -> Result<Self> {
        if percent <= 100 && percent.is_multiple_of(Self::STEP) {
            Ok(Level(percent))
        } else {
            Err(Error::contract(format!("{percent} is not on the 10-point ordinal grid")))
        }
    }

    /// Rounds a raw percentage to the nearest grid point.
    pub fn quantize(percent: f64) -> Self {
        let clamped = percent.clamp(0.0, 100.0);
        Level(((clamped / 10.0).round() as u8) * 10)
    }

    pub fn percent(self) -> u8 {
        self.0
    }

    /// One grid step lower, saturating at empty.
    pub fn step_down(self) -> Self {
        Level(self.0.saturating_sub(Self::STEP))
    }
}

impl TryFrom<u8> for Level {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        Level::new(v)
    }
}

impl From<Level> for u8 {
    fn from(l: Level) -> u8 {
        l.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// One entry of the actions attribute: an execution the subject agent has
/// started as executor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActionEvent {
    pub task: TaskId,
    pub start: Millis,
    pub end: Millis,
    pub status: RunStatus,
}

/// A single attribute value, tagged with its variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeValue {
    Location(Point),
    ScienceZone(bool),
    Battery(Level),
    Cpu(Level),
    Actions(Vec<ActionEvent>),
    /// Bandwidth from the subject agent to every agent, indexed by agent.
    CommRow(Vec<u32>),
}

impl AttributeValue {
    pub fn kind(&self) -> AttributeKind {
        match self {
            AttributeValue::Location(_) => AttributeKind::Location,
            AttributeValue::ScienceZone(_) => AttributeKind::ScienceZone,
            AttributeValue::Battery(_) => AttributeKind::BatteryLevel,
            AttributeValue::Cpu(_) => AttributeKind::CpuUtilization,
            AttributeValue::Actions(_) => AttributeKind::Actions,
            AttributeValue::CommRow(_) => AttributeKind::Communication,
        }
    }

    /// Short human rendering for tables.
    pub fn brief(&self) -> String {
        match self {
            AttributeValue::Location(p) => format!("({:.1},{:.1})", p.x, p.y),
            AttributeValue::ScienceZone(b) => if *b { "in" } else { "out" }.to_string(),
            AttributeValue::Battery(l) | AttributeValue::Cpu(l) => format!("{}%", l.percent()),
            AttributeValue::Actions(a) => format!("{} ev", a.len()),
            AttributeValue::CommRow(r) => r
                .iter()
                .map(|b| b.to_string())
                .collect::<Vec<_>>()
                .join(""),
        }
    }
}

/// Everything one agent believes about one subject agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentRecord {
    pub location: Point,
    pub science_zone: bool,
    pub battery: Level,
    pub cpu: Level,
    pub actions: Vec<ActionEvent>,
    pub comm: Vec<u32>,
}

impl AgentRecord {
    pub fn value(&self, kind: AttributeKind) -> AttributeValue {
        match kind {
            AttributeKind::Location => AttributeValue::Location(self.location),
            AttributeKind::ScienceZone => AttributeValue::ScienceZone(self.science_zone),
            AttributeKind::BatteryLevel => AttributeValue::Battery(self.battery),
            AttributeKind::CpuUtilization => AttributeValue::Cpu(self.cpu),
            AttributeKind::Actions => AttributeValue::Actions(self.actions.clone()),
            AttributeKind::Communication => AttributeValue::CommRow(self.comm.clone()),
        }
    }

    /// Overwrites one attribute. Fails when the value's variant does not
    /// match `kind`.
    pub fn set(&mut self, kind: AttributeKind, value: AttributeValue) -> Result<()> {
        match (kind, value) {
            (AttributeKind::Location, AttributeValue::Location(p)) => self.location = p,
            (AttributeKind::ScienceZone, AttributeValue::ScienceZone(b)) => self.science_zone = b,
            (AttributeKind::BatteryLevel, AttributeValue::Battery(l)) => self.battery = l,
            (AttributeKind::CpuUtilization, AttributeValue::Cpu(l)) => self.cpu = l,
            (AttributeKind::Actions, AttributeValue::Actions(a)) => self.actions = a,
            (AttributeKind::Communication, AttributeValue::CommRow(r)) => self.comm = r,
            (kind, value) => {
                return Err(Error::contract(format!(
                    "cannot store a {} value under {kind}",
                    value.kind()
                )))
            }
        }
        Ok(())
    }
}

/// One agent's beliefs about the whole fleet.
///
/// `records[owner]` holds the ego values; `freshness[k]` is the tick at which
/// the information about agent `k` originated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Worldview {
    pub owner: AgentId,
    pub records: Vec<AgentRecord>,
    pub freshness: Vec<u64>,
}

impl Worldview {
    pub fn new(owner: AgentId, records: Vec<AgentRecord>, tick: u64) -> Result<Self> {
        let n = records.len();
        if owner.0 >= n {
            return Err(Error::contract(format!("owner {owner} outside worldview of {n}")));
        }
        if let Some((j, r)) = records.iter().enumerate().find(|(_, r)| r.comm.len() != n) {
            return Err(Error::contract(format!(
                "communication row for agent {j} has {} entries, expected {n}",
                r.comm.len()
            )));
        }
        Ok(Self {
            owner,
            records,
            freshness: vec![tick; n],
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn ego(&self) -> &AgentRecord {
        &self.records[self.owner.0]
    }

    pub fn about(&self, subject: AgentId) -> &AgentRecord {
        &self.records[subject.0]
    }

    /// This agent's beliefs about `kind` for every subject, in agent order.
    pub fn row(&self, kind: AttributeKind) -> Vec<AttributeValue> {
        self.records.iter().map(|r| r.value(kind)).collect()
    }

    /// Digest over the beliefs alone. Owner and freshness are excluded, so two
    /// agents holding equal beliefs produce equal digests.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(&self.records).expect("records serialize");
        let hash = Sha256::digest(&bytes);
        hash.iter().take(16).map(|b| format!("{b:02x}")).collect()
    }
}
