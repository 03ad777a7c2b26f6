//! Task identity shared by the worldview (actions), the planner and the
//! executed timeline.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::agent::AgentId;
use crate::error::{Error, Result};
use crate::time::Millis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainKind {
    Nav,
    Sci,
}

impl ChainKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChainKind::Nav => "nav",
            ChainKind::Sci => "sci",
        }
    }

    /// Navigation chains are mandatory; science chains are optional.
    pub fn mandatory(self) -> bool {
        matches!(self, ChainKind::Nav)
    }

    pub fn nominal(self) -> Millis {
        match self {
            ChainKind::Nav => Millis(4000),
            ChainKind::Sci => Millis(6000),
        }
    }
}

pub const CHAIN_STEPS: u8 = 3;

/// `(owner, chain, step)` with steps numbered 1 to 3.
///
/// Rendered and parsed as `5.sci.2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TaskId {
    pub owner: AgentId,
    pub chain: ChainKind,
    pub step: u8,
}

impl TaskId {
    pub fn new(owner: AgentId, chain: ChainKind, step: u8) -> Self {
        debug_assert!((1..=CHAIN_STEPS).contains(&step));
        Self { owner, chain, step }
    }

    /// Step 1 uses the owner's hardware (camera, instruments); steps 2 and 3
    /// are computational and may run on a helper.
    pub fn relocatable(self) -> bool {
        self.step > 1
    }

    pub fn predecessor(self) -> Option<TaskId> {
        (self.step > 1).then(|| TaskId::new(self.owner, self.chain, self.step - 1))
    }

    pub fn chain_id(self) -> ChainId {
        ChainId {
            owner: self.owner,
            kind: self.chain,
        }
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{}", self.owner, self.chain.as_str(), self.step)
    }
}

impl FromStr for TaskId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::NotFound(format!("task '{s}'"));
        let mut parts = s.split('.');
        let (Some(owner), Some(chain), Some(step), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad());
        };
        let chain = parse_chain(chain).ok_or_else(bad)?;
        let owner = owner.parse::<usize>().map_err(|_| bad())?;
        let step = step.parse::<u8>().map_err(|_| bad())?;
        if !(1..=CHAIN_STEPS).contains(&step) {
            return Err(bad());
        }
        Ok(TaskId::new(AgentId(owner), chain, step))
    }
}

fn parse_chain(s: &str) -> Option<ChainKind> {
    match s {
        "nav" => Some(ChainKind::Nav),
        "sci" => Some(ChainKind::Sci),
        _ => None,
    }
}

impl Serialize for TaskId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TaskId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One owner's navigation or science chain, rendered as `5.sci`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChainId {
    pub owner: AgentId,
    pub kind: ChainKind,
}

impl ChainId {
    pub fn step(self, step: u8) -> TaskId {
        TaskId::new(self.owner, self.kind, step)
    }

    pub fn steps(self) -> impl Iterator<Item = TaskId> {
        (1..=CHAIN_STEPS).map(move |s| self.step(s))
    }
}

impl fmt::Display for ChainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.owner, self.kind.as_str())
    }
}

impl FromStr for ChainId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::NotFound(format!("chain '{s}'"));
        let (owner, kind) = s.split_once('.').ok_or_else(bad)?;
        Ok(ChainId {
            owner: AgentId(owner.parse().map_err(|_| bad())?),
            kind: parse_chain(kind).ok_or_else(bad)?,
        })
    }
}

/// Lifecycle of one execution of a task by one executor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Running,
    Completed,
    /// Ran to its end but could not deliver (science data with no route to
    /// the base station). Counts as not done.
    Failed,
}
