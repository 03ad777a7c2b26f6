//! Agent identifiers and the fleet layout.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index of an agent within its fleet.
///
/// Which index is the base station is a property of the [`Fleet`], not of the
/// id itself; use [`Fleet::label`] to render ids the way operators read them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub usize);

impl AgentId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Fleet size and the position of the single base station.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fleet {
    pub size: usize,
    pub base: AgentId,
}

pub const BASE_LABEL: &str = "ST";

impl Fleet {
    pub fn new(size: usize, base: AgentId) -> Result<Self> {
        if size < 2 {
            return Err(Error::config(format!("fleet needs at least 2 agents, got {size}")));
        }
        if base.0 >= size {
            return Err(Error::config(format!(
                "base station index {} outside fleet of {size}",
                base.0
            )));
        }
        Ok(Self { size, base })
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> + Clone {
        (0..self.size).map(AgentId)
    }

    /// Agents that own task chains, i.e. everyone except the base station.
    pub fn workers(&self) -> impl Iterator<Item = AgentId> + Clone {
        let base = self.base;
        self.agents().filter(move |a| *a != base)
    }

    pub fn is_base(&self, id: AgentId) -> bool {
        id == self.base
    }

    pub fn contains(&self, id: AgentId) -> bool {
        id.0 < self.size
    }

    pub fn check(&self, id: AgentId) -> Result<AgentId> {
        if self.contains(id) {
            Ok(id)
        } else {
            Err(Error::config(format!("unknown agent id {id} (fleet of {})", self.size)))
        }
    }

    pub fn label(&self, id: AgentId) -> String {
        if self.is_base(id) {
            BASE_LABEL.to_string()
        } else {
            id.0.to_string()
        }
    }

    /// Parses an operator-facing label: a decimal index or `ST`.
    pub fn parse_label(&self, s: &str) -> Result<AgentId> {
        if s.eq_ignore_ascii_case(BASE_LABEL) {
            return Ok(self.base);
        }
        let idx = usize::from_str(s).map_err(|_| Error::NotFound(format!("agent '{s}'")))?;
        if idx < self.size {
            Ok(AgentId(idx))
        } else {
            Err(Error::NotFound(format!("agent '{s}'")))
        }
    }

    /// Renders a set of ids as `{0,6,7,8,ST}`.
    pub fn format_set(&self, ids: &[AgentId]) -> String {
        let parts: Vec<String> = ids.iter().map(|id| self.label(*id)).collect();
        format!("{{{}}}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_base_station_as_st() {
        let fleet = Fleet::new(10, AgentId(9)).unwrap();
        assert_eq!(fleet.label(AgentId(9)), "ST");
        assert_eq!(fleet.label(AgentId(3)), "3");
        assert_eq!(fleet.parse_label("st").unwrap(), AgentId(9));
        assert_eq!(fleet.parse_label("4").unwrap(), AgentId(4));
        assert!(fleet.parse_label("10").is_err());
        assert_eq!(fleet.workers().count(), 9);
    }

    #[test]
    fn rejects_degenerate_fleets() {
        assert!(Fleet::new(1, AgentId(0)).is_err());
        assert!(Fleet::new(3, AgentId(3)).is_err());
    }
}
