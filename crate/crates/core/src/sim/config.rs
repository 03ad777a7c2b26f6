//! Declarative run configuration, read from TOML.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agent::{AgentId, Fleet};
use crate::diff::Tolerance;
use crate::error::{Error, Result};
use crate::worldview::{Level, Point};

use super::geometry::{Rect, Zone, ZoneKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub width: f64,
    pub height: f64,
    #[serde(default)]
    pub zones: Vec<Zone>,
}

impl MapConfig {
    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }

    pub fn in_bounds(&self, p: Point) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub x: f64,
    pub y: f64,
    #[serde(default = "full")]
    pub battery: Level,
}

fn full() -> Level {
    Level::FULL
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Scenario {
    AllSync,
    IsolatedAgent { target: AgentId, at_tick: u64 },
    Bipartition { cut: BTreeSet<AgentId>, at_tick: u64 },
}

impl Scenario {
    pub fn fault_tick(&self) -> Option<u64> {
        match self {
            Scenario::AllSync => None,
            Scenario::IsolatedAgent { at_tick, .. } | Scenario::Bipartition { at_tick, .. } => Some(*at_tick),
        }
    }
}

/// A scripted change to one agent's true state at the start of a tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub tick: u64,
    pub agent: AgentId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set_battery: Option<Level>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub move_to: Option<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default = "default_agents")]
    pub n_agents: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tick_ms")]
    pub tick_ms: u64,
    /// Number of ticks to simulate.
    pub horizon: u64,
    /// Defaults to the last agent.
    #[serde(default)]
    pub base_station: Option<AgentId>,
    pub map: MapConfig,
    /// Explicit initial states; generated from the seed when empty.
    #[serde(default)]
    pub agents: Vec<AgentSpec>,
    pub scenario: Scenario,
    #[serde(default)]
    pub perturbations: Vec<Perturbation>,
    #[serde(default = "default_threshold")]
    pub propagation_threshold: u32,
    #[serde(default)]
    pub tolerance: Tolerance,
    /// Half-width of the neutral band in the CPU/battery quadrant chart.
    #[serde(default = "default_band")]
    pub quadrant_band: u8,
}

fn default_agents() -> usize {
    10
}
fn default_tick_ms() -> u64 {
    1000
}
fn default_threshold() -> u32 {
    2
}
fn default_band() -> u8 {
    10
}

impl SimConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn fleet(&self) -> Result<Fleet> {
        let base = self.base_station.unwrap_or(AgentId(self.n_agents.saturating_sub(1)));
        Fleet::new(self.n_agents, base).map_err(|e| Error::config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let fleet = self.fleet()?;
        let known = |id: AgentId, what: &str| {
            if fleet.contains(id) {
                Ok(())
            } else {
                Err(Error::config(format!("{what} refers to unknown agent {id}")))
            }
        };
        if self.tick_ms == 0 {
            return Err(Error::config("tick_ms must be positive"));
        }
        if !(self.map.width > 0.0 && self.map.height > 0.0) {
            return Err(Error::config("map width and height must be positive"));
        }
        for z in &self.map.zones {
            Rect::new(z.rect.x_min, z.rect.y_min, z.rect.x_max, z.rect.y_max)?;
        }
        if !self.agents.is_empty() && self.agents.len() != self.n_agents {
            return Err(Error::config(format!(
                "{} agents listed but n_agents is {}",
                self.agents.len(),
                self.n_agents
            )));
        }
        if let Some(a) = self.agents.iter().find(|a| !self.map.in_bounds(Point::new(a.x, a.y))) {
            return Err(Error::config(format!("agent at ({}, {}) is outside the map", a.x, a.y)));
        }
        if self.propagation_threshold == 0 {
            return Err(Error::config("propagation_threshold must be at least 1"));
        }
        if self.quadrant_band > 50 {
            return Err(Error::config("quadrant_band must be at most 50"));
        }
        match &self.scenario {
            Scenario::AllSync => {}
            Scenario::IsolatedAgent { target, .. } => known(*target, "isolated_agent target")?,
            Scenario::Bipartition { cut, .. } => {
                for id in cut {
                    known(*id, "bipartition cut")?;
                }
                if cut.is_empty() || cut.len() >= self.n_agents {
                    return Err(Error::config("bipartition cut must be a proper, non-empty subset"));
                }
            }
        }
        let fault = self.scenario.fault_tick();
        for p in &self.perturbations {
            known(p.agent, "perturbation")?;
            if p.set_battery.is_none() == p.move_to.is_none() {
                return Err(Error::config(format!(
                    "perturbation at tick {} must set exactly one of set_battery, move_to",
                    p.tick
                )));
            }
            if let Some(q) = p.move_to {
                if !self.map.in_bounds(q) {
                    return Err(Error::config(format!("perturbation moves agent {} off the map", p.agent)));
                }
            }
            if fault.is_some_and(|f| p.tick < f) {
                return Err(Error::config(format!(
                    "perturbation at tick {} precedes the fault at tick {}",
                    p.tick,
                    fault.unwrap_or_default()
                )));
            }
        }
        Ok(())
    }

    pub fn horizon_time(&self) -> crate::time::Millis {
        crate::time::Millis(self.horizon * self.tick_ms)
    }

    pub fn zones_of(&self, kind: ZoneKind) -> impl Iterator<Item = &Zone> {
        self.map.zones.iter().filter(move |z| z.kind == kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
horizon = 20
[map]
width = 100.0
height = 100.0
[scenario]
kind = "all_sync"
"#;

    #[test]
    fn defaults_fill_in() {
        let c = SimConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.n_agents, 10);
        assert_eq!(c.tick_ms, 1000);
        assert_eq!(c.propagation_threshold, 2);
        assert_eq!(c.fleet().unwrap().base, AgentId(9));
    }

    #[test]
    fn scenario_and_perturbations_parse() {
        let text = r#"
n_agents = 4
horizon = 20
[map]
width = 100.0
height = 100.0
zones = [{ kind = "science", x_min = 0.0, y_min = 0.0, x_max = 10.0, y_max = 10.0 }]
[scenario]
kind = "bipartition"
cut = [0, 3]
at_tick = 5
[[perturbations]]
tick = 6
agent = 1
set_battery = 30
[[perturbations]]
tick = 7
agent = 2
move_to = { x = 5.0, y = 5.0 }
"#;
        let c = SimConfig::from_toml(text).unwrap();
        assert_eq!(c.map.zones[0].kind, ZoneKind::Science);
        assert_eq!(c.perturbations[0].set_battery, Some(Level::new(30).unwrap()));
        assert_eq!(c.perturbations[1].move_to, Some(Point::new(5.0, 5.0)));
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<SimConfig>(&json).unwrap(), c);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = |extra: &str, scenario: &str| {
            let text = format!(
                "n_agents = 4\nhorizon = 10\n{extra}\n[map]\nwidth = 100.0\nheight = 100.0\n[scenario]\n{scenario}\n"
            );
            SimConfig::from_toml(&text).unwrap_err()
        };
        assert!(matches!(bad("", "kind = \"isolated_agent\"\ntarget = 7\nat_tick = 2"), Error::Config(_)));
        assert!(matches!(bad("", "kind = \"bipartition\"\ncut = [0,1,2,3]\nat_tick = 2"), Error::Config(_)));
        assert!(matches!(bad("base_station = 9", "kind = \"all_sync\""), Error::Config(_)));
        assert!(matches!(bad("", "kind = \"warp\""), Error::Config(_)));
    }
}
