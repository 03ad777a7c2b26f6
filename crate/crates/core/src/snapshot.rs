//! Full system state at one tick, as persisted in a run log.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::agent::{AgentId, Fleet};
use crate::analytics::{summary_overview, SummaryOverview};
use crate::diff::{monitored_matrices, DifferenceMatrix, Tolerance};
use crate::error::Result;
use crate::scheduler::{Anomalies, Schedule, TimelineEvent};
use crate::sim::geometry::Zone;
use crate::sim::links::LinkMatrix;
use crate::time::Millis;
use crate::worldview::{AttributeKind, Level, Point, Worldview};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueAgentState {
    pub id: AgentId,
    pub position: Point,
    pub battery: Level,
    pub cpu: Level,
    pub radio_enabled: bool,
    pub science_zone: bool,
    /// Mean CPU percentage over the trailing five ticks.
    pub avg_cpu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub tick: u64,
    /// End of the tick's execution window.
    pub time: Millis,
    pub true_states: Vec<TrueAgentState>,
    pub links: LinkMatrix,
    pub zones: Vec<Zone>,
    pub worldviews: Vec<Worldview>,
    /// Current plan of every agent, indexed by agent.
    pub schedules: Vec<Schedule>,
    /// Every run so far, in start order.
    pub events: Vec<TimelineEvent>,
    pub diffs: BTreeMap<AttributeKind, DifferenceMatrix>,
    pub summary: SummaryOverview,
    pub anomalies: Anomalies,
}

impl Snapshot {
    /// Diff matrices recomputed from the stored worldviews.
    pub fn recompute_diffs(&self, tol: &Tolerance) -> Result<BTreeMap<AttributeKind, DifferenceMatrix>> {
        monitored_matrices(&self.worldviews, tol)
    }

    pub fn recompute_summary(&self, fleet: &Fleet, band: u8) -> Result<SummaryOverview> {
        summary_overview(&self.true_states, &self.events, &self.diffs, fleet, band)
    }

    /// Events overlapping `[from, to]`.
    pub fn events_between(&self, from: Millis, to: Millis) -> Vec<TimelineEvent> {
        self.events
            .iter()
            .filter(|e| e.end >= from && e.start <= to)
            .copied()
            .collect()
    }
}
