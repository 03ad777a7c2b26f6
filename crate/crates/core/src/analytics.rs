//! Summary structures for the main operator view, derived from one tick's
//! components.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::agent::{AgentId, Fleet};
use crate::diff::{detect_desync, ColumnSummary, DifferenceMatrix};
use crate::error::{Error, Result};
use crate::scheduler::TimelineEvent;
use crate::snapshot::TrueAgentState;
use crate::task::{ChainId, ChainKind, RunStatus, TaskId, CHAIN_STEPS};
use crate::worldview::AttributeKind;

/// Fraction of eligible owners whose science step `k` has completed, on
/// board or on a helper. `None` when nobody is eligible.
pub fn science_fractions(events: &[TimelineEvent], eligible: &BTreeSet<AgentId>) -> Option<[f64; 3]> {
    if eligible.is_empty() {
        return None;
    }
    let done = completed(events);
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let count = eligible
            .iter()
            .filter(|owner| done.contains(&TaskId::new(**owner, ChainKind::Sci, k as u8 + 1)))
            .count();
        *slot = count as f64 / eligible.len() as f64;
    }
    Some(out)
}

fn completed(events: &[TimelineEvent]) -> BTreeSet<TaskId> {
    events
        .iter()
        .filter(|e| e.status == RunStatus::Completed)
        .map(|e| e.task)
        .collect()
}

/// Owners eligible for the science objective: workers currently in a science
/// zone, plus any owner that already completed science work.
pub fn science_eligible(states: &[TrueAgentState], events: &[TimelineEvent], fleet: &Fleet) -> BTreeSet<AgentId> {
    let mut set: BTreeSet<AgentId> = states
        .iter()
        .filter(|s| s.science_zone && !fleet.is_base(s.id))
        .map(|s| s.id)
        .collect();
    set.extend(
        events
            .iter()
            .filter(|e| e.task.chain == ChainKind::Sci && e.status == RunStatus::Completed)
            .map(|e| e.owner),
    );
    set
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainTrace {
    pub chain: ChainId,
    pub owner: AgentId,
    pub kind: ChainKind,
    pub mandatory: bool,
    pub events: Vec<TimelineEvent>,
}

/// Every run of the chain containing `id`, which may name a task
/// (`"5.sci.2"`) or a whole chain (`"5.sci"`).
pub fn chain_trace(id: &str, events: &[TimelineEvent], fleet: &Fleet) -> Result<ChainTrace> {
    let chain = match id.parse::<TaskId>() {
        Ok(t) => t.chain_id(),
        Err(_) => id
            .parse::<ChainId>()
            .map_err(|_| Error::contract(format!("{id:?} is neither a task (5.sci.2) nor a chain (5.sci)")))?,
    };
    if !fleet.contains(chain.owner) || fleet.is_base(chain.owner) {
        return Err(Error::NotFound(format!("agent {} owns no chains", chain.owner)));
    }
    let mut runs: Vec<TimelineEvent> = events.iter().filter(|e| e.task.chain_id() == chain).copied().collect();
    runs.sort_by_key(|e| (e.start, e.task.step, e.end, e.executor));
    Ok(ChainTrace {
        chain,
        owner: chain.owner,
        kind: chain.kind,
        mandatory: chain.kind.mandatory(),
        events: runs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadrantClass {
    /// Low CPU, high battery.
    Lazy,
    /// High CPU, low battery.
    Overworked,
    HighPower,
    Depleted,
    Neutral,
}

/// Place an agent on the CPU/battery chart. Values at exactly 50 count as
/// high.
pub fn quadrant(avg_cpu: f64, battery: f64, band: f64) -> Result<QuadrantClass> {
    for (name, v) in [("average cpu", avg_cpu), ("battery", battery)] {
        if !(0.0..=100.0).contains(&v) {
            return Err(Error::contract(format!("{name} {v} outside [0, 100]")));
        }
    }
    if !(0.0..=50.0).contains(&band) {
        return Err(Error::contract(format!("band {band} outside [0, 50]")));
    }
    if (avg_cpu - 50.0).abs() <= band && (battery - 50.0).abs() <= band {
        return Ok(QuadrantClass::Neutral);
    }
    Ok(match (avg_cpu >= 50.0, battery >= 50.0) {
        (false, true) => QuadrantClass::Lazy,
        (true, false) => QuadrantClass::Overworked,
        (true, true) => QuadrantClass::HighPower,
        (false, false) => QuadrantClass::Depleted,
    })
}

/// Completion glyphs for one owner's two chains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskAbstraction {
    pub agent: AgentId,
    pub nav_done: [bool; 3],
    pub sci_done: [bool; 3],
    pub eligible_for_sci: bool,
}

impl TaskAbstraction {
    pub fn respects_precedence(&self) -> bool {
        let ok = |d: &[bool; 3]| d.windows(2).all(|w| w[0] || !w[1]);
        ok(&self.nav_done) && ok(&self.sci_done)
    }
}

pub fn task_abstraction(events: &[TimelineEvent], eligible: &BTreeSet<AgentId>, fleet: &Fleet) -> Vec<TaskAbstraction> {
    let done = completed(events);
    let flags = |owner: AgentId, kind: ChainKind| {
        let mut out = [false; CHAIN_STEPS as usize];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = done.contains(&TaskId::new(owner, kind, k as u8 + 1));
        }
        out
    };
    fleet
        .workers()
        .map(|agent| TaskAbstraction {
            agent,
            nav_done: flags(agent, ChainKind::Nav),
            sci_done: flags(agent, ChainKind::Sci),
            eligible_for_sci: eligible.contains(&agent),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiniDwc {
    pub code: String,
    pub kind: AttributeKind,
    pub columns: Vec<ColumnSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentQuadrant {
    pub agent: AgentId,
    pub avg_cpu: f64,
    pub battery: u8,
    pub class: QuadrantClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryOverview {
    pub science_fractions: Option<[f64; 3]>,
    pub eligible: Vec<AgentId>,
    pub sync_warning: bool,
    pub contrarian_sets: BTreeMap<AttributeKind, Vec<Vec<AgentId>>>,
    pub mini_dwc: Vec<MiniDwc>,
    pub quadrants: Vec<AgentQuadrant>,
    pub tasks: Vec<TaskAbstraction>,
}

pub fn summary_overview(
    states: &[TrueAgentState],
    events: &[TimelineEvent],
    diffs: &BTreeMap<AttributeKind, DifferenceMatrix>,
    fleet: &Fleet,
    band: u8,
) -> Result<SummaryOverview> {
    let eligible = science_eligible(states, events, fleet);
    let report = detect_desync(diffs)?;
    let mini_dwc = AttributeKind::MONITORED
        .iter()
        .map(|kind| MiniDwc {
            code: kind.code().to_string(),
            kind: *kind,
            columns: diffs[kind].column_summaries(),
        })
        .collect();
    let quadrants = states
        .iter()
        .map(|s| {
            Ok(AgentQuadrant {
                agent: s.id,
                avg_cpu: s.avg_cpu,
                battery: s.battery.percent(),
                class: quadrant(s.avg_cpu, f64::from(s.battery.percent()), f64::from(band))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SummaryOverview {
        science_fractions: science_fractions(events, &eligible),
        tasks: task_abstraction(events, &eligible, fleet),
        eligible: eligible.into_iter().collect(),
        sync_warning: !report.in_sync,
        contrarian_sets: report.contrarian_sets,
        mini_dwc,
        quadrants,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::Millis;

    fn done(task: &str, executor: usize) -> TimelineEvent {
        let task: TaskId = task.parse().unwrap();
        TimelineEvent {
            task,
            owner: task.owner,
            executor: AgentId(executor),
            start: Millis(0),
            end: Millis(1000),
            relocated: task.owner.0 != executor,
            status: RunStatus::Completed,
        }
    }

    #[test]
    fn fractions_count_delegated_completions() {
        let eligible: BTreeSet<_> = [1, 3, 5, 6].map(AgentId).into();
        let ev = vec![done("5.sci.1", 5), done("5.sci.2", 4), done("1.sci.1", 1)];
        assert_eq!(science_fractions(&ev, &eligible), Some([0.5, 0.25, 0.0]));
        assert_eq!(science_fractions(&[], &eligible), Some([0.0; 3]));
        assert_eq!(science_fractions(&ev, &BTreeSet::new()), None);
    }

    #[test]
    fn quadrant_examples() {
        assert_eq!(quadrant(10.0, 90.0, 10.0).unwrap(), QuadrantClass::Lazy);
        assert_eq!(quadrant(90.0, 20.0, 10.0).unwrap(), QuadrantClass::Overworked);
        assert_eq!(quadrant(80.0, 80.0, 10.0).unwrap(), QuadrantClass::HighPower);
        assert_eq!(quadrant(20.0, 20.0, 10.0).unwrap(), QuadrantClass::Depleted);
        assert_eq!(quadrant(50.0, 50.0, 0.0).unwrap(), QuadrantClass::Neutral);
        assert_eq!(quadrant(55.0, 45.0, 10.0).unwrap(), QuadrantClass::Neutral);
        assert!(quadrant(101.0, 50.0, 10.0).is_err());
        assert!(quadrant(50.0, -1.0, 10.0).is_err());
    }

    #[test]
    fn trace_accepts_task_or_chain() {
        let fleet = Fleet::new(10, AgentId(9)).unwrap();
        let ev = vec![done("5.sci.2", 4), done("5.sci.1", 5), done("3.nav.1", 3)];
        let t = chain_trace("5.sci.2", &ev, &fleet).unwrap();
        assert_eq!(t.owner, AgentId(5));
        assert!(!t.mandatory);
        assert_eq!(t.events.len(), 2);
        assert_eq!(t.events[1].executor, AgentId(4));
        assert!(t.events[1].relocated);
        assert_eq!(chain_trace("5.sci", &ev, &fleet).unwrap(), t);
        let empty = chain_trace("7.nav", &ev, &fleet).unwrap();
        assert!(empty.events.is_empty() && empty.mandatory);
        assert!(matches!(chain_trace("9.nav.1", &ev, &fleet), Err(Error::NotFound(_))));
        assert!(matches!(chain_trace("bogus", &ev, &fleet), Err(Error::Contract(_))));
    }

    #[test]
    fn abstraction_marks_completions() {
        let fleet = Fleet::new(3, AgentId(2)).unwrap();
        let ev = vec![done("0.nav.1", 0), done("0.nav.2", 2)];
        let eligible: BTreeSet<_> = [AgentId(1)].into();
        let t = task_abstraction(&ev, &eligible, &fleet);
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].nav_done, [true, true, false]);
        assert!(t[1].eligible_for_sci && !t[0].eligible_for_sci);
        assert!(t.iter().all(TaskAbstraction::respects_precedence));
    }
}
