//! Ground-truth execution of the agents' plans.
//!
//! Each agent follows only its own schedule, and only the entries that name
//! it as executor. Inside a tick window the engine repeatedly starts the
//! globally earliest feasible run, so a successor can begin the instant its
//! predecessor finishes, even on another agent.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::agent::{AgentId, Fleet};
use crate::task::{ChainKind, RunStatus, TaskId};
use crate::time::Millis;
use crate::worldview::{ActionEvent, Level};

use super::chains::{executor_duration, Task};
use super::plan::Schedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimelineEvent {
    pub task: TaskId,
    pub owner: AgentId,
    pub executor: AgentId,
    pub start: Millis,
    pub end: Millis,
    pub relocated: bool,
    pub status: RunStatus,
}

/// What the world actually looks like during one tick.
#[derive(Debug, Clone, Copy)]
pub struct TruthView<'a> {
    pub fleet: &'a Fleet,
    pub battery: &'a [Level],
    pub links: &'a [Vec<u32>],
    pub threshold: u32,
    pub horizon: Millis,
}

impl TruthView<'_> {
    fn reaches_base(&self, from: AgentId) -> bool {
        let n = self.fleet.size;
        let mut seen = vec![false; n];
        seen[from.0] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if self.fleet.is_base(u) {
                return true;
            }
            for (v, bw) in self.links[u.0].iter().enumerate() {
                if !seen[v] && *bw >= self.threshold {
                    seen[v] = true;
                    queue.push_back(AgentId(v));
                }
            }
        }
        false
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TickReport {
    /// Busy time per agent inside the window.
    pub busy: Vec<Millis>,
    /// Runs that finished (completed or failed) inside the window, per agent.
    pub finished: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Duplicate {
    pub task: TaskId,
    pub executors: Vec<AgentId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Anomalies {
    pub duplicates: Vec<Duplicate>,
    pub orphans: Vec<TaskId>,
}

impl Anomalies {
    pub fn is_empty(&self) -> bool {
        self.duplicates.is_empty() && self.orphans.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Execution {
    events: Vec<TimelineEvent>,
}

impl Execution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_events(events: Vec<TimelineEvent>) -> Self {
        Self { events }
    }

    pub fn events(&self) -> &[TimelineEvent] {
        &self.events
    }

    /// Runs executed by `agent`, as it would record them about itself.
    pub fn actions_of(&self, agent: AgentId) -> Vec<ActionEvent> {
        self.events
            .iter()
            .filter(|e| e.executor == agent)
            .map(|e| ActionEvent {
                task: e.task,
                start: e.start,
                end: e.end,
                status: e.status,
            })
            .collect()
    }

    fn busy_until(&self, agent: AgentId) -> Millis {
        self.events
            .iter()
            .filter(|e| e.executor == agent)
            .map(|e| e.end)
            .fold(Millis::ZERO, Millis::max)
    }

    fn ran(&self, agent: AgentId, task: TaskId) -> bool {
        self.events.iter().any(|e| e.executor == agent && e.task == task)
    }

    /// Earliest end among runs of `task` that have not failed.
    fn available_at(&self, task: TaskId) -> Option<Millis> {
        self.events
            .iter()
            .filter(|e| e.task == task && e.status != RunStatus::Failed)
            .map(|e| e.end)
            .min()
    }

    /// Execute everything that can start in `[t0, t1)`. `schedules[i]` is
    /// agent `i`'s current plan.
    pub fn run_window(&mut self, schedules: &[Schedule], truth: &TruthView, t0: Millis, t1: Millis) -> TickReport {
        let n = truth.fleet.size;
        let limit = t1.min(truth.horizon);
        loop {
            let mut best: Option<(Millis, AgentId, TaskId)> = None;
            for agent in truth.fleet.agents() {
                if truth.battery[agent.0].percent() == 0 {
                    continue;
                }
                let Some(schedule) = schedules.get(agent.0) else { continue };
                let free = self.busy_until(agent).max(t0);
                for entry in schedule.entries_for(agent) {
                    if self.ran(agent, entry.task) {
                        continue;
                    }
                    let ready = match entry.task.predecessor() {
                        None => Millis::ZERO,
                        Some(p) => match self.available_at(p) {
                            Some(t) => t,
                            None => continue,
                        },
                    };
                    let start = entry.start.max(free).max(ready);
                    if start >= limit {
                        continue;
                    }
                    let key = (start, agent, entry.task);
                    if best.is_none_or(|b| key < b) {
                        best = Some(key);
                    }
                }
            }
            let Some((start, executor, task)) = best else { break };
            let span = executor_duration(&Task::new(task), truth.battery[executor.0], truth.fleet.is_base(executor))
                .expect("battery checked above");
            self.events.push(TimelineEvent {
                task,
                owner: task.owner,
                executor,
                start,
                end: start + span,
                relocated: executor != task.owner,
                status: RunStatus::Running,
            });
        }

        let mut report = TickReport {
            busy: vec![Millis::ZERO; n],
            finished: vec![0; n],
        };
        for e in &mut self.events {
            let lo = e.start.max(t0);
            let hi = e.end.min(t1);
            if hi > lo {
                report.busy[e.executor.0] = report.busy[e.executor.0] + (hi - lo);
            }
            if e.status == RunStatus::Running && e.end <= t1 {
                let delivered =
                    e.task.chain != ChainKind::Sci || e.task.step != 3 || truth.reaches_base(e.executor);
                e.status = if delivered { RunStatus::Completed } else { RunStatus::Failed };
                report.finished[e.executor.0] += 1;
            }
        }
        report
    }

    /// Tasks run by more than one executor, and (if `final_tick`) tasks the
    /// latest plans still expect but that never completed.
    pub fn anomalies(&self, schedules: &[Schedule], final_tick: bool) -> Anomalies {
        let mut by_task: BTreeMap<TaskId, BTreeSet<AgentId>> = BTreeMap::new();
        for e in &self.events {
            by_task.entry(e.task).or_default().insert(e.executor);
        }
        let duplicates = by_task
            .into_iter()
            .filter(|(_, ex)| ex.len() > 1)
            .map(|(task, ex)| Duplicate {
                task,
                executors: ex.into_iter().collect(),
            })
            .collect();

        let mut orphans = BTreeSet::new();
        if final_tick {
            let done: BTreeSet<TaskId> = self
                .events
                .iter()
                .filter(|e| e.status == RunStatus::Completed)
                .map(|e| e.task)
                .collect();
            for s in schedules {
                orphans.extend(s.entries.iter().map(|e| e.task).filter(|t| !done.contains(t)));
            }
        }
        Anomalies {
            duplicates,
            orphans: orphans.into_iter().collect(),
        }
    }
}
