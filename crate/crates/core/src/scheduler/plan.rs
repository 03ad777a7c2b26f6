//! Deterministic greedy list scheduler.
//!
//! The planner sees only one worldview. It never consults the worldview's
//! owner, so equal beliefs always give equal plans regardless of who holds
//! them. Placement runs in three passes:
//!
//! 1. every pending navigation step goes on its owner, earliest first;
//! 2. owners believed to sit in a science zone hand navigation steps 2–3 to a
//!    helper (base station, then agents outside science zones) reachable over
//!    a believed link, picking the earliest finish;
//! 3. science chains are packed on their owners, and steps 2–3 move to a
//!    helper when the owner cannot finish them inside the horizon. Step 3
//!    also needs a believed route to the base station.
//!
//! Ties always go to the base station, then to the lowest agent id.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::agent::{AgentId, Fleet};
use crate::task::{ChainId, ChainKind, RunStatus, TaskId};
use crate::time::Millis;
use crate::worldview::Worldview;

use super::chains::{executor_duration, Task, TaskChain};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanContext {
    /// Nothing new is placed before this instant.
    pub now: Millis,
    /// End of the mission; optional work must finish by then.
    pub horizon: Millis,
    /// Minimum bandwidth for a link to carry data.
    pub threshold: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub task: TaskId,
    pub executor: AgentId,
    pub start: Millis,
    pub end: Millis,
    pub relocated: bool,
}

impl ScheduleEntry {
    fn new(task: TaskId, executor: AgentId, start: Millis, end: Millis) -> Self {
        Self {
            task,
            executor,
            start,
            end,
            relocated: executor != task.owner,
        }
    }
}

/// A mandatory chain the planner could not complete within the horizon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Infeasibility {
    pub chain: ChainId,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub computed_by: AgentId,
    pub from_worldview_hash: String,
    pub planned_at: Millis,
    pub entries: Vec<ScheduleEntry>,
    pub infeasible: Vec<Infeasibility>,
}

impl Schedule {
    /// Equality of everything except who computed it.
    pub fn same_plan(&self, other: &Schedule) -> bool {
        self.from_worldview_hash == other.from_worldview_hash
            && self.planned_at == other.planned_at
            && self.entries == other.entries
            && self.infeasible == other.infeasible
    }

    pub fn entries_for(&self, executor: AgentId) -> impl Iterator<Item = &ScheduleEntry> {
        self.entries.iter().filter(move |e| e.executor == executor)
    }

    pub fn entry(&self, task: TaskId) -> Option<&ScheduleEntry> {
        self.entries.iter().find(|e| e.task == task)
    }
}

pub fn compute_schedule(
    wv: &Worldview,
    fleet: &Fleet,
    chains: &[TaskChain],
    ctx: &PlanContext,
) -> Schedule {
    let mut p = Planner::new(wv, fleet, ctx);
    p.place_navigation();
    p.relocate_navigation();
    for chain in chains.iter().filter(|c| c.id.kind == ChainKind::Sci) {
        p.place_science(chain);
    }
    p.finish()
}

struct Planner<'a> {
    wv: &'a Worldview,
    fleet: &'a Fleet,
    ctx: &'a PlanContext,
    /// Believed executions already completed or running.
    fixed: Vec<ScheduleEntry>,
    /// Believed end of a task that needs no placement.
    settled: BTreeMap<TaskId, (AgentId, Millis)>,
    placed: BTreeMap<TaskId, ScheduleEntry>,
    free_at: Vec<Millis>,
    /// Agents with a believed multi-hop route to the base station.
    reaches_base: Vec<bool>,
    infeasible: Vec<Infeasibility>,
}

impl<'a> Planner<'a> {
    fn new(wv: &'a Worldview, fleet: &'a Fleet, ctx: &'a PlanContext) -> Self {
        let n = fleet.size;
        let mut free_at = vec![ctx.now; n];
        let mut fixed = Vec::new();
        let mut settled: BTreeMap<TaskId, (AgentId, Millis)> = BTreeMap::new();
        let mut completed: BTreeMap<TaskId, (AgentId, Millis)> = BTreeMap::new();

        for (e, record) in wv.records.iter().enumerate() {
            let executor = AgentId(e);
            for a in &record.actions {
                match a.status {
                    RunStatus::Completed => {
                        fixed.push(ScheduleEntry::new(a.task, executor, a.start, a.end));
                        let slot = completed.entry(a.task).or_insert((executor, a.end));
                        if a.end < slot.1 {
                            *slot = (executor, a.end);
                        }
                    }
                    RunStatus::Running => {
                        fixed.push(ScheduleEntry::new(a.task, executor, a.start, a.end));
                        free_at[e] = free_at[e].max(a.end);
                        let slot = settled.entry(a.task).or_insert((executor, a.end));
                        if a.end < slot.1 {
                            *slot = (executor, a.end);
                        }
                    }
                    RunStatus::Failed => {}
                }
            }
        }
        // A completion outranks any concurrent duplicate still running.
        settled.extend(completed);

        let mut planner = Self {
            wv,
            fleet,
            ctx,
            fixed,
            settled,
            placed: BTreeMap::new(),
            free_at,
            reaches_base: Vec::new(),
            infeasible: Vec::new(),
        };
        planner.reaches_base = planner.route_to_base();
        planner
    }

    fn link(&self, from: AgentId, to: AgentId) -> u32 {
        self.wv.about(from).comm.get(to.0).copied().unwrap_or(0)
    }

    fn linked(&self, from: AgentId, to: AgentId) -> bool {
        from == to || self.link(from, to) >= self.ctx.threshold
    }

    fn route_to_base(&self) -> Vec<bool> {
        let n = self.fleet.size;
        let mut reach = vec![false; n];
        let base = self.fleet.base;
        reach[base.0] = true;
        let mut queue = VecDeque::from([base]);
        while let Some(v) = queue.pop_front() {
            for u in self.fleet.agents() {
                if !reach[u.0] && self.link(u, v) >= self.ctx.threshold {
                    reach[u.0] = true;
                    queue.push_back(u);
                }
            }
        }
        reach
    }

    fn eligible(&self, a: AgentId) -> bool {
        self.wv.about(a).battery.percent() > 0
    }

    fn span(&self, task: TaskId, executor: AgentId) -> Option<Millis> {
        let t = Task::new(task);
        executor_duration(&t, self.wv.about(executor).battery, self.fleet.is_base(executor)).ok()
    }

    /// End time and executor of a task, settled or placed.
    fn known_end(&self, task: TaskId) -> Option<(AgentId, Millis)> {
        self.settled
            .get(&task)
            .copied()
            .or_else(|| self.placed.get(&task).map(|e| (e.executor, e.end)))
    }

    fn needs_placement(&self, task: TaskId) -> bool {
        !self.settled.contains_key(&task)
    }

    /// `Some(ready time)` once the predecessor is settled or placed; step 1 is
    /// always ready.
    fn ready_at(&self, task: TaskId) -> Option<Millis> {
        match task.predecessor() {
            None => Some(self.ctx.now),
            Some(p) => self.known_end(p).map(|(_, end)| end),
        }
    }

    fn source_of(&self, task: TaskId) -> Option<AgentId> {
        match task.predecessor() {
            None => Some(task.owner),
            Some(p) => self.known_end(p).map(|(e, _)| e),
        }
    }

    /// Where a run of `tasks` in sequence would sit on `executor`, given the
    /// current cursors. Returns `None` if the executor cannot run them.
    fn trial(&self, tasks: &[TaskId], executor: AgentId) -> Option<Vec<ScheduleEntry>> {
        if !self.eligible(executor) {
            return None;
        }
        let mut cursor = self.free_at[executor.0].max(self.ctx.now);
        let mut out: Vec<ScheduleEntry> = Vec::with_capacity(tasks.len());
        for &task in tasks {
            let ready = match out.last() {
                Some(prev) => prev.end,
                None => self.ready_at(task)?,
            };
            let start = cursor.max(ready);
            let end = start + self.span(task, executor)?;
            out.push(ScheduleEntry::new(task, executor, start, end));
            cursor = end;
        }
        Some(out)
    }

    fn commit(&mut self, entries: Vec<ScheduleEntry>) {
        for e in entries {
            self.free_at[e.executor.0] = self.free_at[e.executor.0].max(e.end);
            self.placed.insert(e.task, e);
        }
    }

    /// Candidate helpers in preference order: base station, then the given
    /// agents in ascending id.
    fn candidates(&self, others: impl Iterator<Item = AgentId>, exclude: AgentId) -> Vec<AgentId> {
        let mut c = vec![self.fleet.base];
        c.extend(others.filter(|a| *a != exclude && !self.fleet.is_base(*a)));
        c.retain(|a| *a != exclude);
        c
    }

    /// Earliest-finishing trial among candidates, keeping the first on ties.
    fn best_trial(
        &self,
        tasks: &[TaskId],
        candidates: &[AgentId],
        accept: impl Fn(AgentId) -> bool,
    ) -> Option<Vec<ScheduleEntry>> {
        let mut best: Option<Vec<ScheduleEntry>> = None;
        for &h in candidates {
            if !accept(h) {
                continue;
            }
            let Some(entries) = self.trial(tasks, h) else { continue };
            let end = entries.last().map(|e| e.end).unwrap_or(self.ctx.now);
            if end > self.ctx.horizon {
                continue;
            }
            let better = best
                .as_ref()
                .is_none_or(|b| end < b.last().map(|e| e.end).unwrap_or(self.ctx.now));
            if better {
                best = Some(entries);
            }
        }
        best
    }

    fn place_navigation(&mut self) {
        for owner in self.fleet.workers() {
            let chain = ChainId {
                owner,
                kind: ChainKind::Nav,
            };
            let pending: Vec<TaskId> = chain.steps().filter(|t| self.needs_placement(*t)).collect();
            if pending.is_empty() {
                continue;
            }
            // Steps after a helper's running step stay with that helper.
            let executor = match pending[0].predecessor().and_then(|p| self.settled.get(&p)) {
                Some((e, _)) if pending[0].relocatable() => *e,
                _ => owner,
            };
            match self.trial(&pending, executor) {
                Some(entries) => {
                    let end = entries.last().expect("non-empty").end;
                    if end > self.ctx.horizon {
                        self.infeasible.push(Infeasibility {
                            chain,
                            reason: format!("finishes at {end}, after the horizon {}", self.ctx.horizon),
                        });
                    }
                    self.commit(entries);
                }
                None => self.infeasible.push(Infeasibility {
                    chain,
                    reason: format!("agent {} has an empty battery", self.fleet.label(executor)),
                }),
            }
        }
    }

    fn relocate_navigation(&mut self) {
        for owner in self.fleet.workers() {
            if !self.wv.about(owner).science_zone {
                continue;
            }
            let chain = ChainId {
                owner,
                kind: ChainKind::Nav,
            };
            let suffix: Vec<TaskId> = chain
                .steps()
                .filter(|t| t.relocatable() && self.placed.get(t).is_some_and(|e| e.executor == owner))
                .collect();
            if suffix.is_empty() {
                continue;
            }
            // Lift the suffix off the owner before trying helpers.
            let lifted: Vec<ScheduleEntry> = suffix.iter().filter_map(|t| self.placed.remove(t)).collect();
            self.recompute_cursor(owner);
            let Some(source) = self.source_of(suffix[0]) else {
                self.commit(lifted);
                continue;
            };
            let idle = self.fleet.workers().filter(|a| !self.wv.about(*a).science_zone);
            let candidates = self.candidates(idle, owner);
            match self.best_trial(&suffix, &candidates, |h| self.linked(source, h)) {
                Some(entries) => self.commit(entries),
                None => self.commit(lifted),
            }
        }
    }

    fn recompute_cursor(&mut self, agent: AgentId) {
        let running = self.fixed.iter().filter(|e| e.executor == agent).map(|e| e.end);
        let placed = self.placed.values().filter(|e| e.executor == agent).map(|e| e.end);
        self.free_at[agent.0] = running.chain(placed).fold(self.ctx.now, Millis::max);
    }

    fn place_science(&mut self, chain: &TaskChain) {
        let owner = chain.id.owner;
        for task in chain.tasks.iter().map(|t| t.id) {
            if !self.needs_placement(task) {
                continue;
            }
            let Some(source) = self.source_of(task) else { return };
            let is_delivery = task.step == 3;
            let acceptable = |h: AgentId| self.linked(source, h) && (!is_delivery || self.reaches_base[h.0]);

            // Owner first, as long as it fits.
            if acceptable(owner) {
                if let Some(entries) = self.trial(&[task], owner) {
                    if entries[0].end <= self.ctx.horizon {
                        self.commit(entries);
                        continue;
                    }
                }
            }
            if !task.relocatable() {
                return;
            }
            let candidates = self.candidates(self.fleet.workers(), owner);
            match self.best_trial(&[task], &candidates, acceptable) {
                Some(entries) => self.commit(entries),
                None => return,
            }
        }
    }

    fn finish(self) -> Schedule {
        let mut entries = self.fixed;
        entries.extend(self.placed.into_values());
        entries.sort_by_key(|e| (e.start, e.executor, e.task));
        Schedule {
            computed_by: self.wv.owner,
            from_worldview_hash: self.wv.digest(),
            planned_at: self.ctx.now,
            entries,
            infeasible: self.infeasible,
        }
    }
}
