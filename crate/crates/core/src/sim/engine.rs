use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::agent::{AgentId, Fleet};
use crate::analytics::summary_overview;
use crate::diff::monitored_matrices;
use crate::error::Result;
use crate::scheduler::{
    build_task_set, compute_schedule, Execution, PlanContext, Schedule, TickReport, TruthView,
};
use crate::snapshot::{Snapshot, TrueAgentState};
use crate::time::Millis;
use crate::worldview::{AgentRecord, Level, Point, Worldview};

use super::config::{AgentSpec, SimConfig};
use super::fault;
use super::geometry::{Zone, ZoneKind};
use super::links::{compute_links, LinkMatrix};
use super::propagate::propagate;

/// Ticks averaged into an agent's reported CPU load.
pub const CPU_WINDOW: usize = 5;

pub struct Simulation {
    config: SimConfig,
    fleet: Fleet,
    tick: u64,
    truth: Vec<TrueAgentState>,
    cpu_history: Vec<VecDeque<u8>>,
    worldviews: Vec<Worldview>,
    schedules: Vec<Option<Schedule>>,
    execution: Execution,
    last_report: Option<TickReport>,
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let fleet = config.fleet()?;
        let specs = initial_agents(&config);
        let truth = specs
            .iter()
            .enumerate()
            .map(|(i, s)| TrueAgentState {
                id: AgentId(i),
                position: Point::new(s.x, s.y),
                battery: s.battery,
                cpu: Level::EMPTY,
                radio_enabled: true,
                science_zone: false,
                avg_cpu: 0.0,
            })
            .collect();
        Ok(Self {
            fleet,
            tick: 0,
            truth,
            cpu_history: vec![VecDeque::new(); config.n_agents],
            worldviews: Vec::new(),
            schedules: vec![None; config.n_agents],
            execution: Execution::new(),
            last_report: None,
            config,
        })
    }

    pub fn fleet(&self) -> &Fleet {
        &self.fleet
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn is_done(&self) -> bool {
        self.tick >= self.config.horizon
    }

    /// Advance one tick. Returns `None` once the horizon is reached.
    pub fn step(&mut self) -> Result<Option<Snapshot>> {
        if self.is_done() {
            return Ok(None);
        }
        let tick = self.tick;
        let n = self.config.n_agents;
        let t0 = Millis(tick * self.config.tick_ms);
        let t1 = Millis((tick + 1) * self.config.tick_ms);

        self.evolve();

        let radios = fault::radios(&self.config.scenario, n, tick);
        for (s, on) in self.truth.iter_mut().zip(&radios) {
            s.radio_enabled = *on;
        }
        for p in fault::due(&self.config.perturbations, tick) {
            let s = &mut self.truth[p.agent.0];
            if let Some(b) = p.set_battery {
                s.battery = b;
            }
            if let Some(q) = p.move_to {
                s.position = q;
            }
        }

        let positions: Vec<Point> = self.truth.iter().map(|s| s.position).collect();
        let mut zones: Vec<Zone> = self.config.map.zones.clone();
        let cut = fault::active_cut(&self.config.scenario, tick);
        if let Some(cut) = cut {
            zones.extend(fault::separator(&positions, cut, self.config.map.width, self.config.map.height));
        }
        for s in &mut self.truth {
            s.science_zone = zones
                .iter()
                .any(|z| z.kind == ZoneKind::Science && z.rect.contains(s.position));
        }
        let mut links = compute_links(&positions, &zones, &radios, self.config.map.diagonal());
        if let Some(cut) = cut {
            fault::sever(&mut links, cut);
        }

        self.observe(&links, tick)?;
        self.worldviews = propagate(&self.worldviews, &links, self.config.propagation_threshold);
        self.replan(t0);

        let battery: Vec<Level> = self.truth.iter().map(|s| s.battery).collect();
        let schedules: Vec<Schedule> = self.schedules.iter().flatten().cloned().collect();
        let truth = TruthView {
            fleet: &self.fleet,
            battery: &battery,
            links: links.rows(),
            threshold: self.config.propagation_threshold,
            horizon: self.config.horizon_time(),
        };
        let report = self.execution.run_window(&schedules, &truth, t0, t1);
        self.last_report = Some(report);

        let diffs = monitored_matrices(&self.worldviews, &self.config.tolerance)?;
        let events = self.execution.events().to_vec();
        let summary = summary_overview(&self.truth, &events, &diffs, &self.fleet, self.config.quadrant_band)?;
        let anomalies = self.execution.anomalies(&schedules, tick + 1 == self.config.horizon);
        self.tick += 1;
        Ok(Some(Snapshot {
            tick,
            time: t1,
            true_states: self.truth.clone(),
            links,
            zones,
            worldviews: self.worldviews.clone(),
            schedules,
            events,
            diffs,
            summary,
            anomalies,
        }))
    }

    /// Battery drains one grid step per run finished last tick; CPU load is
    /// the busy share of last tick.
    fn evolve(&mut self) {
        let tick_ms = self.config.tick_ms;
        let report = self.last_report.take();
        for (i, s) in self.truth.iter_mut().enumerate() {
            let (busy, finished) = report
                .as_ref()
                .map_or((0, 0), |r| (r.busy[i].0, r.finished[i]));
            for _ in 0..finished {
                s.battery = s.battery.step_down();
            }
            s.cpu = Level::quantize(100.0 * busy as f64 / tick_ms as f64);
            let hist = &mut self.cpu_history[i];
            hist.push_back(s.cpu.percent());
            while hist.len() > CPU_WINDOW {
                hist.pop_front();
            }
            s.avg_cpu = hist.iter().map(|c| f64::from(*c)).sum::<f64>() / hist.len() as f64;
        }
    }

    fn record_of(&self, i: usize, links: &LinkMatrix) -> AgentRecord {
        let s = &self.truth[i];
        AgentRecord {
            location: s.position,
            science_zone: s.science_zone,
            battery: s.battery,
            cpu: s.cpu,
            actions: self.execution.actions_of(AgentId(i)),
            comm: links.row(i).to_vec(),
        }
    }

    /// Every agent refreshes its own record. On the first tick everyone also
    /// starts with the true state of the whole fleet.
    fn observe(&mut self, links: &LinkMatrix, tick: u64) -> Result<()> {
        let n = self.config.n_agents;
        let records: Vec<AgentRecord> = (0..n).map(|i| self.record_of(i, links)).collect();
        if self.worldviews.is_empty() {
            self.worldviews = (0..n)
                .map(|i| Worldview::new(AgentId(i), records.clone(), tick))
                .collect::<Result<_>>()?;
            return Ok(());
        }
        for (i, (wv, rec)) in self.worldviews.iter_mut().zip(records).enumerate() {
            wv.records[i] = rec;
            wv.freshness[i] = tick;
        }
        Ok(())
    }

    fn replan(&mut self, now: Millis) {
        let ctx = PlanContext {
            now,
            horizon: self.config.horizon_time(),
            threshold: self.config.propagation_threshold,
        };
        for (wv, slot) in self.worldviews.iter().zip(self.schedules.iter_mut()) {
            let digest = wv.digest();
            if slot.as_ref().is_some_and(|s| s.from_worldview_hash == digest) {
                continue;
            }
            let chains = build_task_set(wv, &self.fleet);
            *slot = Some(compute_schedule(wv, &self.fleet, &chains, &ctx));
        }
    }
}

fn initial_agents(config: &SimConfig) -> Vec<AgentSpec> {
    if !config.agents.is_empty() {
        return config.agents.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..config.n_agents)
        .map(|_| {
            let x: f64 = rng.random_range(0.0..=config.map.width);
            let y: f64 = rng.random_range(0.0..=config.map.height);
            let steps: u8 = rng.random_range(5..=10);
            AgentSpec {
                x: (x * 10.0).round() / 10.0,
                y: (y * 10.0).round() / 10.0,
                battery: Level::new(steps * Level::STEP).expect("on grid"),
            }
        })
        .collect()
}

/// Run a configuration to its horizon.
pub fn run(config: SimConfig) -> Result<Vec<Snapshot>> {
    let mut sim = Simulation::new(config)?;
    let mut out = Vec::new();
    while let Some(s) = sim.step()? {
        out.push(s);
    }
    Ok(out)
}
