use std::path::PathBuf;
use std::sync::OnceLock;

use worldsync_core::analytics::{chain_trace, TaskAbstraction};
use worldsync_core::diff::detect_desync;
use worldsync_core::sim::{self, Scenario, SimConfig, ZoneKind};
use worldsync_core::snapshot::Snapshot;
use worldsync_core::AgentId;

fn load(name: &str) -> SimConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.toml"));
    SimConfig::load(&path).unwrap()
}

fn runs() -> &'static [(SimConfig, Vec<Snapshot>); 3] {
    static RUNS: OnceLock<[(SimConfig, Vec<Snapshot>); 3]> = OnceLock::new();
    RUNS.get_or_init(|| {
        ["allsync", "isolated", "bipartition"].map(|n| {
            let c = load(n);
            let s = sim::run(c.clone()).unwrap();
            (c, s)
        })
    })
}

#[test]
fn zero_horizon_emits_nothing() {
    let mut c = load("allsync");
    c.horizon = 0;
    assert!(sim::run(c).unwrap().is_empty());
}

#[test]
fn links_stay_symmetric() {
    for (_, snaps) in runs() {
        assert!(snaps.iter().all(|s| s.links.is_symmetric()));
    }
}

#[test]
fn snapshots_are_self_consistent() {
    for (cfg, snaps) in runs() {
        let fleet = cfg.fleet().unwrap();
        for s in snaps {
            assert_eq!(s.recompute_diffs(&cfg.tolerance).unwrap(), s.diffs, "tick {}", s.tick);
            assert_eq!(s.recompute_summary(&fleet, cfg.quadrant_band).unwrap(), s.summary);
            assert!(s.summary.tasks.iter().all(TaskAbstraction::respects_precedence));
            assert_eq!(s.true_states.len(), cfg.n_agents);
        }
    }
}

#[test]
fn freshness_is_monotone_over_a_run() {
    for (_, snaps) in runs() {
        for pair in snaps.windows(2) {
            for (a, b) in pair[0].worldviews.iter().zip(&pair[1].worldviews) {
                assert!(a.freshness.iter().zip(&b.freshness).all(|(x, y)| y >= x));
            }
        }
    }
}

#[test]
fn isolated_target_loses_radio_at_fault_tick() {
    let (cfg, snaps) = &runs()[1];
    let Scenario::IsolatedAgent { target, at_tick } = cfg.scenario else { panic!() };
    for s in snaps {
        let on = s.true_states[target.0].radio_enabled;
        assert_eq!(on, s.tick < at_tick, "tick {}", s.tick);
        if !on {
            assert!(s.links.row(target.0).iter().all(|b| *b == 0));
        }
    }
}

#[test]
fn bipartition_cuts_cross_links_and_draws_a_strip() {
    let (cfg, snaps) = &runs()[2];
    let Scenario::Bipartition { cut, at_tick } = &cfg.scenario else { panic!() };
    for s in snaps.iter().filter(|s| s.tick >= *at_tick) {
        for i in 0..cfg.n_agents {
            for j in 0..cfg.n_agents {
                if cut.contains(&AgentId(i)) != cut.contains(&AgentId(j)) {
                    assert!(s.links.get(i, j) <= 1);
                }
            }
        }
        let strips = s.zones.iter().filter(|z| z.kind == ZoneKind::CommCutoff).count();
        assert_eq!(strips, 1, "tick {}", s.tick);
    }
    assert!(snaps[..*at_tick as usize].iter().all(|s| s.zones.len() == cfg.map.zones.len()));
}

#[test]
fn desync_harm_tracks_detection() {
    for (cfg, snaps) in runs() {
        let ever_desynced = snaps.iter().any(|s| !detect_desync(&s.diffs).unwrap().in_sync);
        let last = snaps.last().unwrap();
        let harmed = !last.anomalies.is_empty();
        assert_eq!(harmed, ever_desynced, "{:?}", cfg.scenario);
    }
}

#[test]
fn bipartition_duplicates_relocated_work() {
    let (_, snaps) = &runs()[2];
    let last = snaps.last().unwrap();
    assert!(!last.anomalies.duplicates.is_empty());
    for d in &last.anomalies.duplicates {
        let runs: Vec<_> = last.events.iter().filter(|e| e.task == d.task).collect();
        assert!(runs.len() >= 2);
        assert!(d.task.relocatable());
    }
}

#[test]
fn bipartition_warns_with_complement_sets() {
    let (_, snaps) = &runs()[2];
    let last = snaps.last().unwrap();
    assert!(last.summary.sync_warning);
    let expected = vec![[0, 6, 7, 8, 9].map(AgentId).to_vec(), [1, 2, 3, 4, 5].map(AgentId).to_vec()];
    for sets in last.summary.contrarian_sets.values() {
        assert_eq!(sets, &expected);
    }
    let bt = last.summary.mini_dwc.iter().find(|m| m.code == "BT").unwrap();
    assert!(bt.columns.iter().all(|c| c.difference_sum == 0 || c.difference_sum == 5));
}

#[test]
fn all_sync_case_study() {
    let (cfg, snaps) = &runs()[0];
    let fleet = cfg.fleet().unwrap();
    assert!(snaps.iter().all(|s| !s.summary.sync_warning));
    for pair in snaps.windows(2) {
        let (a, b) = (pair[0].summary.science_fractions.unwrap(), pair[1].summary.science_fractions.unwrap());
        assert!((0..3).all(|k| b[k] >= a[k]));
    }
    let last = snaps.last().unwrap();
    assert_eq!(last.summary.eligible, [1, 3, 5, 6].map(AgentId).to_vec());
    let trace = chain_trace("5.sci", &last.events, &fleet).unwrap();
    let step2 = trace.events.iter().find(|e| e.task.step == 2).unwrap();
    assert_eq!(step2.executor, AgentId(4));
    assert!(step2.relocated);
    assert!(trace.events.iter().all(|e| e.task.step != 3), "chain stays partial");
    assert!(trace.events.windows(2).all(|w| w[0].start <= w[1].start && w[0].task.step < w[1].task.step));
}
