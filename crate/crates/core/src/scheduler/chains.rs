use serde::{Deserialize, Serialize};

use crate::agent::Fleet;
use crate::error::{Error, Result};
use crate::task::{ChainId, ChainKind, TaskId};
use crate::time::Millis;
use crate::worldview::{Level, Worldview};

/// The base station's faster processor runs any task in half the time.
pub const BASE_SPEEDUP: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub id: TaskId,
    pub relocatable: bool,
    pub nominal: Millis,
}

impl Task {
    pub fn new(id: TaskId) -> Self {
        Self {
            id,
            relocatable: id.relocatable(),
            nominal: id.chain.nominal(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskChain {
    pub id: ChainId,
    pub tasks: [Task; 3],
    pub mandatory: bool,
}

impl TaskChain {
    pub fn new(id: ChainId) -> Self {
        Self {
            id,
            tasks: [1, 2, 3].map(|s| Task::new(id.step(s))),
            mandatory: id.kind.mandatory(),
        }
    }
}

/// One navigation chain per non-base agent, plus a science chain for each
/// non-base agent the worldview places in a science zone. Sorted by owner,
/// navigation before science.
pub fn build_task_set(wv: &Worldview, fleet: &Fleet) -> Vec<TaskChain> {
    let mut chains = Vec::new();
    for owner in fleet.workers() {
        chains.push(TaskChain::new(ChainId {
            owner,
            kind: ChainKind::Nav,
        }));
        if wv.about(owner).science_zone {
            chains.push(TaskChain::new(ChainId {
                owner,
                kind: ChainKind::Sci,
            }));
        }
    }
    chains
}

/// Time a task takes on an ordinary agent at the given battery percentage.
///
/// The slowdown factor is piecewise linear: 1 at 100%, 2 at 50%, 4 at 10%,
/// and stays at 4 below that. All products land on whole milliseconds for
/// grid battery levels.
pub fn duration(task: &Task, battery_percent: u8) -> Result<Millis> {
    let b = u64::from(battery_percent.min(100));
    if b == 0 {
        return Err(Error::IneligibleExecutor);
    }
    let nominal = task.nominal.0;
    let ms = if b >= 50 {
        nominal * (150 - b) / 50
    } else if b >= 10 {
        nominal * (90 - b) / 20
    } else {
        nominal * 4
    };
    Ok(Millis(ms))
}

pub fn executor_duration(task: &Task, battery: Level, on_base: bool) -> Result<Millis> {
    let d = duration(task, battery.percent())?;
    Ok(if on_base { Millis(d.0 / BASE_SPEEDUP) } else { d })
}
