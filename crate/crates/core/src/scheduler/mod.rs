//! Shared-world scheduling.
//!
//! Every agent runs [`compute_schedule`] on its own worldview to produce a plan
//! for the whole fleet, then the [`Execution`] ledger applies each agent's own
//! entries against ground truth. Identical worldviews give identical plans;
//! divergent ones surface as duplicated or orphaned tasks.

mod chains;
mod execute;
mod plan;

pub use chains::{build_task_set, duration, executor_duration, Task, TaskChain, BASE_SPEEDUP};
pub use execute::{Anomalies, Duplicate, Execution, TickReport, TimelineEvent, TruthView};
pub use plan::{compute_schedule, Infeasibility, PlanContext, Schedule, ScheduleEntry};
