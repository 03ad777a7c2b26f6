//! Shared-world multi-robot simulation and worldview difference analysis.
//!
//! Every agent in a shared-world fleet keeps a [`Worldview`]: its own state plus
//! what it presumes about every other agent. Each agent plans a schedule for the
//! whole fleet from that worldview and executes only its own slice, so any
//! divergence between worldviews turns into duplicated or missed work.
//!
//! The crate is split along that pipeline:
//!
//! - [`worldview`] and [`diff`]: the belief model, per-attribute matrices, the
//!   Difference Matrix classification and desynchronization detection.
//! - [`sim`]: a deterministic discrete-tick simulator with links, gossip-style
//!   belief propagation and fault injection.
//! - [`scheduler`]: task chains, the greedy shared-world planner and the
//!   executor that applies each agent's plan against ground truth.
//! - [`analytics`]: summary structures derived from snapshots.
//! - [`snapshot`] and [`runlog`]: the persisted, replayable run format.

pub mod agent;
pub mod analytics;
pub mod diff;
pub mod error;
pub mod runlog;
pub mod scheduler;
pub mod sim;
pub mod snapshot;
pub mod task;
pub mod time;
pub mod worldview;

pub use agent::{AgentId, Fleet};
pub use error::{Error, Result};
pub use time::Millis;
pub use worldview::{AttributeKind, AttributeValue, Level, Worldview};
