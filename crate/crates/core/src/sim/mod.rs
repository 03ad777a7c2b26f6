//! Deterministic discrete-tick simulation.
//!
//! Each tick runs, in order: battery and CPU evolution, fault injection and
//! scripted perturbations, link computation, self-observation, one gossip
//! round, replanning, execution of the tick window, and snapshot emission.

pub mod config;
mod engine;
pub mod fault;
pub mod geometry;
pub mod links;
mod propagate;

pub use config::{AgentSpec, MapConfig, Perturbation, Scenario, SimConfig};
pub use engine::{run, Simulation, CPU_WINDOW};
pub use geometry::{Rect, Zone, ZoneKind};
pub use links::{compute_links, LinkMatrix, B_MAX};
pub use propagate::propagate;
