//! Swarm propagation: agent-level Monte Carlo moves, exact density
//! propagation, swarm events and scenario execution.

mod run;
mod scenario;
mod swarm;

pub use run::{
    propagate_density, run_scenario, MatrixAudit, MetricsRow, RunOptions, ScenarioOutput, Simulation, Snapshot,
};
pub use scenario::{Mode, Scenario};
pub use swarm::{apply_event, step_agents, Event, EventKind, StreamFamily, SwarmState};
