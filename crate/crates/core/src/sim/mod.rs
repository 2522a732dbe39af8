//! World state, the lockstep simulation loop, scenarios and trajectory logs.

mod log;
mod scenario;
mod world;

pub use log::{Arrival, AuditEvent, Party, TrajectoryLog, TrajectoryRecord, CSV_HEADER};
pub use scenario::{
    default_reference, load_scenario, load_scenario_with_overrides, AgentDoc, ObstacleDoc, Scenario, ScenarioDoc,
    ScenarioError,
};
pub use world::{
    audit, neighbors_of, run, run_with_hooks, simulate, step, worker_pool, NoHooks, StepHooks, StepReport, World,
    THREADS_ENV,
};
