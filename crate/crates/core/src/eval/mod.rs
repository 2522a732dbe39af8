//! Scoring simulated trajectories against references with the entropy of
//! one-step prediction errors.

mod metric;
mod reference;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::agent::{AgentId, AgentState};
use crate::math::{wrap_angle, Vec2};
use crate::navigation::NavConfig;
use crate::sim::{run, step, NoHooks, Scenario, ScenarioError, World};

pub use metric::{entropy_metric, EntropyReport, COVARIANCE_RIDGE, MIN_ERRORS};
pub use reference::{ReferenceTrajectorySet, Resampled, Sidecar, SidecarAgent, REFERENCE_CSV_HEADER};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("covariance is degenerate")]
    DegenerateCovariance,
    #[error("id mismatch: {0}")]
    IdMismatch(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

/// Speed below which a finite-difference heading is not trusted.
const HEADING_MIN_SPEED: f64 = 1e-6;

/// One prediction error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepError {
    pub id: AgentId,
    /// Grid index of the predicted position.
    pub step: usize,
    pub error: Vec2,
}

/// A navigation configuration under a display name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedConfig {
    pub name: String,
    #[serde(default)]
    pub nav: NavConfig,
}

/// Parses a JSON list of named configurations.
pub fn parse_configs(source: &str) -> Result<Vec<NamedConfig>, EvalError> {
    let configs: Vec<NamedConfig> =
        serde_json::from_str(source).map_err(|e| EvalError::Parse(format!("configs: {e}")))?;
    for (i, c) in configs.iter().enumerate() {
        c.nav
            .validate()
            .map_err(|e| EvalError::Parse(format!("configs.{i}: {e}")))?;
    }
    Ok(configs)
}

/// Checks that every reference agent exists in the template with the same
/// type.
pub fn check_ids(reference: &ReferenceTrajectorySet, template: &Scenario) -> Result<(), EvalError> {
    for id in reference.tracks.keys() {
        let Some(agent) = template.agents.iter().find(|a| a.id == *id) else {
            return Err(EvalError::IdMismatch(format!(
                "reference agent {id} is not in the scenario"
            )));
        };
        if let Some(t) = reference.types.get(id) {
            if *t != agent.agent_type {
                return Err(EvalError::IdMismatch(format!(
                    "agent {id} is a {t} in the reference but a {} in the scenario",
                    agent.agent_type
                )));
            }
        }
    }
    Ok(())
}

struct Estimate {
    theta: f64,
    v: f64,
    phi: f64,
}

fn estimate_state(grid: &Resampled, template: &AgentState, k: usize, last_heading: Option<f64>) -> Estimate {
    let id = template.id;
    let vel = grid.velocity(id, k).unwrap_or(Vec2::ZERO);
    let speed = vel.length();
    let heading = if speed > HEADING_MIN_SPEED {
        vel.angle()
    } else {
        last_heading.unwrap_or(template.control.theta())
    };
    let p = &template.dyn_params;
    if !template.is_vehicle() {
        return Estimate {
            theta: heading,
            v: speed.min(p.v_max_type),
            phi: 0.0,
        };
    }
    // The front axle moves along θ + φ; its turn rate gives the steering.
    let heading_at = |j: usize| {
        grid.velocity(id, j)
            .filter(|v| v.length() > HEADING_MIN_SPEED)
            .map(Vec2::angle)
    };
    let prev = k.checked_sub(1).and_then(heading_at);
    let next = heading_at(k + 1);
    let turn_rate = match (prev, next) {
        (Some(a), Some(b)) => wrap_angle(b - a) / (2.0 * grid.tau),
        (None, Some(b)) => wrap_angle(b - heading) / grid.tau,
        (Some(a), None) => wrap_angle(heading - a) / grid.tau,
        (None, None) => 0.0,
    };
    let phi = if speed > HEADING_MIN_SPEED {
        (p.wheelbase * turn_rate / speed)
            .clamp(-1.0, 1.0)
            .asin()
            .clamp(-p.phi_max, p.phi_max)
    } else {
        0.0
    };
    Estimate {
        theta: wrap_angle(heading - phi),
        v: (speed * phi.cos()).min(p.v_max_type),
        phi,
    }
}

/// Errors of single-step predictions: at every grid point each agent starts
/// from its observed state, the world advances one step under `nav`, and the
/// predicted position is compared with the next observation.
pub fn one_step_errors(
    reference: &ReferenceTrajectorySet,
    template: &Scenario,
    nav: &NavConfig,
) -> Result<(Vec<StepError>, usize), EvalError> {
    check_ids(reference, template)?;
    let grid = reference.resample(nav.tau);
    if grid.len < 2 {
        return Err(EvalError::InsufficientData(format!(
            "{} resampled step(s), need at least 2",
            grid.len
        )));
    }
    let mut errors = Vec::new();
    let mut steps = 0;
    let mut headings: BTreeMap<AgentId, f64> = BTreeMap::new();
    for k in 0..grid.len - 1 {
        let mut agents = Vec::new();
        for t in &template.agents {
            let Some(p) = grid.at(t.id, k) else { continue };
            let est = estimate_state(&grid, t, k, headings.get(&t.id).copied());
            headings.insert(t.id, est.theta);
            let goal = reference.goals.get(&t.id).copied().unwrap_or(t.goal);
            let mut a = AgentState::new(
                t.id.0,
                t.shape.clone(),
                t.dyn_params,
                p,
                est.theta,
                goal,
                est.v,
                est.phi,
            );
            a.arrived = p.distance(goal) <= template.goal_radius;
            agents.push(a);
        }
        let mut world = World {
            step: k,
            agents,
            obstacles: template.obstacles.clone(),
            nav: nav.clone(),
            goal_radius: template.goal_radius,
        };
        step(&mut world, &NoHooks);
        let before = errors.len();
        for a in &world.agents {
            if let Some(observed) = grid.at(a.id, k + 1) {
                errors.push(StepError {
                    id: a.id,
                    step: k + 1,
                    error: a.reference_point() - observed,
                });
            }
        }
        steps += usize::from(errors.len() > before);
    }
    Ok((errors, steps))
}

/// Entropy report of `nav` against `reference`.
pub fn evaluate(
    reference: &ReferenceTrajectorySet,
    template: &Scenario,
    nav: &NavConfig,
) -> Result<EntropyReport, EvalError> {
    let (errors, steps) = one_step_errors(reference, template, nav)?;
    let vectors: Vec<Vec2> = errors.iter().map(|e| e.error).collect();
    let mut report = entropy_metric(&vectors)?;
    report.steps_evaluated = steps;
    let mut sums: BTreeMap<u32, (f64, usize)> = BTreeMap::new();
    for e in &errors {
        let s = sums.entry(e.id.0).or_default();
        s.0 += e.error.length();
        s.1 += 1;
    }
    report.per_agent_mean_error = sums.into_iter().map(|(id, (sum, n))| (id, sum / n as f64)).collect();
    Ok(report)
}

/// One report per configuration, in input order.
pub fn compare_algorithms(
    reference: &ReferenceTrajectorySet,
    template: &Scenario,
    configs: &[NamedConfig],
) -> Result<Vec<(String, EntropyReport)>, EvalError> {
    configs
        .iter()
        .map(|c| evaluate(reference, template, &c.nav).map(|r| (c.name.clone(), r)))
        .collect()
}

/// A scenario name, its template and one report per configuration.
pub type TableRow<'a> = (String, &'a Scenario, Vec<(String, EntropyReport)>);

/// Plain-text table: one row per scenario with agent counts and the entropy
/// of every configuration.
pub fn format_table(rows: &[TableRow<'_>]) -> String {
    let names: Vec<&str> = rows
        .first()
        .map(|r| r.2.iter().map(|(n, _)| n.as_str()).collect())
        .unwrap_or_default();
    let mut out = format!(
        "{:<16} {:>8} {:>11} {:>5}",
        "scenario", "vehicles", "pedestrians", "types"
    );
    for n in &names {
        let _ = write!(out, " {n:>12}");
    }
    out.push('\n');
    for (name, scenario, reports) in rows {
        let vehicles = scenario.agents.iter().filter(|a| a.is_vehicle()).count();
        let types: BTreeSet<_> = scenario.agents.iter().map(|a| a.agent_type).collect();
        let _ = write!(
            out,
            "{name:<16} {vehicles:>8} {:>11} {:>5}",
            scenario.agents.len() - vehicles,
            types.len()
        );
        let best = reports.iter().map(|(_, r)| r.entropy).fold(f64::INFINITY, f64::min);
        for (_, r) in reports {
            let mark = if r.entropy == best { "*" } else { " " };
            let _ = write!(out, " {:>11.4}{mark}", r.entropy);
        }
        out.push('\n');
    }
    out
}

/// A reference produced by the simulator itself: goals are jittered by up
/// to `goal_jitter` metres per axis, the scenario runs for `frames` frames at
/// one frame per step, and Gaussian noise of `noise_std` metres is added to
/// every observed position. Returns the jittered template with the
/// reference.
pub fn synthetic_reference(
    template: &Scenario,
    nav: &NavConfig,
    seed: u64,
    frames: usize,
    goal_jitter: f64,
    noise_std: f64,
) -> (Scenario, ReferenceTrajectorySet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scenario = template.clone();
    scenario.nav = nav.clone();
    scenario.duration = frames.saturating_sub(1) as f64 * nav.tau;
    if goal_jitter > 0.0 {
        for a in &mut scenario.agents {
            a.goal += Vec2::new(
                rng.random_range(-goal_jitter..=goal_jitter),
                rng.random_range(-goal_jitter..=goal_jitter),
            );
        }
    }
    let log = run(&scenario);
    let mut reference = ReferenceTrajectorySet::from_log(&log);
    if noise_std > 0.0 {
        let normal = Normal::new(0.0, noise_std).expect("finite noise");
        for track in reference.tracks.values_mut() {
            for (_, p) in track.iter_mut() {
                *p += Vec2::new(normal.sample(&mut rng), normal.sample(&mut rng));
            }
        }
    }
    reference.goals = scenario.agents.iter().map(|a| (a.id, a.goal)).collect();
    (scenario, reference)
}
