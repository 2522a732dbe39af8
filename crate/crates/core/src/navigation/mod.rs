//! The per-agent decision pipeline: fan spaces, preferred direction and speed,
//! control sampling, the collision filter and cost-based selection.

mod config;
mod fans;
mod predict;
mod sampling;
mod speed;

use crate::agent::{AgentState, Behavior};
use crate::dynamics::{LinearSteering, SteeringMap};
use crate::geometry::CtmatShape;
use crate::math::{wrap_angle, Vec2};

pub use config::{CostWeights, NavConfig};
pub use fans::{compute_fan_spaces, fans_from_shapes, heading_window, in_free_space, preferred_direction, FanSpace};
pub use predict::{
    advance_control, build_tracks, coast, reachable_envelope, rollout, Body, Checkpoints, Neighbor, Rollout, Track,
};
pub use sampling::{sample_controls, sampling_axes, select_control, ControlSample, CostContext, COLLISION_MARGIN};
pub use speed::{forward_clearance, prediction_adjust, PreferredCommand, SpeedMode};

/// Speed below which an agent is labelled as waiting.
pub const WAIT_SPEED: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NavError {
    #[error("{path}: {msg}")]
    InvalidConfig { path: String, msg: String },
    #[error("reachable control range is degenerate")]
    EmptyRange,
    #[error("no collision-free candidate")]
    NoCandidate,
}

/// Result of one planning step for one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanOutcome {
    /// Selected speed.
    pub v: f64,
    /// Selected steering angle (vehicles) or orientation (pedestrians).
    pub angle: f64,
    pub behavior: Behavior,
    /// No candidate survived the filter and the agent stops in place.
    pub emergency: bool,
    pub preferred_direction: Vec2,
    pub preferred_angle: f64,
    pub preferred: PreferredCommand,
    pub selected: Option<ControlSample>,
    /// Every candidate with its filter flag and costs.
    pub samples: Vec<ControlSample>,
}

/// Runs the collision filter on `samples` against `neighbors`.
pub fn filter_collision_free(
    agent: &AgentState,
    samples: &[ControlSample],
    neighbors: &[Neighbor<'_>],
    cfg: &NavConfig,
) -> Vec<ControlSample> {
    let checkpoints = Checkpoints::new(cfg);
    let tracks = build_tracks(neighbors, cfg, &checkpoints);
    samples
        .iter()
        .map(|s| {
            let mut s = *s;
            s.collision_free = rollout(agent, s.v, s.phi_or_theta, cfg, &checkpoints)
                .map(|r| sampling::is_collision_free(agent, &r, &tracks))
                .unwrap_or(false);
            s
        })
        .collect()
}

/// Fills the cost terms of one sample.
pub fn evaluate_cost(
    agent: &AgentState,
    sample: &ControlSample,
    neighbors: &[Neighbor<'_>],
    cfg: &NavConfig,
    ctx: &CostContext,
) -> ControlSample {
    let checkpoints = Checkpoints::new(cfg);
    let tracks = build_tracks(neighbors, cfg, &checkpoints);
    let mut s = *sample;
    if let Ok(r) = rollout(agent, s.v, s.phi_or_theta, cfg, &checkpoints) {
        sampling::fill_costs(agent, &mut s, &r.end, &tracks, ctx, cfg);
    }
    s
}

/// Behaviour label for a selected control.
pub fn behavior_for(agent: &AgentState, v: f64, angle: f64) -> Behavior {
    if v < WAIT_SPEED {
        return Behavior::Wait;
    }
    let (turn, threshold) = if agent.is_vehicle() {
        (angle, 0.1 * agent.dyn_params.phi_max)
    } else {
        (wrap_angle(angle - agent.control.theta()), 0.1)
    };
    if turn > threshold {
        Behavior::TurnLeft
    } else if turn < -threshold {
        Behavior::TurnRight
    } else {
        Behavior::GoAhead
    }
}

/// Plans one step with the default steering map.
pub fn plan_step(agent: &AgentState, neighbors: &[Neighbor<'_>], cfg: &NavConfig) -> PlanOutcome {
    plan_step_with(agent, neighbors, cfg, &LinearSteering)
}

/// Plans one step for `agent` against a frozen view of its neighbours.
pub fn plan_step_with(
    agent: &AgentState,
    neighbors: &[Neighbor<'_>],
    cfg: &NavConfig,
    steering: &dyn SteeringMap,
) -> PlanOutcome {
    let position = agent.reference_point();
    let theta = agent.control.theta();
    let heading = Vec2::from_angle(theta);
    let to_goal = agent.goal - position;
    let h = to_goal.try_normalize().unwrap_or(heading);

    let now: Vec<CtmatShape> = neighbors.iter().map(Neighbor::placed_shape).collect();
    let fans = compute_fan_spaces(agent, &now, cfg);
    let direction = preferred_direction(position, agent.shape.width(), &fans, h, cfg);
    let preferred_angle = if agent.is_vehicle() {
        steering.steer(heading, direction, &agent.dyn_params)
    } else {
        direction.angle()
    };

    let v_max = speed::speed_cap(agent, &now, preferred_angle, cfg);
    let mut preferred = speed::prediction_adjust_with(agent, neighbors, &now, h, v_max, cfg);
    // Do not aim past the goal within one interval.
    preferred.v_o = preferred.v_o.min(to_goal.length() / cfg.tau);

    let mut samples = match sample_controls(agent, cfg, preferred_angle) {
        Ok(s) if !s.is_empty() => s,
        _ => vec![ControlSample::new(
            0,
            agent.control.speed(),
            agent.control.control_angle(),
        )],
    };
    let checkpoints = Checkpoints::new(cfg);
    let tracks = build_tracks(neighbors, cfg, &checkpoints);
    let ctx = CostContext {
        v_o: preferred.v_o,
        angle_o: preferred_angle,
        goal: agent.goal,
    };
    sampling::assess(agent, &mut samples, &tracks, &ctx, cfg, &checkpoints);

    let selected = select_control(&samples).ok();
    let (v, angle, emergency) = match &selected {
        Some(s) => (s.v, s.phi_or_theta, false),
        None => (0.0, agent.control.control_angle(), true),
    };
    PlanOutcome {
        v,
        angle,
        behavior: behavior_for(agent, v, angle),
        emergency,
        preferred_direction: direction,
        preferred_angle,
        preferred,
        selected,
        samples,
    }
}
