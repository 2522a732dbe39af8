//! Preferred speed: clearance-limited caps and the occlusion look-ahead.

use serde::{Deserialize, Serialize};

use crate::agent::AgentState;
use crate::dynamics::v_max_combined;
use crate::geometry::{minkowski_sum, ray_entry, CtmatShape};
use crate::math::Vec2;

use super::fans::{fans_from_shapes, heading_window, in_free_space};
use super::predict::{coast, Neighbor};
use super::NavConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeedMode {
    Normal,
    Stop,
    SpeedUp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreferredCommand {
    pub v_o: f64,
    pub mode: SpeedMode,
}

/// How far the agent's own footprint can translate along `direction` before
/// touching any of `others`, capped at `cap`.
pub fn forward_clearance<'s>(
    own: &CtmatShape,
    direction: Vec2,
    others: impl IntoIterator<Item = &'s CtmatShape>,
    cap: f64,
) -> f64 {
    let mut best = cap;
    for other in others {
        let sum = minkowski_sum(own, other, true);
        for piece in &sum.pieces {
            if let Some(s) = ray_entry(piece, Vec2::ZERO, direction) {
                best = best.min(s);
            }
        }
    }
    best
}

/// Chooses `v_o` from the speed cap at the preferred steering and the
/// look-ahead rule: stop when `h` is blocked now but clears within
/// `kappa`, speed up when it is free now but will be blocked.
pub fn prediction_adjust(
    agent: &AgentState,
    neighbors: &[Neighbor<'_>],
    h: Vec2,
    preferred_angle: f64,
    cfg: &NavConfig,
) -> PreferredCommand {
    let now: Vec<CtmatShape> = neighbors.iter().map(Neighbor::placed_shape).collect();
    let v_max = speed_cap(agent, &now, preferred_angle, cfg);
    prediction_adjust_with(agent, neighbors, &now, h, v_max, cfg)
}

/// Speed cap at the preferred steering given the current neighbour shapes.
pub(crate) fn speed_cap(agent: &AgentState, now: &[CtmatShape], preferred_angle: f64, cfg: &NavConfig) -> f64 {
    let p = &agent.dyn_params;
    if !cfg.dynamics {
        return p.v_max_type;
    }
    let heading = Vec2::from_angle(agent.control.theta());
    let clear = forward_clearance(&agent.placed_shape(), heading, now, cfg.detection_radius);
    v_max_combined(preferred_angle, clear, p)
}

pub(crate) fn prediction_adjust_with(
    agent: &AgentState,
    neighbors: &[Neighbor<'_>],
    now: &[CtmatShape],
    h: Vec2,
    v_max: f64,
    cfg: &NavConfig,
) -> PreferredCommand {
    let viewpoint = agent.reference_point();
    let heading = agent.control.theta();
    let window = heading_window(agent, cfg);
    let min_width = cfg.sigma * agent.shape.width();

    let free_now = in_free_space(
        &fans_from_shapes(viewpoint, heading, window, now, cfg.detection_radius),
        h,
        min_width,
    );
    let substeps = ((cfg.integrator_substeps as f64) * cfg.kappa / cfg.tau).ceil() as usize;
    let later: Vec<CtmatShape> = neighbors
        .iter()
        .map(|n| match n {
            Neighbor::Agent(a) => a
                .shape
                .place(coast(&a.control, &a.dyn_params, cfg.kappa, substeps).pose()),
            Neighbor::Obstacle(o) => o.shape.clone(),
        })
        .collect();
    let free_later = in_free_space(
        &fans_from_shapes(viewpoint, heading, window, &later, cfg.detection_radius),
        h,
        min_width,
    );

    match (free_now, free_later) {
        (false, true) => PreferredCommand {
            v_o: 0.0,
            mode: SpeedMode::Stop,
        },
        (true, false) => PreferredCommand {
            v_o: (cfg.speedup_factor * v_max / 2.0).min(v_max),
            mode: SpeedMode::SpeedUp,
        },
        _ => PreferredCommand {
            v_o: v_max / 2.0,
            mode: SpeedMode::Normal,
        },
    }
}
