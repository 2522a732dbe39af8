//! Control sampling, the collision filter and the cost function.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::agent::{AgentState, ControlState};
use crate::dynamics::{reachable_ranges, v_max_centripetal, AngleRange, Interval};
use crate::math::{wrap_angle, Vec2};

use super::predict::{rollout, Body, Checkpoints, Rollout, Track};
use super::{NavConfig, NavError};

/// Margin kept between the candidate footprint and every keep-out body.
pub const COLLISION_MARGIN: f64 = 1e-6;

/// One candidate `(v, φ)` for vehicles or `(v, θ)` for pedestrians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlSample {
    /// Position in the sampling grid (row-major, speed outer).
    pub index: usize,
    pub v: f64,
    pub phi_or_theta: f64,
    pub collision_free: bool,
    pub cost_terms: [f64; 5],
    pub total_cost: f64,
}

impl ControlSample {
    pub fn new(index: usize, v: f64, phi_or_theta: f64) -> Self {
        Self {
            index,
            v,
            phi_or_theta,
            collision_free: false,
            cost_terms: [0.0; 5],
            total_cost: f64::INFINITY,
        }
    }
}

fn linspace(range: Interval, n: usize) -> Vec<f64> {
    if range.span() <= 0.0 || n < 2 {
        return vec![range.lo];
    }
    (0..n)
        .map(|i| {
            if i + 1 == n {
                range.hi
            } else {
                range.lo + range.span() * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Speed and angle axes of the sampling grid.
pub fn sampling_axes(
    agent: &AgentState,
    cfg: &NavConfig,
    preferred_angle: f64,
) -> Result<(Vec<f64>, Vec<f64>), NavError> {
    let p = &agent.dyn_params;
    let (speed, angle) = if cfg.dynamics {
        let r = reachable_ranges(&agent.control, p, cfg.tau);
        (r.speed, r.angle)
    } else {
        let angle = if agent.is_vehicle() {
            AngleRange::Steering(Interval::new(-p.phi_max, p.phi_max))
        } else {
            AngleRange::FullCircle
        };
        (Interval::new(0.0, p.v_max_type), angle)
    };
    let angles = match angle {
        AngleRange::Steering(i) => {
            if speed.span() <= 0.0 && i.span() <= 0.0 {
                return Err(NavError::EmptyRange);
            }
            linspace(i, cfg.samples_phi)
        }
        // Orientations step evenly around the preferred one, covering
        // (θ^o − π, θ^o + π].
        AngleRange::FullCircle => {
            let n = cfg.samples_phi;
            (1..=n)
                .map(|j| wrap_angle(preferred_angle - PI + TAU * j as f64 / n as f64))
                .collect()
        }
    };
    Ok((linspace(speed, cfg.samples_v), angles))
}

/// Even grid over the reachable control box, speed-major. Vehicle samples
/// faster than the cornering limit at their steering angle are dropped.
pub fn sample_controls(
    agent: &AgentState,
    cfg: &NavConfig,
    preferred_angle: f64,
) -> Result<Vec<ControlSample>, NavError> {
    let (speeds, angles) = sampling_axes(agent, cfg, preferred_angle)?;
    let check_corner = cfg.dynamics && agent.is_vehicle();
    let mut out = Vec::with_capacity(speeds.len() * angles.len());
    for (i, &v) in speeds.iter().enumerate() {
        for (j, &a) in angles.iter().enumerate() {
            if check_corner && v > v_max_centripetal(a, &agent.dyn_params) {
                continue;
            }
            out.push(ControlSample::new(i * angles.len() + j, v, a));
        }
    }
    Ok(out)
}

/// Whether the candidate stays clear of every track at every checkpoint.
pub(crate) fn is_collision_free(agent: &AgentState, roll: &Rollout, tracks: &[Track<'_>]) -> bool {
    if tracks.is_empty() {
        return true;
    }
    for (k, pose) in roll.poses.iter().enumerate() {
        let body = Body::from_shape(&agent.shape.place(*pose));
        if tracks.iter().any(|t| body.within(t.keep_out_at(k), COLLISION_MARGIN)) {
            return false;
        }
    }
    true
}

/// Inputs to the cost function that do not depend on the sample.
#[derive(Debug, Clone, Copy)]
pub struct CostContext {
    pub v_o: f64,
    pub angle_o: f64,
    pub goal: Vec2,
}

fn angle_gap(agent: &AgentState, a: f64, b: f64) -> f64 {
    if agent.is_vehicle() {
        a - b
    } else {
        wrap_angle(a - b)
    }
}

/// Fills the five cost terms and the weighted total of a candidate given its
/// rollout.
pub(crate) fn fill_costs(
    agent: &AgentState,
    sample: &mut ControlSample,
    end: &ControlState,
    tracks: &[Track<'_>],
    ctx: &CostContext,
    cfg: &NavConfig,
) {
    let dv = sample.v - ctx.v_o;
    let da = angle_gap(agent, sample.phi_or_theta, ctx.angle_o);
    let f1 = dv * dv + da * da;
    let f2 =
        (sample.v - agent.prev_control.v).abs() + angle_gap(agent, sample.phi_or_theta, agent.prev_control.angle).abs();

    let p = end.reference_point();
    let own_code = agent.agent_type.code();
    let mut f3 = 0.0;
    let mut f4 = 0.0;
    if !tracks.is_empty() {
        let body = Body::from_shape(&agent.shape.place(end.pose()));
        for t in tracks {
            f3 -= t.source.type_weight(own_code, cfg.f3_clamp_nonnegative) * p.distance(t.end_reference);
            f4 -= body.gap(&t.end_body);
        }
    }
    let f5 = p.distance(ctx.goal);
    sample.cost_terms = [f1, f2, f3, f4, f5];
    sample.total_cost = cfg.weights.combine(&sample.cost_terms);
}

/// Runs the filter and cost evaluation over `samples`, returning them with
/// flags and costs set. Samples whose rollout fails are marked colliding.
pub(crate) fn assess(
    agent: &AgentState,
    samples: &mut [ControlSample],
    tracks: &[Track<'_>],
    ctx: &CostContext,
    cfg: &NavConfig,
    checkpoints: &Checkpoints,
) {
    for s in samples.iter_mut() {
        let Ok(roll) = rollout(agent, s.v, s.phi_or_theta, cfg, checkpoints) else {
            s.collision_free = false;
            continue;
        };
        s.collision_free = is_collision_free(agent, &roll, tracks);
        if s.collision_free {
            fill_costs(agent, s, &roll.end, tracks, ctx, cfg);
        }
    }
}

fn tie_order(a: &ControlSample, b: &ControlSample) -> Ordering {
    a.total_cost
        .total_cmp(&b.total_cost)
        .then(a.cost_terms[0].total_cmp(&b.cost_terms[0]))
        .then(a.phi_or_theta.abs().total_cmp(&b.phi_or_theta.abs()))
        .then(a.v.total_cmp(&b.v))
        .then(a.index.cmp(&b.index))
}

/// Cheapest candidate; ties go to the smaller preference distance, then the
/// smaller angle magnitude, then the slower speed, then grid order.
pub fn select_control(candidates: &[ControlSample]) -> Result<ControlSample, NavError> {
    candidates
        .iter()
        .filter(|c| c.collision_free)
        .min_by(|a, b| tie_order(a, b))
        .copied()
        .ok_or(NavError::NoCandidate)
}
