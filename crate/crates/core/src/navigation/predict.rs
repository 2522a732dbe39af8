//! Neighbour motion models and the convex-body sets the candidate filter tests
//! against.

use crate::agent::{AgentState, ControlState, Obstacle};
use crate::dynamics::{
    integrate_pedestrian, integrate_vehicle, reachable_ranges, vehicle_rollout, AngleRange, DynamicsError,
    DynamicsParams, VehicleControlState,
};
use crate::geometry::{hull_gap, BoundingCircle, CtmatShape, Disk, DiskHull, Pose};
use crate::math::Vec2;

use super::NavConfig;

/// Slack added to reachable-set envelopes to absorb rounding in the rollouts.
const ENVELOPE_SLACK: f64 = 1e-6;

/// Something the planner must avoid: another agent or a static obstacle.
#[derive(Debug, Clone, Copy)]
pub enum Neighbor<'a> {
    Agent(&'a AgentState),
    Obstacle(&'a Obstacle),
}

impl<'a> Neighbor<'a> {
    pub fn placed_shape(&self) -> CtmatShape {
        match self {
            Neighbor::Agent(a) => a.placed_shape(),
            Neighbor::Obstacle(o) => o.shape.clone(),
        }
    }

    pub fn reference_point(&self) -> Vec2 {
        match self {
            Neighbor::Agent(a) => a.reference_point(),
            Neighbor::Obstacle(o) => o.shape.reference_offset(),
        }
    }

    /// Weight of this neighbour in the distance-keeping term for an agent of
    /// type code `own_code`. Obstacles weigh 1.
    pub fn type_weight(&self, own_code: i32, clamp: bool) -> f64 {
        let w = match self {
            Neighbor::Agent(a) => f64::from(1 + own_code - a.agent_type.code()),
            Neighbor::Obstacle(_) => 1.0,
        };
        if clamp {
            w.max(0.0)
        } else {
            w
        }
    }
}

/// A union of convex disk hulls with bounding circles for cheap rejection.
#[derive(Debug, Clone)]
pub struct Body {
    parts: Vec<(DiskHull, BoundingCircle)>,
    bound: BoundingCircle,
}

impl Body {
    pub fn from_hulls(hulls: impl IntoIterator<Item = DiskHull>) -> Self {
        let parts: Vec<_> = hulls
            .into_iter()
            .map(|h| {
                let b = BoundingCircle::of(&h);
                (h, b)
            })
            .collect();
        let all: Vec<Disk> = parts.iter().map(|(_, b)| Disk::new(b.center, b.radius)).collect();
        let bound = BoundingCircle::of(&all);
        Self { parts, bound }
    }

    pub fn from_shape(shape: &CtmatShape) -> Self {
        Self::from_hulls(shape.hull_slices().map(|s| s.iter().copied().collect()))
    }

    /// True when the gap to `other` is at most `threshold`.
    pub fn within(&self, other: &Body, threshold: f64) -> bool {
        if self.bound.gap_lower_bound(&other.bound) > threshold {
            return false;
        }
        self.parts.iter().any(|(p, bp)| {
            other
                .parts
                .iter()
                .any(|(q, bq)| bp.gap_lower_bound(bq) <= threshold && hull_gap(p, q) <= threshold)
        })
    }

    /// Signed gap: distance when apart, minus the deepest piece penetration
    /// when overlapping.
    pub fn gap(&self, other: &Body) -> f64 {
        let mut best = f64::INFINITY;
        for (p, _) in &self.parts {
            for (q, _) in &other.parts {
                best = best.min(hull_gap(p, q));
            }
        }
        best
    }
}

/// Advances a control state holding `(v, angle)` for `dt`; `angle` is the
/// steering angle for vehicles and the orientation for pedestrians.
pub fn advance_control(
    control: &ControlState,
    params: &DynamicsParams,
    v: f64,
    angle: f64,
    dt: f64,
    substeps: usize,
) -> Result<ControlState, DynamicsError> {
    Ok(match control {
        ControlState::Vehicle(s) => ControlState::Vehicle(integrate_vehicle(*s, params, v, angle, dt, substeps)?),
        ControlState::Pedestrian(s) => ControlState::Pedestrian(integrate_pedestrian(*s, v, angle, dt)),
    })
}

/// Constant-control prediction after `dt` seconds.
pub fn coast(control: &ControlState, params: &DynamicsParams, dt: f64, substeps: usize) -> ControlState {
    let angle = match control {
        ControlState::Vehicle(s) => s.phi.clamp(-params.phi_max, params.phi_max),
        ControlState::Pedestrian(s) => s.theta,
    };
    advance_control(control, params, control.speed().max(0.0), angle, dt, substeps.max(1)).unwrap_or(*control)
}

/// Collision checkpoints over one planning interval: the substep index of the
/// integrator each checkpoint lands on, and its time.
#[derive(Debug, Clone)]
pub struct Checkpoints {
    pub substeps: usize,
    pub entries: Vec<(usize, f64)>,
}

impl Checkpoints {
    pub fn new(cfg: &NavConfig) -> Self {
        let substeps = cfg.integrator_substeps;
        let count = cfg.substeps_collision;
        let entries = (1..=count)
            .map(|k| {
                let j = (k * substeps).div_ceil(count);
                let t = if j == substeps {
                    cfg.tau
                } else {
                    cfg.tau * j as f64 / substeps as f64
                };
                (j, t)
            })
            .collect();
        Self { substeps, entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Own-agent motion under a candidate control: poses at every checkpoint and
/// the final state, computed exactly as the commit integrates it.
#[derive(Debug, Clone)]
pub struct Rollout {
    pub poses: Vec<Pose>,
    pub end: ControlState,
}

pub fn rollout(
    agent: &AgentState,
    v: f64,
    angle: f64,
    cfg: &NavConfig,
    checkpoints: &Checkpoints,
) -> Result<Rollout, DynamicsError> {
    let mut poses = Vec::with_capacity(checkpoints.len());
    let end = match &agent.control {
        ControlState::Vehicle(s) => {
            let mut next = 0;
            let end = vehicle_rollout(
                *s,
                &agent.dyn_params,
                v,
                angle,
                cfg.tau,
                checkpoints.substeps,
                |j, st| {
                    while next < checkpoints.entries.len() && checkpoints.entries[next].0 == j {
                        poses.push(Pose::new(st.p_f, st.theta));
                        next += 1;
                    }
                },
            )?;
            ControlState::Vehicle(end)
        }
        ControlState::Pedestrian(s) => {
            let end = integrate_pedestrian(*s, v, angle, cfg.tau);
            let dir = Vec2::from_angle(angle);
            for &(j, t) in &checkpoints.entries {
                let p = if j == checkpoints.substeps {
                    end.p
                } else {
                    s.p + dir * (v * t)
                };
                poses.push(Pose::new(p, end.theta));
            }
            ControlState::Pedestrian(end)
        }
    };
    Ok(Rollout { poses, end })
}

/// What the planner knows about one neighbour for the current step.
#[derive(Debug, Clone)]
pub struct Track<'a> {
    pub source: Neighbor<'a>,
    pub now: CtmatShape,
    /// Constant-control prediction at the end of the interval.
    pub end_body: Body,
    pub end_reference: Vec2,
    /// Bodies the candidate must stay clear of, one per checkpoint (a single
    /// entry for static obstacles).
    pub keep_out: Vec<Body>,
}

impl Track<'_> {
    pub fn keep_out_at(&self, k: usize) -> &Body {
        &self.keep_out[k.min(self.keep_out.len() - 1)]
    }
}

pub fn build_tracks<'a>(neighbors: &[Neighbor<'a>], cfg: &NavConfig, checkpoints: &Checkpoints) -> Vec<Track<'a>> {
    neighbors
        .iter()
        .map(|n| match n {
            Neighbor::Obstacle(o) => {
                let body = Body::from_shape(&o.shape);
                Track {
                    source: *n,
                    now: o.shape.clone(),
                    end_body: body.clone(),
                    end_reference: o.shape.reference_offset(),
                    keep_out: vec![body],
                }
            }
            Neighbor::Agent(a) => {
                let end = coast(&a.control, &a.dyn_params, cfg.tau, checkpoints.substeps);
                let end_shape = a.shape.place(end.pose());
                let keep_out = checkpoints
                    .entries
                    .iter()
                    .map(|&(j, t)| {
                        if cfg.conservative_neighbors {
                            reachable_envelope(a, cfg, t)
                        } else {
                            let st = coast(&a.control, &a.dyn_params, t, j);
                            Body::from_shape(&a.shape.place(st.pose()))
                        }
                    })
                    .collect();
                Track {
                    source: *n,
                    now: a.placed_shape(),
                    end_body: Body::from_shape(&end_shape),
                    end_reference: end.reference_point(),
                    keep_out,
                }
            }
        })
        .collect()
}

/// Speed and steering limits a neighbour can command during this step.
fn command_limits(agent: &AgentState, cfg: &NavConfig) -> (f64, Option<(f64, f64)>) {
    let p = &agent.dyn_params;
    if !cfg.dynamics {
        let steer = agent.is_vehicle().then_some((-p.phi_max, p.phi_max));
        return (p.v_max_type.max(agent.control.speed()), steer);
    }
    let r = reachable_ranges(&agent.control, p, cfg.tau);
    let steer = match r.angle {
        AngleRange::Steering(i) => Some((i.lo, i.hi)),
        AngleRange::FullCircle => None,
    };
    (r.speed.hi, steer)
}

/// Region covering every placement the neighbour can reach within `t`
/// seconds under any admissible command, including stopping in place.
pub fn reachable_envelope(agent: &AgentState, cfg: &NavConfig, t: f64) -> Body {
    let (v_hi, steer) = command_limits(agent, cfg);
    let reach_len = v_hi * t;
    match (&agent.control, steer) {
        (ControlState::Vehicle(vs), Some((phi_lo, phi_hi))) => {
            vehicle_envelope(vs, &agent.shape, &agent.dyn_params, reach_len, phi_lo, phi_hi)
        }
        _ => {
            let r = agent.shape.reach() + reach_len + ENVELOPE_SLACK;
            Body::from_hulls([std::iter::once(Disk::new(agent.reference_point(), r)).collect()])
        }
    }
}

fn vehicle_envelope(
    vs: &VehicleControlState,
    shape: &CtmatShape,
    params: &DynamicsParams,
    s: f64,
    phi_lo: f64,
    phi_hi: f64,
) -> Body {
    let wheelbase = params.wheelbase;
    let curv = vs.phi.tan() / wheelbase;
    let dcurv = (phi_lo.tan() - vs.phi.tan())
        .abs()
        .max((phi_hi.tan() - vs.phi.tan()).abs())
        / wheelbase;
    let start = shape.place(Pose::new(vs.p_f, vs.theta));
    let lever = start
        .disks()
        .iter()
        .map(|d| d.center.distance(vs.p_r))
        .fold(0.0, f64::max);

    // Sweeps over more than a quarter turn fall back to a disk around the
    // rear axle that no body point can leave.
    if s * (curv.abs() + dcurv) > std::f64::consts::FRAC_PI_2 {
        let r = start
            .disks()
            .iter()
            .map(|d| d.center.distance(vs.p_r) + d.radius)
            .fold(0.0, f64::max)
            + s * (1.0 + lever * (curv.abs() + dcurv))
            + ENVELOPE_SLACK;
        return Body::from_hulls([std::iter::once(Disk::new(vs.p_r, r)).collect()]);
    }

    let turn = s * curv;
    let theta_end = vs.theta + turn;
    let half = 0.5 * turn;
    let chord = if half.abs() < 1e-9 { s } else { s * half.sin() / half };
    let rear_end = vs.p_r + Vec2::from_angle(vs.theta + half) * chord;
    let front_end = rear_end + Vec2::from_angle(theta_end) * wheelbase;
    let end = shape.place(Pose::new(front_end, theta_end));

    let sag = (1.0 + lever * curv.abs()) * s * s * curv.abs() / 8.0;
    let inflate = sag + 0.5 * s * s * dcurv + lever * s * dcurv + ENVELOPE_SLACK;
    Body::from_hulls(start.hull_slices().zip(end.hull_slices()).map(|(a, b)| {
        a.iter()
            .chain(b)
            .map(|d| Disk::new(d.center, d.radius + inflate))
            .collect()
    }))
}
