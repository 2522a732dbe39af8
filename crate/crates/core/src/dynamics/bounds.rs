use std::fmt::Debug;

use super::DynamicsParams;
use crate::agent::ControlState;
use crate::math::{signed_angle, Vec2};

/// Maps the current heading and the preferred direction to a steering angle.
pub trait SteeringMap: Debug + Send + Sync {
    fn steer(&self, heading: Vec2, preferred: Vec2, params: &DynamicsParams) -> f64;
}

/// `clamp(gain · signed_angle(heading → preferred), ±phi_max)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LinearSteering;

impl SteeringMap for LinearSteering {
    fn steer(&self, heading: Vec2, preferred: Vec2, params: &DynamicsParams) -> f64 {
        (params.steer_gain * signed_angle(heading, preferred)).clamp(-params.phi_max, params.phi_max)
    }
}

/// Default steering map.
pub fn steering_map(heading: Vec2, preferred: Vec2, params: &DynamicsParams) -> f64 {
    LinearSteering.steer(heading, preferred, params)
}

/// Friction-limited cornering speed on the rear-axle turning circle.
pub fn v_max_centripetal(phi: f64, params: &DynamicsParams) -> f64 {
    let tan = phi.tan().abs();
    if tan == 0.0 {
        return f64::INFINITY;
    }
    let radius = params.wheelbase / tan;
    (params.friction_decel() * radius).sqrt()
}

/// Largest speed that can still be brought to rest within `clear` metres,
/// counting the reaction distance.
pub fn v_max_braking(clear: f64, params: &DynamicsParams) -> f64 {
    if clear <= 0.0 {
        return 0.0;
    }
    if clear.is_infinite() {
        return f64::INFINITY;
    }
    let gm = params.friction_decel();
    let t = params.t_react;
    // Rationalised root of v²/(2gμ) + t·v − l = 0; avoids cancellation for small l.
    2.0 * clear / (t + (t * t + 2.0 * clear / gm).sqrt())
}

pub fn v_max_combined(phi: f64, clear: f64, params: &DynamicsParams) -> f64 {
    let cap = v_max_braking(clear, params).min(params.v_max_type);
    if params.is_vehicle() {
        cap.min(v_max_centripetal(phi, params))
    } else {
        cap
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn span(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleRange {
    /// Reachable steering angles of a vehicle.
    Steering(Interval),
    /// Pedestrians may face any direction in `(-π, π]`.
    FullCircle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachableRanges {
    pub speed: Interval,
    pub angle: AngleRange,
}

/// Controls reachable from the current state within `tau` seconds of maximum
/// throttle, brake and steering rate.
pub fn reachable_ranges(s: &ControlState, params: &DynamicsParams, tau: f64) -> ReachableRanges {
    let v = s.speed();
    let lo = (v - params.a_brake * tau).max(0.0);
    let hi = (v + params.a_throttle * tau).min(params.v_max_type).max(lo);
    let angle = match s {
        ControlState::Vehicle(vs) => {
            let reach = params.phi_rate_max * tau;
            let lo = (vs.phi - reach).max(-params.phi_max);
            let hi = (vs.phi + reach).min(params.phi_max);
            AngleRange::Steering(Interval::new(lo, hi.max(lo)))
        }
        ControlState::Pedestrian(_) => AngleRange::FullCircle,
    };
    ReachableRanges {
        speed: Interval::new(lo, hi),
        angle,
    }
}
