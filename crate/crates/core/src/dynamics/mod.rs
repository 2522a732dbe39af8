//! Per-type kinematic models, state integration and dynamics-derived bounds.

mod bounds;
mod integrate;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::agent::AgentType;
use crate::math::Vec2;

pub use bounds::{
    reachable_ranges, steering_map, v_max_braking, v_max_centripetal, v_max_combined, AngleRange, Interval,
    LinearSteering, ReachableRanges, SteeringMap,
};
pub use integrate::{integrate_pedestrian, integrate_vehicle, vehicle_rollout};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("invalid control: {0}")]
    InvalidControl(String),
    #[error("time step must be positive and finite with at least one substep")]
    InvalidStep,
    #[error("invalid {agent_type} parameters: {reason}")]
    InvalidParams { agent_type: AgentType, reason: String },
}

/// Physical limits of one road-agent type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsParams {
    pub agent_type: AgentType,
    /// Wheelbase in metres; unused for pedestrians.
    #[serde(alias = "L")]
    pub wheelbase: f64,
    pub phi_max: f64,
    pub v_max_type: f64,
    pub a_throttle: f64,
    pub a_brake: f64,
    pub phi_rate_max: f64,
    pub steer_gain: f64,
    pub g: f64,
    pub mu: f64,
    pub t_react: f64,
}

/// Partial parameter set used by scenario files to override the calibration
/// defaults of a type.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsOverrides {
    #[serde(alias = "L", skip_serializing_if = "Option::is_none")]
    pub wheelbase: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_max_type: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_throttle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_brake: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_rate_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steer_gain: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_react: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CalibrationEntry {
    wheelbase: f64,
    phi_max: f64,
    v_max_type: f64,
    a_throttle: f64,
    a_brake: f64,
    phi_rate_max: f64,
    steer_gain: f64,
    #[serde(default = "default_g")]
    g: f64,
    #[serde(default = "default_mu")]
    mu: f64,
    #[serde(default = "default_t_react")]
    t_react: f64,
}

fn default_g() -> f64 {
    9.8
}

fn default_mu() -> f64 {
    0.7
}

fn default_t_react() -> f64 {
    1.5
}

const CALIBRATION: &str = include_str!("calibration.json");

fn calibration() -> &'static BTreeMap<AgentType, DynamicsParams> {
    static TABLE: OnceLock<BTreeMap<AgentType, DynamicsParams>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let raw: BTreeMap<AgentType, CalibrationEntry> =
            serde_json::from_str(CALIBRATION).expect("embedded calibration table is valid JSON");
        raw.into_iter()
            .map(|(t, e)| {
                let p = DynamicsParams {
                    agent_type: t,
                    wheelbase: e.wheelbase,
                    phi_max: e.phi_max,
                    v_max_type: e.v_max_type,
                    a_throttle: e.a_throttle,
                    a_brake: e.a_brake,
                    phi_rate_max: e.phi_rate_max,
                    steer_gain: e.steer_gain,
                    g: e.g,
                    mu: e.mu,
                    t_react: e.t_react,
                };
                (t, p)
            })
            .collect()
    })
}

impl DynamicsParams {
    /// Shipped calibration defaults for `agent_type`.
    pub fn defaults(agent_type: AgentType) -> Self {
        calibration()[&agent_type]
    }

    pub fn with_overrides(mut self, o: &DynamicsOverrides) -> Self {
        let fields = [
            (&mut self.wheelbase, o.wheelbase),
            (&mut self.phi_max, o.phi_max),
            (&mut self.v_max_type, o.v_max_type),
            (&mut self.a_throttle, o.a_throttle),
            (&mut self.a_brake, o.a_brake),
            (&mut self.phi_rate_max, o.phi_rate_max),
            (&mut self.steer_gain, o.steer_gain),
            (&mut self.g, o.g),
            (&mut self.mu, o.mu),
            (&mut self.t_react, o.t_react),
        ];
        for (slot, value) in fields {
            if let Some(v) = value {
                *slot = v;
            }
        }
        self
    }

    pub fn is_vehicle(&self) -> bool {
        self.agent_type.is_vehicle()
    }

    /// `g·μ`, the friction-limited deceleration.
    pub fn friction_decel(&self) -> f64 {
        self.g * self.mu
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let bad = |reason: &str| DynamicsError::InvalidParams {
            agent_type: self.agent_type,
            reason: reason.to_string(),
        };
        let positive = [
            ("v_max_type", self.v_max_type),
            ("a_throttle", self.a_throttle),
            ("a_brake", self.a_brake),
            ("g", self.g),
            ("mu", self.mu),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(bad(&format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.t_react.is_finite() && self.t_react >= 0.0) {
            return Err(bad("t_react must be non-negative"));
        }
        if self.is_vehicle() {
            if !(self.wheelbase.is_finite() && self.wheelbase > 0.0) {
                return Err(bad("wheelbase must be positive"));
            }
            if !(self.phi_max > 0.0 && self.phi_max < std::f64::consts::FRAC_PI_2) {
                return Err(bad("phi_max must lie in (0, π/2)"));
            }
            if !(self.phi_rate_max.is_finite() && self.phi_rate_max > 0.0) {
                return Err(bad("phi_rate_max must be positive"));
            }
            if !(self.steer_gain.is_finite() && self.steer_gain > 0.0) {
                return Err(bad("steer_gain must be positive"));
            }
        }
        Ok(())
    }
}

/// Kinematic state of a vehicle. `p_f` is the front-axle reference point and
/// `p_r` the rear axle the simple-car ODE is written for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleControlState {
    pub v: f64,
    pub phi: f64,
    pub theta: f64,
    pub p_f: Vec2,
    pub p_r: Vec2,
    pub u_t: f64,
    pub u_phi: f64,
}

impl VehicleControlState {
    /// Builds a state from the front reference point, deriving the rear axle.
    pub fn from_front(p_f: Vec2, theta: f64, v: f64, phi: f64, wheelbase: f64) -> Self {
        Self {
            v,
            phi,
            theta,
            p_f,
            p_r: p_f - Vec2::from_angle(theta) * wheelbase,
            u_t: 0.0,
            u_phi: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PedestrianControlState {
    pub v: f64,
    pub theta: f64,
    pub p: Vec2,
}
