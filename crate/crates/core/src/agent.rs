//! Agent-level domain types shared by the planner and the simulator.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{DynamicsParams, PedestrianControlState, VehicleControlState};
use crate::geometry::{CtmatShape, Pose};
use crate::math::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub u32);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Road-agent class. The discriminant is the type code used by the
/// distance-keeping cost term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentType {
    Pedestrian = 1,
    Bicycle = 2,
    Tricycle = 3,
    Car = 4,
}

impl AgentType {
    pub const ALL: [AgentType; 4] = [
        AgentType::Pedestrian,
        AgentType::Bicycle,
        AgentType::Tricycle,
        AgentType::Car,
    ];

    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn is_vehicle(self) -> bool {
        self != AgentType::Pedestrian
    }

    pub fn name(self) -> &'static str {
        match self {
            AgentType::Pedestrian => "pedestrian",
            AgentType::Bicycle => "bicycle",
            AgentType::Tricycle => "tricycle",
            AgentType::Car => "car",
        }
    }
}

impl fmt::Display for AgentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AgentType::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown agent type '{s}'"))
    }
}

/// Behaviour label derived from the selected control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Behavior {
    #[default]
    GoAhead,
    TurnLeft,
    TurnRight,
    Wait,
}

impl Behavior {
    pub fn as_str(self) -> &'static str {
        match self {
            Behavior::GoAhead => "go_ahead",
            Behavior::TurnLeft => "turn_left",
            Behavior::TurnRight => "turn_right",
            Behavior::Wait => "wait",
        }
    }
}

impl FromStr for Behavior {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Behavior::GoAhead,
            Behavior::TurnLeft,
            Behavior::TurnRight,
            Behavior::Wait,
        ]
        .into_iter()
        .find(|b| b.as_str() == s)
        .ok_or_else(|| format!("unknown behavior '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlState {
    Vehicle(VehicleControlState),
    Pedestrian(PedestrianControlState),
}

impl ControlState {
    /// Front axle for vehicles, shape midpoint for pedestrians.
    pub fn reference_point(&self) -> Vec2 {
        match self {
            ControlState::Vehicle(s) => s.p_f,
            ControlState::Pedestrian(s) => s.p,
        }
    }

    pub fn theta(&self) -> f64 {
        match self {
            ControlState::Vehicle(s) => s.theta,
            ControlState::Pedestrian(s) => s.theta,
        }
    }

    pub fn speed(&self) -> f64 {
        match self {
            ControlState::Vehicle(s) => s.v,
            ControlState::Pedestrian(s) => s.v,
        }
    }

    pub fn steering(&self) -> Option<f64> {
        match self {
            ControlState::Vehicle(s) => Some(s.phi),
            ControlState::Pedestrian(_) => None,
        }
    }

    /// Steering for vehicles, orientation for pedestrians.
    pub fn control_angle(&self) -> f64 {
        match self {
            ControlState::Vehicle(s) => s.phi,
            ControlState::Pedestrian(s) => s.theta,
        }
    }

    pub fn pose(&self) -> Pose {
        Pose::new(self.reference_point(), self.theta())
    }
}

/// Previously selected `(v′, φ′)` or `(v′, θ′)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PrevControl {
    pub v: f64,
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub id: AgentId,
    pub agent_type: AgentType,
    /// Body-frame footprint.
    pub shape: CtmatShape,
    pub control: ControlState,
    pub goal: Vec2,
    pub prev_control: PrevControl,
    pub behavior: Behavior,
    pub dyn_params: DynamicsParams,
    pub arrived: bool,
}

impl AgentState {
    /// Agent at rest-or-moving with its reference point at `position`. The
    /// steering angle is ignored for pedestrians.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: u32,
        shape: CtmatShape,
        dyn_params: DynamicsParams,
        position: Vec2,
        theta: f64,
        goal: Vec2,
        v: f64,
        phi: f64,
    ) -> Self {
        let agent_type = dyn_params.agent_type;
        let control = if agent_type.is_vehicle() {
            ControlState::Vehicle(VehicleControlState::from_front(
                position,
                theta,
                v,
                phi,
                dyn_params.wheelbase,
            ))
        } else {
            ControlState::Pedestrian(PedestrianControlState { v, theta, p: position })
        };
        Self {
            id: AgentId(id),
            agent_type,
            shape,
            control,
            goal,
            prev_control: PrevControl {
                v,
                angle: control.control_angle(),
            },
            behavior: Behavior::GoAhead,
            dyn_params,
            arrived: false,
        }
    }

    pub fn reference_point(&self) -> Vec2 {
        self.control.reference_point()
    }

    pub fn pose(&self) -> Pose {
        self.control.pose()
    }

    pub fn placed_shape(&self) -> CtmatShape {
        self.shape.place(self.pose())
    }

    pub fn is_vehicle(&self) -> bool {
        self.agent_type.is_vehicle()
    }
}

/// Static obstacle, already placed in world coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Obstacle {
    pub id: u32,
    pub shape: CtmatShape,
}
