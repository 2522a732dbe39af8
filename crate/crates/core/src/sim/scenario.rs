//! Scenario documents: parsing, defaults, validation and dotted-path overrides.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::agent::{AgentState, AgentType, Obstacle};
use crate::dynamics::{DynamicsOverrides, DynamicsParams};
use crate::geometry::{shapes_overlap, CtmatShape, Disk, Pose};
use crate::math::Vec2;
use crate::navigation::{NavConfig, NavError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{path}: {msg}")]
    Validation { path: String, msg: String },
    #[error("unknown override path '{0}'")]
    UnknownOverride(String),
    #[error("malformed override '{0}', expected key=value")]
    MalformedOverride(String),
}

impl ScenarioError {
    fn invalid(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Self::Validation {
            path: path.into(),
            msg: msg.into(),
        }
    }
}

impl From<NavError> for ScenarioError {
    fn from(e: NavError) -> Self {
        match e {
            NavError::InvalidConfig { path, msg } => Self::Validation { path, msg },
            other => Self::invalid("nav", other.to_string()),
        }
    }
}

/// One agent entry of a scenario document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentDoc {
    pub id: u32,
    #[serde(rename = "type")]
    pub agent_type: String,
    /// Body-frame disks `[x, y, r]`, x pointing forward.
    pub disks: Vec<Disk>,
    /// World position of the reference point.
    pub position: Vec2,
    pub theta: f64,
    pub goal: Vec2,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    /// Body-frame reference point; defaults to the front axle for vehicles
    /// and the bounding-box centre for pedestrians.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_offset: Option<Vec2>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<u32>,
    pub disks: Vec<Disk>,
    #[serde(default)]
    pub position: Vec2,
    #[serde(default)]
    pub theta: f64,
}

fn default_duration() -> f64 {
    60.0
}

fn default_goal_radius() -> f64 {
    0.5
}

/// Scenario file as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    #[serde(default)]
    pub agents: Vec<AgentDoc>,
    #[serde(default)]
    pub obstacles: Vec<ObstacleDoc>,
    #[serde(default)]
    pub agent_types: BTreeMap<String, DynamicsOverrides>,
    #[serde(default)]
    pub nav: NavConfig,
    #[serde(default = "default_duration")]
    pub duration: f64,
    #[serde(default = "default_goal_radius")]
    pub goal_radius: f64,
    #[serde(default)]
    pub seed: u64,
}

/// A validated scenario ready to simulate.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub agents: Vec<AgentState>,
    pub obstacles: Vec<Obstacle>,
    pub nav: NavConfig,
    pub agent_types: BTreeMap<AgentType, DynamicsParams>,
    pub duration: f64,
    pub goal_radius: f64,
    pub seed: u64,
    /// The document the scenario was built from, with every default filled.
    pub effective: ScenarioDoc,
}

/// Parses and validates a scenario document.
pub fn load_scenario(source: &str) -> Result<Scenario, ScenarioError> {
    load_scenario_with_overrides(source, &[])
}

/// Parses a scenario, applies `key=value` overrides addressed by dotted paths
/// into the effective document (for example `nav.sigma=2`), then validates.
pub fn load_scenario_with_overrides(source: &str, overrides: &[String]) -> Result<Scenario, ScenarioError> {
    let doc: ScenarioDoc = serde_json::from_str(source).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    if overrides.is_empty() {
        return Scenario::from_doc(doc);
    }
    let effective = effective_doc(&doc)?;
    let mut value = serde_json::to_value(&effective).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    let doc: ScenarioDoc = serde_json::from_value(value).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    Scenario::from_doc(doc)
}

fn apply_override(value: &mut Value, spec: &str) -> Result<(), ScenarioError> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| ScenarioError::MalformedOverride(spec.to_string()))?;
    let path = path.trim();
    let mut slot = &mut *value;
    for key in path.split('.') {
        slot = match slot {
            Value::Object(map) => map.get_mut(key),
            Value::Array(items) => key.parse::<usize>().ok().and_then(|i| items.get_mut(i)),
            _ => None,
        }
        .ok_or_else(|| ScenarioError::UnknownOverride(path.to_string()))?;
    }
    *slot = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    Ok(())
}

fn parse_type(name: &str, path: &str) -> Result<AgentType, ScenarioError> {
    name.parse().map_err(|msg: String| ScenarioError::invalid(path, msg))
}

fn type_table(doc: &ScenarioDoc) -> Result<BTreeMap<AgentType, DynamicsParams>, ScenarioError> {
    let mut table: BTreeMap<AgentType, DynamicsParams> = AgentType::ALL
        .iter()
        .map(|&t| (t, DynamicsParams::defaults(t)))
        .collect();
    for (name, o) in &doc.agent_types {
        let path = format!("agent_types.{name}");
        let t = parse_type(name, &path)?;
        let p = table[&t].with_overrides(o);
        p.validate().map_err(|e| ScenarioError::invalid(&path, e.to_string()))?;
        table.insert(t, p);
    }
    Ok(table)
}

/// `doc` with every optional field made explicit.
fn effective_doc(doc: &ScenarioDoc) -> Result<ScenarioDoc, ScenarioError> {
    let table = type_table(doc)?;
    let mut out = doc.clone();
    out.agent_types = table
        .iter()
        .map(|(t, p)| {
            let full = DynamicsOverrides {
                wheelbase: Some(p.wheelbase),
                phi_max: Some(p.phi_max),
                v_max_type: Some(p.v_max_type),
                a_throttle: Some(p.a_throttle),
                a_brake: Some(p.a_brake),
                phi_rate_max: Some(p.phi_rate_max),
                steer_gain: Some(p.steer_gain),
                g: Some(p.g),
                mu: Some(p.mu),
                t_react: Some(p.t_react),
            };
            (t.name().to_string(), full)
        })
        .collect();
    for (i, a) in out.agents.iter_mut().enumerate() {
        let t = parse_type(&a.agent_type, &format!("agents.{i}.type"))?;
        a.v.get_or_insert(0.0);
        if t.is_vehicle() {
            a.phi.get_or_insert(0.0);
        }
        if a.reference_offset.is_none() && !a.disks.is_empty() {
            a.reference_offset = Some(default_reference(&a.disks, &table[&t]));
        }
    }
    for (i, o) in out.obstacles.iter_mut().enumerate() {
        o.id.get_or_insert(i as u32);
    }
    Ok(out)
}

/// Front axle for vehicles (axles centred on the footprint), footprint centre
/// for pedestrians.
pub fn default_reference(disks: &[Disk], params: &DynamicsParams) -> Vec2 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ylo, mut yhi) = (f64::INFINITY, f64::NEG_INFINITY);
    for d in disks {
        lo = lo.min(d.center.x - d.radius);
        hi = hi.max(d.center.x + d.radius);
        ylo = ylo.min(d.center.y - d.radius);
        yhi = yhi.max(d.center.y + d.radius);
    }
    let mid = Vec2::new(0.5 * (lo + hi), 0.5 * (ylo + yhi));
    if params.is_vehicle() {
        mid + Vec2::new(0.5 * params.wheelbase, 0.0)
    } else {
        mid
    }
}

fn finite(v: Vec2) -> bool {
    v.is_finite()
}

impl Scenario {
    pub fn from_doc(doc: ScenarioDoc) -> Result<Self, ScenarioError> {
        let effective = effective_doc(&doc)?;
        let doc = &effective;
        doc.nav.validate()?;
        if !(doc.duration > 0.0 && doc.duration.is_finite()) {
            return Err(ScenarioError::invalid("duration", "must be positive"));
        }
        if !(doc.goal_radius > 0.0 && doc.goal_radius.is_finite()) {
            return Err(ScenarioError::invalid("goal_radius", "must be positive"));
        }
        let table = type_table(doc)?;

        let mut agents = Vec::with_capacity(doc.agents.len());
        let mut seen = BTreeMap::new();
        for (i, a) in doc.agents.iter().enumerate() {
            let path = format!("agents.{i}");
            if let Some(prev) = seen.insert(a.id, i) {
                return Err(ScenarioError::invalid(
                    format!("{path}.id"),
                    format!("id {} already used by agents.{prev}", a.id),
                ));
            }
            let t = parse_type(&a.agent_type, &format!("{path}.type"))?;
            let params = table[&t];
            let reference = a.reference_offset.unwrap_or_default();
            let shape = CtmatShape::new(a.disks.clone(), reference)
                .map_err(|e| ScenarioError::invalid(format!("{path}.disks"), e.to_string()))?;
            if !finite(a.position) || !a.theta.is_finite() {
                return Err(ScenarioError::invalid(&path, "position and theta must be finite"));
            }
            if !finite(a.goal) {
                return Err(ScenarioError::invalid(format!("{path}.goal"), "must be finite"));
            }
            let v = a.v.unwrap_or(0.0);
            if !(v >= 0.0 && v <= params.v_max_type) {
                return Err(ScenarioError::invalid(
                    format!("{path}.v"),
                    format!("must lie in [0, {}]", params.v_max_type),
                ));
            }
            let phi = a.phi.unwrap_or(0.0);
            if t.is_vehicle() && (phi.is_nan() || phi.abs() > params.phi_max) {
                return Err(ScenarioError::invalid(
                    format!("{path}.phi"),
                    format!("must satisfy |phi| <= {}", params.phi_max),
                ));
            }
            agents.push(AgentState::new(
                a.id, shape, params, a.position, a.theta, a.goal, v, phi,
            ));
        }

        let mut obstacles = Vec::with_capacity(doc.obstacles.len());
        for (i, o) in doc.obstacles.iter().enumerate() {
            let path = format!("obstacles.{i}");
            let shape = CtmatShape::centered(o.disks.clone())
                .map_err(|e| ScenarioError::invalid(format!("{path}.disks"), e.to_string()))?;
            if !finite(o.position) || !o.theta.is_finite() {
                return Err(ScenarioError::invalid(&path, "position and theta must be finite"));
            }
            obstacles.push(Obstacle {
                id: o.id.unwrap_or(i as u32),
                shape: shape.place(Pose::new(o.position, o.theta)),
            });
        }

        check_initial_overlaps(&agents, &obstacles)?;

        Ok(Self {
            agents,
            obstacles,
            nav: doc.nav.clone(),
            agent_types: table,
            duration: doc.duration,
            goal_radius: doc.goal_radius,
            seed: doc.seed,
            effective: effective.clone(),
        })
    }

    /// Pretty JSON of the effective document.
    pub fn effective_json(&self) -> String {
        serde_json::to_string_pretty(&self.effective).expect("scenario documents serialize")
    }
}

fn check_initial_overlaps(agents: &[AgentState], obstacles: &[Obstacle]) -> Result<(), ScenarioError> {
    let placed: Vec<CtmatShape> = agents.iter().map(AgentState::placed_shape).collect();
    for i in 0..agents.len() {
        for j in i + 1..agents.len() {
            if shapes_overlap(&placed[i], &placed[j]) {
                return Err(ScenarioError::invalid(
                    "agents",
                    format!("agents {} and {} overlap initially", agents[i].id, agents[j].id),
                ));
            }
        }
        for o in obstacles {
            if shapes_overlap(&placed[i], &o.shape) {
                return Err(ScenarioError::invalid(
                    "agents",
                    format!("agent {} overlaps obstacle {}", agents[i].id, o.id),
                ));
            }
        }
    }
    Ok(())
}
