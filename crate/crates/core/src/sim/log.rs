//! Trajectory logs and their CSV / JSON exports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::agent::{AgentId, AgentState, AgentType, Behavior};

/// State of one agent at the end of one step (step 0 is the initial state).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub step: usize,
    pub time: f64,
    pub id: AgentId,
    #[serde(rename = "type")]
    pub agent_type: AgentType,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub v: f64,
    /// Steering angle; absent for pedestrians.
    pub phi: Option<f64>,
    pub b: Behavior,
}

impl TrajectoryRecord {
    pub fn of(agent: &AgentState, step: usize, time: f64) -> Self {
        let p = agent.reference_point();
        Self {
            step,
            time,
            id: agent.id,
            agent_type: agent.agent_type,
            x: p.x,
            y: p.y,
            theta: agent.control.theta(),
            v: agent.control.speed(),
            phi: agent.control.steering(),
            b: agent.behavior,
        }
    }
}

/// Party to an overlap found by the collision audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Agent(u32),
    Obstacle(u32),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEvent {
    pub step: usize,
    pub time: f64,
    pub a: Party,
    pub b: Party,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arrival {
    pub id: AgentId,
    pub step: usize,
    pub time: f64,
}

/// Result of a simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryLog {
    pub tau: f64,
    pub steps: usize,
    pub records: Vec<TrajectoryRecord>,
    pub audit: Vec<AuditEvent>,
    pub arrivals: Vec<Arrival>,
    /// Count of agents that stopped for lack of a collision-free candidate,
    /// summed over steps.
    pub emergency_stops: usize,
    /// Echo of the effective scenario configuration.
    pub config: serde_json::Value,
}

pub const CSV_HEADER: &str = "step,time,id,type,x,y,theta,v,phi,b";

impl TrajectoryLog {
    pub fn audit_count(&self) -> usize {
        self.audit.len()
    }

    /// Records of one agent, in step order.
    pub fn agent_records(&self, id: AgentId) -> impl Iterator<Item = &TrajectoryRecord> {
        self.records.iter().filter(move |r| r.id == id)
    }

    /// CSV with one line per record. Floats use the shortest decimal form
    /// that round-trips; `phi` is empty for pedestrians.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let phi = r.phi.map(|p| p.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.step,
                r.time,
                r.id,
                r.agent_type,
                r.x,
                r.y,
                r.theta,
                r.v,
                phi,
                r.b.as_str()
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("logs serialize")
    }
}
