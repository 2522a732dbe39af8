//! Reference trajectories: CSV + sidecar ingestion and resampling to the
//! simulation grid.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::agent::{AgentId, AgentType};
use crate::math::Vec2;
use crate::sim::{Scenario, TrajectoryLog};

use super::EvalError;

pub const REFERENCE_CSV_HEADER: &str = "frame,id,x,y";

/// Sidecar entry for one reference agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SidecarAgent {
    pub id: u32,
    #[serde(rename = "type")]
    pub agent_type: AgentType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disks: Option<Vec<crate::geometry::Disk>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<Vec2>,
}

/// Metadata accompanying a reference CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub frame_rate: f64,
    pub agents: Vec<SidecarAgent>,
}

/// Observed reference-point positions per agent at a fixed frame rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTrajectorySet {
    pub frame_rate: f64,
    /// Frame index and position, frames strictly increasing.
    pub tracks: BTreeMap<AgentId, Vec<(u64, Vec2)>>,
    pub types: BTreeMap<AgentId, AgentType>,
    /// Goal overrides from the sidecar.
    pub goals: BTreeMap<AgentId, Vec2>,
}

impl ReferenceTrajectorySet {
    /// Parses a `frame,id,x,y` CSV together with its sidecar JSON.
    pub fn parse(csv: &str, sidecar: &str) -> Result<Self, EvalError> {
        let side: Sidecar = serde_json::from_str(sidecar).map_err(|e| EvalError::Parse(format!("sidecar: {e}")))?;
        if !(side.frame_rate.is_finite() && side.frame_rate > 0.0) {
            return Err(EvalError::Parse("sidecar: frame_rate must be positive".into()));
        }
        let mut types = BTreeMap::new();
        let mut goals = BTreeMap::new();
        for a in &side.agents {
            if types.insert(AgentId(a.id), a.agent_type).is_some() {
                return Err(EvalError::Parse(format!("sidecar: duplicate agent {}", a.id)));
            }
            if let Some(g) = a.goal {
                goals.insert(AgentId(a.id), g);
            }
        }

        let mut tracks: BTreeMap<AgentId, Vec<(u64, Vec2)>> = BTreeMap::new();
        let mut lines = csv.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == REFERENCE_CSV_HEADER => {}
            _ => {
                return Err(EvalError::Parse(format!(
                    "reference: expected header '{REFERENCE_CSV_HEADER}'"
                )))
            }
        }
        for (n, line) in lines {
            let bad = |what: &str| EvalError::Parse(format!("reference line {}: {what}", n + 1));
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 4 {
                return Err(bad("expected 4 columns"));
            }
            let frame: u64 = cols[0].parse().map_err(|_| bad("bad frame"))?;
            let id: u32 = cols[1].parse().map_err(|_| bad("bad id"))?;
            let x: f64 = cols[2].parse().map_err(|_| bad("bad x"))?;
            let y: f64 = cols[3].parse().map_err(|_| bad("bad y"))?;
            if !(x.is_finite() && y.is_finite()) {
                return Err(bad("non-finite position"));
            }
            tracks.entry(AgentId(id)).or_default().push((frame, Vec2::new(x, y)));
        }
        for (id, t) in &mut tracks {
            t.sort_by_key(|s| s.0);
            if t.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(EvalError::Parse(format!("reference: agent {id} repeats a frame")));
            }
            if t.len() < 2 {
                return Err(EvalError::InsufficientData(format!(
                    "agent {id} has fewer than 2 samples"
                )));
            }
            if !types.contains_key(id) {
                return Err(EvalError::IdMismatch(format!("agent {id} missing from sidecar")));
            }
        }
        Ok(Self {
            frame_rate: side.frame_rate,
            tracks,
            types,
            goals,
        })
    }

    /// Reference built from a simulation log, one frame per step.
    pub fn from_log(log: &TrajectoryLog) -> Self {
        let mut tracks: BTreeMap<AgentId, Vec<(u64, Vec2)>> = BTreeMap::new();
        let mut types = BTreeMap::new();
        for r in &log.records {
            tracks
                .entry(r.id)
                .or_default()
                .push((r.step as u64, Vec2::new(r.x, r.y)));
            types.insert(r.id, r.agent_type);
        }
        Self {
            frame_rate: 1.0 / log.tau,
            tracks,
            types,
            goals: BTreeMap::new(),
        }
    }

    /// Keeps frames `first..first + count` only.
    pub fn window(&self, first: u64, count: u64) -> Self {
        let mut out = self.clone();
        for t in out.tracks.values_mut() {
            t.retain(|(f, _)| *f >= first && *f < first + count);
        }
        out.tracks.retain(|_, t| t.len() >= 2);
        out
    }

    pub fn to_csv(&self) -> String {
        let mut rows: Vec<(u64, AgentId, Vec2)> = self
            .tracks
            .iter()
            .flat_map(|(id, t)| t.iter().map(move |(f, p)| (*f, *id, *p)))
            .collect();
        rows.sort_by_key(|r| (r.0, r.1));
        let mut out = String::from(REFERENCE_CSV_HEADER);
        out.push('\n');
        for (f, id, p) in rows {
            let _ = writeln!(out, "{f},{id},{},{}", p.x, p.y);
        }
        out
    }

    /// Sidecar with frame rate and types; shapes and goals are copied from
    /// `scenario` when given.
    pub fn sidecar(&self, scenario: Option<&Scenario>) -> Sidecar {
        let agents = self
            .types
            .iter()
            .map(|(id, t)| {
                let template = scenario.and_then(|s| s.agents.iter().find(|a| a.id == *id));
                SidecarAgent {
                    id: id.0,
                    agent_type: *t,
                    disks: template.map(|a| a.shape.disks().to_vec()),
                    goal: self.goals.get(id).copied().or(template.map(|a| a.goal)),
                }
            })
            .collect();
        Sidecar {
            frame_rate: self.frame_rate,
            agents,
        }
    }

    /// Positions on the grid `t = k·tau`, linearly interpolated. Grid points
    /// outside an agent's observed span are `None`.
    pub fn resample(&self, tau: f64) -> Resampled {
        let mut last_time: f64 = 0.0;
        for t in self.tracks.values() {
            if let Some((f, _)) = t.last() {
                last_time = last_time.max(*f as f64 / self.frame_rate);
            }
        }
        let slack = 1e-9 * tau;
        let len = ((last_time + slack) / tau).floor() as usize + 1;
        let positions = self
            .tracks
            .iter()
            .map(|(id, track)| {
                let mut row = vec![None; len];
                let times: Vec<f64> = track.iter().map(|(f, _)| *f as f64 / self.frame_rate).collect();
                let (t0, t1) = (times[0], times[times.len() - 1]);
                let mut seg = 0;
                for (k, slot) in row.iter_mut().enumerate() {
                    let t = k as f64 * tau;
                    if t < t0 - slack || t > t1 + slack {
                        continue;
                    }
                    while seg + 2 < times.len() && times[seg + 1] < t {
                        seg += 1;
                    }
                    let (ta, tb) = (times[seg], times[seg + 1]);
                    let (pa, pb) = (track[seg].1, track[seg + 1].1);
                    let s = ((t - ta) / (tb - ta)).clamp(0.0, 1.0);
                    *slot = Some(if s == 0.0 {
                        pa
                    } else if s == 1.0 {
                        pb
                    } else {
                        pa + (pb - pa) * s
                    });
                }
                (*id, row)
            })
            .collect();
        Resampled { tau, len, positions }
    }
}

/// Reference positions on the simulation time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Resampled {
    pub tau: f64,
    pub len: usize,
    pub positions: BTreeMap<AgentId, Vec<Option<Vec2>>>,
}

impl Resampled {
    pub fn at(&self, id: AgentId, k: usize) -> Option<Vec2> {
        self.positions.get(&id).and_then(|row| row.get(k).copied().flatten())
    }

    /// Finite-difference velocity at grid point `k`: central where both
    /// neighbours exist, one-sided at the ends of an agent's span.
    pub fn velocity(&self, id: AgentId, k: usize) -> Option<Vec2> {
        let here = self.at(id, k)?;
        let prev = k.checked_sub(1).and_then(|j| self.at(id, j));
        let next = self.at(id, k + 1);
        match (prev, next) {
            (Some(a), Some(b)) => Some((b - a) / (2.0 * self.tau)),
            (None, Some(b)) => Some((b - here) / self.tau),
            (Some(a), None) => Some((here - a) / self.tau),
            (None, None) => None,
        }
    }
}
