use serde::{Deserialize, Serialize};

use super::NavError;

/// Coefficients of the five cost terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostWeights {
    /// Distance to the preferred control.
    pub a: f64,
    /// Change from the previous control.
    pub b: f64,
    /// Type-weighted distance keeping.
    pub c: f64,
    /// Clearance (signed distance) to neighbours.
    pub d: f64,
    /// Distance to the goal.
    pub e: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self {
            a: 1.0,
            b: 0.5,
            c: 0.05,
            d: 2.0,
            e: 0.2,
        }
    }
}

impl CostWeights {
    pub fn as_array(&self) -> [f64; 5] {
        [self.a, self.b, self.c, self.d, self.e]
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            a: self.a * k,
            b: self.b * k,
            c: self.c * k,
            d: self.d * k,
            e: self.e * k,
        }
    }

    /// Weighted sum of the five terms.
    pub fn combine(&self, terms: &[f64; 5]) -> f64 {
        self.a * terms[0] + self.b * terms[1] + self.c * terms[2] + self.d * terms[3] + self.e * terms[4]
    }
}

/// Planner parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NavConfig {
    /// A fan is free space when its width is at least `sigma` agent widths.
    pub sigma: f64,
    /// Neighbours farther than this (nearest shape point) are ignored.
    pub detection_radius: f64,
    /// Planning interval in seconds.
    pub tau: f64,
    /// Look-ahead of the occlusion prediction in seconds.
    pub kappa: f64,
    /// Collision checkpoints per candidate over `tau`.
    pub substeps_collision: usize,
    /// RK4 substeps per `tau` for vehicles.
    pub integrator_substeps: usize,
    pub samples_v: usize,
    pub samples_phi: usize,
    pub speedup_factor: f64,
    pub weights: CostWeights,
    /// Clamp the distance-keeping type weight at zero.
    pub f3_clamp_nonnegative: bool,
    /// When false, the speed caps and reachable ranges are ignored and controls
    /// are sampled over the full type limits.
    pub dynamics: bool,
    /// Check candidates against every position a neighbour can reach within
    /// its own control ranges, not just its constant-control prediction.
    pub conservative_neighbors: bool,
}

impl Default for NavConfig {
    fn default() -> Self {
        Self {
            sigma: 1.5,
            detection_radius: 20.0,
            tau: 0.2,
            kappa: 2.0,
            substeps_collision: 5,
            integrator_substeps: 5,
            samples_v: 10,
            samples_phi: 10,
            speedup_factor: 1.25,
            weights: CostWeights::default(),
            f3_clamp_nonnegative: false,
            dynamics: true,
            conservative_neighbors: true,
        }
    }
}

impl NavConfig {
    /// The no-dynamics ablation of this configuration.
    pub fn without_dynamics(&self) -> Self {
        Self {
            dynamics: false,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), NavError> {
        let bad = |path: &str, msg: String| Err(NavError::InvalidConfig { path: path.into(), msg });
        if !(self.sigma >= 1.0 && self.sigma.is_finite()) {
            return bad("nav.sigma", format!("must be >= 1, got {}", self.sigma));
        }
        for (path, v) in [
            ("nav.tau", self.tau),
            ("nav.kappa", self.kappa),
            ("nav.detection_radius", self.detection_radius),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(path, format!("must be positive, got {v}"));
            }
        }
        for (path, v) in [("nav.samples_v", self.samples_v), ("nav.samples_phi", self.samples_phi)] {
            if v < 2 {
                return bad(path, format!("must be >= 2, got {v}"));
            }
        }
        for (path, v) in [
            ("nav.substeps_collision", self.substeps_collision),
            ("nav.integrator_substeps", self.integrator_substeps),
        ] {
            if v < 1 {
                return bad(path, "must be >= 1".into());
            }
        }
        if !(self.speedup_factor >= 1.0 && self.speedup_factor.is_finite()) {
            return bad(
                "nav.speedup_factor",
                format!("must be >= 1, got {}", self.speedup_factor),
            );
        }
        let w = self.weights.as_array();
        for (name, v) in ["a", "b", "c", "d", "e"].iter().zip(w) {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(&format!("nav.weights.{name}"), format!("must be >= 0, got {v}"));
            }
        }
        if w.iter().all(|&v| v == 0.0) {
            return bad("nav.weights", "at least one weight must be positive".into());
        }
        Ok(())
    }
}
