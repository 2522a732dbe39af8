//! Gaussian entropy of pooled prediction errors.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::math::Vec2;

use super::EvalError;

/// Ridge added to the covariance diagonal, in m².
pub const COVARIANCE_RIDGE: f64 = 1e-6;

/// Fewest error vectors accepted by [`entropy_metric`].
pub const MIN_ERRORS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    /// Zero-mean error covariance including the ridge, row-major.
    pub covariance: [[f64; 2]; 2],
    /// Differential entropy in nats.
    pub entropy: f64,
    /// Mean error magnitude over all vectors, in m.
    pub mean_displacement_error: f64,
    /// Mean error magnitude per agent id.
    #[serde(default)]
    pub per_agent_mean_error: std::collections::BTreeMap<u32, f64>,
    /// Number of simulation steps that contributed errors.
    pub steps_evaluated: usize,
    /// Number of error vectors.
    pub samples: usize,
}

/// Entropy of the zero-mean Gaussian fitted to `errors`.
pub fn entropy_metric(errors: &[Vec2]) -> Result<EntropyReport, EvalError> {
    if errors.len() < MIN_ERRORS {
        return Err(EvalError::InsufficientData(format!(
            "{} error vectors, need at least {MIN_ERRORS}",
            errors.len()
        )));
    }
    let n = errors.len() as f64;
    let (mut sxx, mut sxy, mut syy, mut mag) = (0.0, 0.0, 0.0, 0.0);
    for e in errors {
        sxx += e.x * e.x;
        sxy += e.x * e.y;
        syy += e.y * e.y;
        mag += e.length();
    }
    let cov = [
        [sxx / n + COVARIANCE_RIDGE, sxy / n],
        [sxy / n, syy / n + COVARIANCE_RIDGE],
    ];
    let det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
    if !(det.is_finite() && det > 0.0) {
        return Err(EvalError::DegenerateCovariance);
    }
    let entropy = 0.5 * ((2.0 * PI * E).powi(2) * det).ln();
    Ok(EntropyReport {
        covariance: cov,
        entropy,
        mean_displacement_error: mag / n,
        per_agent_mean_error: Default::default(),
        steps_evaluated: 0,
        samples: errors.len(),
    })
}
