//! Per-agent planning cost as a function of neighbour count and sample count.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::hint::black_box;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agent::AgentState;
use crate::geometry::{point_shape_distance, shapes_overlap};
use crate::math::Vec2;
use crate::navigation::{plan_step, NavConfig, Neighbor};
use crate::sim::Scenario;

/// Closest a synthetic neighbour is placed to the subject, in metres.
const RING_INNER: f64 = 6.0;

/// A subject agent and exactly `n` neighbours inside the detection radius.
#[derive(Debug, Clone)]
pub struct BenchWorld {
    pub subject: AgentState,
    pub neighbors: Vec<AgentState>,
    pub nav: NavConfig,
}

/// Sampling grid `(samples_v, samples_phi)` with `samples_v * samples_phi == m`,
/// as square as the factorisation allows.
pub fn grid_shape(m: usize) -> (usize, usize) {
    let m = m.max(1);
    let mut a = (m as f64).sqrt().floor() as usize;
    while a > 1 && !m.is_multiple_of(a) {
        a -= 1;
    }
    (m / a, a)
}

/// Builds a world around the first agent of `scenario`, cloning the other
/// agents (or the subject itself) as neighbours scattered on an annulus with
/// random headings and speeds.
pub fn bench_world(scenario: &Scenario, n: usize, m: usize, seed: u64) -> Option<BenchWorld> {
    let first = scenario.agents.first()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (samples_v, samples_phi) = grid_shape(m);
    let nav = NavConfig {
        samples_v,
        samples_phi,
        ..scenario.nav.clone()
    };
    let p = &first.dyn_params;
    let subject = AgentState::new(
        first.id.0,
        first.shape.clone(),
        *p,
        Vec2::ZERO,
        0.0,
        Vec2::new(50.0, 0.0),
        0.5 * p.v_max_type,
        0.0,
    );
    let templates: Vec<&AgentState> = if scenario.agents.len() > 1 {
        scenario.agents[1..].iter().collect()
    } else {
        vec![first]
    };
    let mut neighbors: Vec<AgentState> = Vec::with_capacity(n);
    let mut placed = vec![subject.placed_shape()];
    for i in 0..n {
        let t = templates[i % templates.len()];
        let outer = nav.detection_radius - t.shape.reach() - 0.1;
        let mut found = None;
        for _ in 0..10_000 {
            let r = rng.random_range(RING_INNER..outer.max(RING_INNER + 1e-3));
            let at = Vec2::from_angle(rng.random_range(0.0..TAU)) * r;
            let heading = rng.random_range(0.0..TAU);
            let v = rng.random_range(0.0..=0.5 * t.dyn_params.v_max_type);
            let a = AgentState::new(
                1000 + i as u32,
                t.shape.clone(),
                t.dyn_params,
                at,
                heading,
                at + Vec2::from_angle(heading) * 50.0,
                v,
                0.0,
            );
            let shape = a.placed_shape();
            let in_range = point_shape_distance(&shape, Vec2::ZERO) <= nav.detection_radius;
            if in_range && !placed.iter().any(|s| shapes_overlap(s, &shape)) {
                placed.push(shape);
                found = Some(a);
                break;
            }
        }
        neighbors.push(found?);
    }
    Some(BenchWorld {
        subject,
        neighbors,
        nav,
    })
}

/// Timing of one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchPoint {
    pub neighbors: usize,
    pub samples: usize,
    /// Number of synthetic worlds averaged.
    pub reps: usize,
    /// Mean wall time of one planning call, in milliseconds.
    pub mean_ms: f64,
    pub std_ms: f64,
}

/// Planning calls timed per synthetic world.
const CALLS_PER_WORLD: usize = 5;

/// Times planning for the subject of `world`, `calls` times after one
/// warm-up call. Returns milliseconds per call.
pub fn time_plan(world: &BenchWorld, calls: usize) -> Vec<f64> {
    let neighbors: Vec<Neighbor<'_>> = world.neighbors.iter().map(Neighbor::Agent).collect();
    black_box(plan_step(&world.subject, &neighbors, &world.nav));
    (0..calls.max(1))
        .map(|_| {
            let start = Instant::now();
            black_box(plan_step(black_box(&world.subject), black_box(&neighbors), &world.nav));
            start.elapsed().as_secs_f64() * 1e3
        })
        .collect()
}

/// Mean planning time over `reps` independently drawn worlds with `n`
/// neighbours and `m` samples. `None` if a world cannot be built.
pub fn time_point(scenario: &Scenario, n: usize, m: usize, reps: usize) -> Option<BenchPoint> {
    let reps = reps.max(1);
    let mut times = Vec::with_capacity(reps * CALLS_PER_WORLD);
    for r in 0..reps {
        let world = bench_world(scenario, n, m, scenario.seed.wrapping_add(r as u64))?;
        times.extend(time_plan(&world, CALLS_PER_WORLD));
    }
    let mean = times.iter().sum::<f64>() / times.len() as f64;
    let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / times.len() as f64;
    Some(BenchPoint {
        neighbors: n,
        samples: m,
        reps,
        mean_ms: mean,
        std_ms: var.sqrt(),
    })
}

/// Times every `(n, m)` combination. Points whose world cannot be built are
/// skipped.
pub fn sweep(scenario: &Scenario, neighbors: &[usize], samples: &[usize], reps: usize) -> Vec<BenchPoint> {
    neighbors
        .iter()
        .flat_map(|&n| samples.iter().map(move |&m| (n, m)))
        .filter_map(|(n, m)| time_point(scenario, n, m, reps))
        .collect()
}

/// Least-squares fit `time ≈ alpha·N·M + beta·N + gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuntimeFit {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub r_squared: f64,
    /// Root-mean-square residual, in milliseconds.
    pub rms_residual: f64,
}

fn least_squares(design: DMatrix<f64>, y: &DVector<f64>) -> Option<(DVector<f64>, f64, f64)> {
    let coef = design.clone().svd(true, true).solve(y, 1e-12).ok()?;
    let fitted = &design * &coef;
    let mean = y.mean();
    let ss_res: f64 = y.iter().zip(fitted.iter()).map(|(a, b)| (a - b).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|a| (a - mean).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Some((coef, r2, (ss_res / y.len() as f64).sqrt()))
}

pub fn fit_runtime(points: &[BenchPoint]) -> Option<RuntimeFit> {
    if points.len() < 3 {
        return None;
    }
    let design = DMatrix::from_fn(points.len(), 3, |i, j| {
        let (n, m) = (points[i].neighbors as f64, points[i].samples as f64);
        [n * m, n, 1.0][j]
    });
    let y = DVector::from_iterator(points.len(), points.iter().map(|p| p.mean_ms));
    let (c, r_squared, rms_residual) = least_squares(design, &y)?;
    Some(RuntimeFit {
        alpha: c[0],
        beta: c[1],
        gamma: c[2],
        r_squared,
        rms_residual,
    })
}

/// Straight-line fit `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let design = DMatrix::from_fn(xs.len(), 2, |i, j| if j == 0 { xs[i] } else { 1.0 });
    let y = DVector::from_column_slice(ys);
    let (c, r_squared, _) = least_squares(design, &y)?;
    Some(LinearFit {
        slope: c[0],
        intercept: c[1],
        r_squared,
    })
}

pub const BENCH_CSV_HEADER: &str = "neighbors,samples,reps,mean_ms,std_ms";

pub fn points_to_csv(points: &[BenchPoint]) -> String {
    let mut out = String::from(BENCH_CSV_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            p.neighbors, p.samples, p.reps, p.mean_ms, p.std_ms
        );
    }
    out
}
