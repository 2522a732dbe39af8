//! Brute-force geometry used to check the exact predicates. A piece
//! `conv(D1 ∪ D2)` is the union of the disks swept linearly from `D1` to
//! `D2`, so gaps reduce to convex minimisation over the sweep parameters.

use autorvo::geometry::Disk;
use autorvo::math::Vec2;
use rand::Rng;

const ITERATIONS: usize = 60;

fn sweep(p: &[Disk; 2], t: f64) -> (Vec2, f64) {
    (
        p[0].center * (1.0 - t) + p[1].center * t,
        p[0].radius * (1.0 - t) + p[1].radius * t,
    )
}

/// Minimum of a convex function on `[0, 1]`.
fn ternary(f: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..ITERATIONS {
        let (a, b) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
        if f(a) <= f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    f(0.0).min(f(1.0)).min(f(0.5 * (lo + hi)))
}

/// Signed gap from a point to one piece (negative inside).
pub fn point_piece_gap(x: Vec2, p: &[Disk; 2]) -> f64 {
    ternary(|t| {
        let (c, r) = sweep(p, t);
        x.distance(c) - r
    })
}

/// Gap between two pieces: min over both sweeps of the disk-disk gap.
pub fn piece_gap(p: &[Disk; 2], q: &[Disk; 2]) -> f64 {
    ternary(|s| {
        let (cp, rp) = sweep(p, s);
        ternary(|t| {
            let (cq, rq) = sweep(q, t);
            cp.distance(cq) - rp - rq
        })
    })
}

/// Pieces of a disk chain; a single disk is a degenerate piece.
pub fn pieces(chain: &[Disk]) -> Vec<[Disk; 2]> {
    if chain.len() == 1 {
        return vec![[chain[0], chain[0]]];
    }
    chain.windows(2).map(|w| [w[0], w[1]]).collect()
}

pub fn chain_gap(a: &[Disk], b: &[Disk]) -> f64 {
    let pb = pieces(b);
    pieces(a)
        .iter()
        .flat_map(|p| pb.iter().map(move |q| piece_gap(p, q)))
        .fold(f64::INFINITY, f64::min)
}

/// `x − Q` as a piece.
pub fn reflected_about(x: Vec2, q: &[Disk; 2]) -> [Disk; 2] {
    q.map(|d| Disk::new(x - d.center, d.radius))
}

pub fn random_disk(rng: &mut impl Rng, around: Vec2, spread: f64) -> Disk {
    let c = around + Vec2::new(rng.random_range(-spread..spread), rng.random_range(-spread..spread));
    let r = if rng.random_bool(0.1) {
        0.0
    } else {
        rng.random_range(0.05..1.2)
    };
    Disk::new(c, r)
}

/// A chain of one to three disks near `around`; some neighbouring disks
/// coincide.
pub fn random_chain(rng: &mut impl Rng, around: Vec2) -> Vec<Disk> {
    let n = rng.random_range(1..=3);
    let mut chain = vec![random_disk(rng, around, 1.5)];
    while chain.len() < n {
        let last = *chain.last().unwrap();
        chain.push(if rng.random_bool(0.1) {
            last
        } else {
            random_disk(rng, last.center, 1.5)
        });
    }
    if chain.iter().all(|d| d.radius == 0.0) {
        chain[0].radius = 0.3;
    }
    chain
}

/// A point of a piece: a random disk of the sweep, then a random point of
/// that disk.
pub fn point_in_piece(rng: &mut impl Rng, p: &[Disk; 2]) -> Vec2 {
    let (c, r) = sweep(p, rng.random_range(0.0..=1.0));
    c + Vec2::from_angle(rng.random_range(0.0..std::f64::consts::TAU)) * (r * rng.random_range(0.0f64..=1.0).sqrt())
}
