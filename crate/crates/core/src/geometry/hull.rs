//! Exact queries on convex hulls of a few disks.
//!
//! A hull `K = conv(D_1 ∪ … ∪ D_k)` has support function
//! `h_K(u) = max_i (c_i·u + r_i)`. The signed gap between two hulls `P` and
//! `Q` is
//!
//! ```text
//! gap(P, Q) = max_{|u|=1} ( −h_Q(−u) − h_P(u) )
//! ```
//!
//! which is the Euclidean distance when they are apart and minus the
//! penetration depth when they overlap. Between breakpoints of the two support
//! functions the objective is `−(w·u + r)` for a fixed disk pair, maximised at
//! `u = −w/|w|`; so the maximum is attained either at such a peak or at a
//! breakpoint. Breakpoints of `h_K` are the normals of the outer tangent lines
//! between disk pairs, available in closed form.

use arrayvec::ArrayVec;

use super::Disk;
use crate::math::Vec2;

/// Hull of at most four disks (a Minkowski sum of two 2-disk pieces, or a
/// swept 2-disk piece).
pub type DiskHull = ArrayVec<Disk, 4>;

#[inline]
pub fn support(disks: &[Disk], u: Vec2) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for d in disks {
        let s = d.center.dot(u) + d.radius;
        if s > best {
            best = s;
        }
    }
    best
}

/// Normals `u` with `c_i·u + r_i == c_j·u + r_j` (outer tangent normals).
#[inline]
fn breakpoints(a: &Disk, b: &Disk, mut f: impl FnMut(Vec2)) {
    let d = a.center - b.center;
    let len = d.length();
    let dr = b.radius - a.radius;
    if len <= dr.abs() || len < 1e-15 {
        return;
    }
    let dir = d / len;
    let cos = dr / len;
    let sin = (1.0 - cos * cos).max(0.0).sqrt();
    let n = dir.perp();
    f(dir * cos + n * sin);
    f(dir * cos - n * sin);
}

/// Signed gap between `conv(p)` and `conv(q)`; negative when they overlap.
pub fn hull_gap(p: &[Disk], q: &[Disk]) -> f64 {
    debug_assert!(!p.is_empty() && !q.is_empty());
    let mut best = f64::NEG_INFINITY;
    let mut eval = |u: Vec2| {
        let v = -support(q, -u) - support(p, u);
        if v > best {
            best = v;
        }
    };
    eval(Vec2::new(1.0, 0.0));
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            breakpoints(&p[i], &p[j], &mut eval);
        }
    }
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            breakpoints(&q[i], &q[j], |u| eval(-u));
        }
    }
    for a in p {
        for b in q {
            if let Some(u) = (b.center - a.center).try_normalize() {
                eval(u);
            }
        }
    }
    best
}

/// Signed distance from `point` to `conv(disks)`.
pub fn point_gap(disks: &[Disk], point: Vec2) -> f64 {
    if disks.len() == 1 {
        return disks[0].center.distance(point) - disks[0].radius;
    }
    hull_gap(disks, &[Disk::new(point, 0.0)])
}

/// Circle enclosing every disk of the hull.
#[derive(Debug, Clone, Copy)]
pub struct BoundingCircle {
    pub center: Vec2,
    pub radius: f64,
}

impl BoundingCircle {
    pub fn of(disks: &[Disk]) -> Self {
        let (mut lo, mut hi) = (disks[0].center, disks[0].center);
        for d in &disks[1..] {
            lo.x = lo.x.min(d.center.x);
            lo.y = lo.y.min(d.center.y);
            hi.x = hi.x.max(d.center.x);
            hi.y = hi.y.max(d.center.y);
        }
        let center = (lo + hi) * 0.5;
        let radius = disks
            .iter()
            .map(|d| d.center.distance(center) + d.radius)
            .fold(0.0, f64::max);
        Self { center, radius }
    }

    /// Lower bound on the gap between anything inside the two circles.
    #[inline]
    pub fn gap_lower_bound(&self, other: &BoundingCircle) -> f64 {
        self.center.distance(other.center) - self.radius - other.radius
    }
}

/// True when `gap(p, q) <= threshold`, with a bounding-circle early exit.
#[inline]
pub fn hulls_within(p: &[Disk], bp: &BoundingCircle, q: &[Disk], bq: &BoundingCircle, threshold: f64) -> bool {
    if bp.gap_lower_bound(bq) > threshold {
        return false;
    }
    hull_gap(p, q) <= threshold
}

/// First parameter `s >= 0` at which the ray `origin + s·dir` (unit `dir`)
/// enters `conv(disks)`; `None` if it never does. Returns 0 when the origin is
/// already inside.
///
/// The boundary of a disk hull is covered by the pairwise two-disk hulls it
/// contains, so the first hit is the minimum over those.
pub fn ray_entry(disks: &[Disk], origin: Vec2, dir: Vec2) -> Option<f64> {
    if point_gap(disks, origin) <= 0.0 {
        return Some(0.0);
    }
    let mut best: Option<f64> = None;
    let mut keep = |s: f64| {
        if s >= 0.0 && best.is_none_or(|b| s < b) {
            best = Some(s);
        }
    };
    for (i, a) in disks.iter().enumerate() {
        if let Some(s) = ray_disk(a, origin, dir) {
            keep(s);
        }
        for b in &disks[i + 1..] {
            breakpoints(a, b, |n| {
                let p0 = a.center + n * a.radius;
                let p1 = b.center + n * b.radius;
                if let Some(s) = ray_segment(origin, dir, p0, p1) {
                    keep(s);
                }
            });
        }
    }
    best
}

fn ray_disk(d: &Disk, origin: Vec2, dir: Vec2) -> Option<f64> {
    let oc = origin - d.center;
    let b = oc.dot(dir);
    let c = oc.length_squared() - d.radius * d.radius;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let s = -b - disc.sqrt();
    (s >= 0.0).then_some(s)
}

fn ray_segment(origin: Vec2, dir: Vec2, p0: Vec2, p1: Vec2) -> Option<f64> {
    let e = p1 - p0;
    let denom = dir.cross(e);
    if denom.abs() < 1e-15 {
        return None;
    }
    let w = p0 - origin;
    let s = w.cross(e) / denom;
    let t = w.cross(dir) / denom;
    (s >= 0.0 && (-1e-12..=1.0 + 1e-12).contains(&t)).then_some(s)
}
