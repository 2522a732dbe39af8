use super::hull::{hull_gap, hulls_within, point_gap, BoundingCircle, DiskHull};
use super::{CtmatShape, Disk, EPS};
use crate::math::Vec2;

/// Union of convex disk hulls, one per pair of convex pieces.
///
/// The union is kept implicit: every query is a min/any over pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct MinkowskiSumShape {
    pub pieces: Vec<DiskHull>,
}

impl MinkowskiSumShape {
    pub fn translated(&self, by: Vec2) -> Self {
        Self {
            pieces: self
                .pieces
                .iter()
                .map(|h| h.iter().map(|d| Disk::new(d.center + by, d.radius)).collect())
                .collect(),
        }
    }
}

/// `A ⊕ B`, or `(−A) ⊕ B` when `reflect_a` is set. Both shapes are expected in
/// the same (world) frame. For pieces `conv(D1 ∪ D2)` and `conv(D3 ∪ D4)` the
/// sum is the hull of the four pairwise disk sums.
pub fn minkowski_sum(a: &CtmatShape, b: &CtmatShape, reflect_a: bool) -> MinkowskiSumShape {
    let sign = if reflect_a { -1.0 } else { 1.0 };
    let mut pieces = Vec::new();
    for pa in a.hull_slices() {
        for pb in b.hull_slices() {
            let mut hull = DiskHull::new();
            for da in pa {
                for db in pb {
                    hull.push(Disk::new(da.center * sign + db.center, da.radius + db.radius));
                }
            }
            pieces.push(hull);
        }
    }
    MinkowskiSumShape { pieces }
}

/// Closed-set membership of the origin.
pub fn contains_origin(s: &MinkowskiSumShape) -> bool {
    s.pieces.iter().any(|h| point_gap(h, Vec2::ZERO) <= EPS)
}

/// Distance from the origin to the sum (positive outside). Inside, the
/// penetration depth of the deepest containing piece, negated.
pub fn signed_distance_origin(s: &MinkowskiSumShape) -> f64 {
    s.pieces
        .iter()
        .map(|h| point_gap(h, Vec2::ZERO))
        .fold(f64::INFINITY, f64::min)
}

/// Closed-set overlap test between two placed shapes; the same predicate as
/// `contains_origin(minkowski_sum(a, b, true))`, evaluated piece pair by
/// piece pair without building the sum.
pub fn shapes_overlap(a: &CtmatShape, b: &CtmatShape) -> bool {
    shapes_within(a, b, EPS)
}

/// True when the signed gap between two placed shapes is `<= threshold`.
pub fn shapes_within(a: &CtmatShape, b: &CtmatShape, threshold: f64) -> bool {
    let ba: Vec<BoundingCircle> = a.hull_slices().map(BoundingCircle::of).collect();
    b.hull_slices().any(|pb| {
        let bb = BoundingCircle::of(pb);
        a.hull_slices()
            .zip(&ba)
            .any(|(pa, bpa)| hulls_within(pa, bpa, pb, &bb, threshold))
    })
}

/// Signed gap between two placed shapes: the same value as
/// `signed_distance_origin(minkowski_sum(a, b, true))`.
pub fn shape_gap(a: &CtmatShape, b: &CtmatShape) -> f64 {
    let mut best = f64::INFINITY;
    for pa in a.hull_slices() {
        for pb in b.hull_slices() {
            best = best.min(hull_gap(pa, pb));
        }
    }
    best
}

/// Distance from a point to a placed shape (0 inside).
pub fn point_shape_distance(shape: &CtmatShape, p: Vec2) -> f64 {
    shape
        .hull_slices()
        .map(|h| point_gap(h, p))
        .fold(f64::INFINITY, f64::min)
        .max(0.0)
}

/// Signed point-to-shape distance (negative inside).
pub fn point_shape_gap(shape: &CtmatShape, p: Vec2) -> f64 {
    shape
        .hull_slices()
        .map(|h| point_gap(h, p))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Pose;

    fn disk(x: f64, y: f64, r: f64) -> Disk {
        Disk::new(Vec2::new(x, y), r)
    }

    fn shape(disks: &[[f64; 3]]) -> CtmatShape {
        CtmatShape::new(disks.iter().map(|&d| Disk::from(d)).collect(), Vec2::ZERO).unwrap()
    }

    #[test]
    fn disk_sum_adds_radii() {
        let a = shape(&[[0.0, 0.0, 1.0]]);
        let b = shape(&[[0.0, 0.0, 2.0]]);
        let s = minkowski_sum(&a, &b, false);
        assert_eq!(s.pieces.len(), 1);
        assert_eq!(s.pieces[0].as_slice(), &[disk(0.0, 0.0, 3.0)]);
    }

    #[test]
    fn piece_count_law() {
        let a = shape(&[[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [2.0, 0.0, 0.5]]);
        let b = shape(&[[0.0, 0.0, 0.3], [0.0, 1.0, 0.2], [0.0, 2.0, 0.4]]);
        let s = minkowski_sum(&a, &b, true);
        assert_eq!(s.pieces.len(), a.pieces().len() * b.pieces().len());
        for h in &s.pieces {
            assert_eq!(h.len(), 4);
        }
        assert!((s.pieces[0][0].radius - 1.3).abs() < 1e-15);
    }

    #[test]
    fn origin_tests() {
        let centered = MinkowskiSumShape {
            pieces: vec![[disk(0.0, 0.0, 1.0)].into_iter().collect()],
        };
        assert!(contains_origin(&centered));
        assert!(!contains_origin(&centered.translated(Vec2::new(100.0, 0.0))));
        let touching = MinkowskiSumShape {
            pieces: vec![[disk(1.0, 0.0, 1.0)].into_iter().collect()],
        };
        assert!(contains_origin(&touching));
        assert!(signed_distance_origin(&touching).abs() < 1e-15);
    }

    #[test]
    fn signed_distance_examples() {
        let s = MinkowskiSumShape {
            pieces: vec![[disk(3.0, 0.0, 1.0)].into_iter().collect()],
        };
        assert!((signed_distance_origin(&s) - 2.0).abs() < 1e-12);
        let s = MinkowskiSumShape {
            pieces: vec![[disk(0.0, 0.0, 2.0)].into_iter().collect()],
        };
        assert!((signed_distance_origin(&s) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn two_disk_hull_distance_bounded_by_sampled_boundary() {
        // Hull of (5,0,r=1) and (0,7,r=2); the sampled boundary gives an upper
        // bound on the distance and the disks give an upper bound too.
        let h: DiskHull = [disk(5.0, 0.0, 1.0), disk(0.0, 7.0, 2.0)].into_iter().collect();
        let d = signed_distance_origin(&MinkowskiSumShape {
            pieces: vec![h.clone()],
        });
        assert!(d <= 4.0 + 1e-12);
        assert!(d <= f64::min(5.0 - 1.0, 7.0 - 2.0));
        let mut sampled = f64::INFINITY;
        for k in 0..=100_000 {
            let t = k as f64 / 100_000.0;
            let c = h[0].center * (1.0 - t) + h[1].center * t;
            let r = h[0].radius * (1.0 - t) + h[1].radius * t;
            sampled = sampled.min(c.length() - r);
        }
        // Every disk on the interpolated chain lies inside the hull, so the
        // sampled value bounds the exact one from above; for two disks the
        // chain sweeps the whole hull and the bound is tight.
        assert!(d <= sampled + 1e-12);
        assert!((d - sampled).abs() < 1e-6, "{d} vs {sampled}");
    }

    #[test]
    fn overlap_examples() {
        let cap = shape(&[[-2.0, 0.0, 0.3], [2.0, 0.0, 0.3]]);
        let a = cap.place(Pose::new(Vec2::new(1.0, 1.0), 0.0));
        assert!(shapes_overlap(&a, &a));
        let far = cap.place(Pose::new(Vec2::new(1.0 + 10.0 * 9.2, 1.0), 0.0));
        assert!(!shapes_overlap(&a, &far));
        // Crossing at right angles through the shared point (1, 1).
        let cross = cap.place(Pose::new(Vec2::new(1.0, 1.0), std::f64::consts::FRAC_PI_2));
        assert!(shapes_overlap(&a, &cross));
        assert!(shapes_overlap(&cross, &a));
        assert!((shape_gap(&a, &far) - (92.0 - 4.0 - 0.6)).abs() < 1e-9);
    }
}
