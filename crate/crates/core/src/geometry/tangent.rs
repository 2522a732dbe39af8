use super::{point_shape_gap, CtmatShape, Disk, GeometryError};
use crate::math::{wrap_angle, Vec2};

/// Angular interval subtended by a shape at a viewpoint.
///
/// `lo <= hi`; `lo` is wrapped into `(-π, π]` and `hi` may exceed π when the
/// interval straddles the negative x-axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentInterval {
    pub lo: f64,
    pub hi: f64,
    /// Tangent point on the clockwise (`lo`) side.
    pub lo_point: Vec2,
    /// Tangent point on the counter-clockwise (`hi`) side.
    pub hi_point: Vec2,
}

impl TangentInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Whether the bearing `angle` falls inside the interval (closed).
    pub fn contains(&self, angle: f64) -> bool {
        wrap_angle(angle - self.lo).rem_euclid(std::f64::consts::TAU) <= self.width() + 1e-12
    }
}

/// Minimal angular interval at `viewpoint` covering every disk of `shape`:
/// per disk, bearing ± asin(r / dist).
pub fn tangent_angles(viewpoint: Vec2, shape: &CtmatShape) -> Result<TangentInterval, GeometryError> {
    if point_shape_gap(shape, viewpoint) <= 0.0 {
        return Err(GeometryError::ViewpointInsideShape);
    }
    Ok(disks_tangent_interval(viewpoint, shape.disks()))
}

/// Tangent interval of a disk set seen from a viewpoint outside every disk.
pub fn disks_tangent_interval(viewpoint: Vec2, disks: &[Disk]) -> TangentInterval {
    let base = (disks[0].center - viewpoint).angle();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut lo_point = viewpoint;
    let mut hi_point = viewpoint;
    for d in disks {
        let rel = d.center - viewpoint;
        let dist = rel.length();
        let bearing = base + wrap_angle(rel.angle() - base);
        let half = (d.radius / dist).min(1.0).asin();
        let reach = (dist * dist - d.radius * d.radius).max(0.0).sqrt();
        if bearing - half < lo {
            lo = bearing - half;
            lo_point = viewpoint + Vec2::from_angle(lo) * reach;
        }
        if bearing + half > hi {
            hi = bearing + half;
            hi_point = viewpoint + Vec2::from_angle(hi) * reach;
        }
    }
    let shift = wrap_angle(lo) - lo;
    TangentInterval {
        lo: lo + shift,
        hi: hi + shift,
        lo_point,
        hi_point,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn shape(disks: &[[f64; 3]]) -> CtmatShape {
        CtmatShape::new(disks.iter().map(|&d| Disk::from(d)).collect(), Vec2::ZERO).unwrap()
    }

    #[test]
    fn point_target_is_degenerate() {
        let t = disks_tangent_interval(Vec2::ZERO, &[Disk::from([10.0, 0.0, 0.0])]);
        assert_eq!((t.lo, t.hi), (0.0, 0.0));
        assert_eq!(t.lo_point, Vec2::new(10.0, 0.0));
    }

    #[test]
    fn closed_form_half_angle() {
        let s = shape(&[[10.0, 0.0, 5.0]]);
        let t = tangent_angles(Vec2::ZERO, &s).unwrap();
        assert!((t.lo + PI / 6.0).abs() < 1e-12);
        assert!((t.hi - PI / 6.0).abs() < 1e-12);
        // Tangent points lie on the circle and perpendicular to the sight line.
        for p in [t.lo_point, t.hi_point] {
            assert!((p.distance(Vec2::new(10.0, 0.0)) - 5.0).abs() < 1e-9);
            assert!((p.dot(p - Vec2::new(10.0, 0.0))).abs() < 1e-9);
        }
    }

    #[test]
    fn symmetric_pair_gives_symmetric_interval() {
        let s = shape(&[[8.0, 2.0, 0.5], [8.0, -2.0, 0.5]]);
        let t = tangent_angles(Vec2::ZERO, &s).unwrap();
        assert!((t.lo + t.hi).abs() < 1e-12);
    }

    #[test]
    fn straddles_negative_axis() {
        let s = shape(&[[-10.0, 0.0, 1.0]]);
        let t = tangent_angles(Vec2::ZERO, &s).unwrap();
        assert!(t.lo > 0.0 && t.hi > PI);
        assert!(t.contains(PI) && t.contains(-PI + 0.05) && !t.contains(0.0));
    }

    #[test]
    fn inside_is_an_error() {
        let s = shape(&[[0.0, 0.0, 1.0], [3.0, 0.0, 1.0]]);
        assert!(matches!(
            tangent_angles(Vec2::new(1.5, 0.2), &s),
            Err(GeometryError::ViewpointInsideShape)
        ));
    }
}
