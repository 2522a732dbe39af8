//! Fan spaces: angular gaps between occluded bearings, and the preferred
//! direction chosen from them.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::agent::AgentState;
use crate::geometry::{tangent_angles, CtmatShape};
use crate::math::{wrap_angle, Vec2};

use super::NavConfig;

/// Smallest half-width of a vehicle's heading window.
const MIN_WINDOW_HALF: f64 = 10.0 * PI / 180.0;

/// An obstacle-free sector around the agent's reference point.
#[derive(Debug, Clone, PartialEq)]
pub struct FanSpace {
    pub bisector: Vec2,
    pub half_angle_left: f64,
    pub half_angle_right: f64,
    /// Sum of the distances from the two bounding points to the bisector
    /// line; infinite when both sides are heading-window edges.
    pub width: f64,
    /// Right (clockwise) and left bounding points: tangent points, or the
    /// window-edge vertex at the detection radius.
    pub bounding_points: [Vec2; 2],
    /// Bearing of the right side. The left side is at `hi >= lo`.
    pub lo: f64,
    pub hi: f64,
    /// Whether the right / left side is a heading-window edge.
    pub window_edge: [bool; 2],
}

impl FanSpace {
    pub fn extent(&self) -> f64 {
        self.hi - self.lo
    }

    /// Whether `bearing` lies inside the sector (closed).
    pub fn contains(&self, bearing: f64) -> bool {
        (bearing - self.lo).rem_euclid(TAU) <= self.extent() + 1e-12
    }
}

/// Half-width of the heading window, or `None` for the full circle.
pub fn heading_window(agent: &AgentState, cfg: &NavConfig) -> Option<f64> {
    if !agent.is_vehicle() {
        return None;
    }
    let p = &agent.dyn_params;
    let yaw = agent.control.speed() * p.phi_max.tan() / p.wheelbase;
    let half = (yaw * cfg.tau).max(MIN_WINDOW_HALF);
    (half < PI).then_some(half)
}

#[derive(Debug, Clone, Copy)]
struct Occluded {
    lo: f64,
    hi: f64,
    lo_point: Vec2,
    hi_point: Vec2,
}

/// Fan spaces seen from `viewpoint` looking along `heading`. `window` is the
/// half-width of the admissible heading window (`None` for all directions).
pub fn fans_from_shapes<'s>(
    viewpoint: Vec2,
    heading: f64,
    window: Option<f64>,
    shapes: impl IntoIterator<Item = &'s CtmatShape>,
    detection_radius: f64,
) -> Vec<FanSpace> {
    let mut occluded = Vec::new();
    for shape in shapes {
        match tangent_angles(viewpoint, shape) {
            Ok(t) if t.width() >= TAU => return Vec::new(),
            Ok(t) => occluded.push(Occluded {
                lo: t.lo,
                hi: t.hi,
                lo_point: t.lo_point,
                hi_point: t.hi_point,
            }),
            Err(_) => return Vec::new(),
        }
    }

    let (base, start, end) = match window {
        Some(half) => (heading, -half, half),
        None => match occluded.first() {
            None => (heading, -PI, PI),
            // Anchor the circle inside an occluded interval so no gap wraps.
            Some(o) => (o.lo, 0.0, TAU),
        },
    };

    // Intervals relative to `base`, split at the wrap point and clipped.
    let mut rel = Vec::with_capacity(occluded.len() + 1);
    for o in &occluded {
        let lo = if window.is_some() {
            wrap_angle(o.lo - base)
        } else {
            (o.lo - base).rem_euclid(TAU)
        };
        let hi = lo + (o.hi - o.lo);
        let seam = if window.is_some() { PI } else { TAU };
        if hi > seam {
            rel.push(Occluded { lo, hi: seam, ..*o });
            rel.push(Occluded {
                lo: lo - TAU,
                hi: hi - TAU,
                ..*o
            });
        } else {
            rel.push(Occluded { lo, hi, ..*o });
        }
    }
    rel.retain(|o| o.hi >= start && o.lo <= end);
    rel.sort_by(|a, b| a.lo.total_cmp(&b.lo));

    let edge_vertex = |angle: f64| viewpoint + Vec2::from_angle(base + angle) * detection_radius;
    let mut fans = Vec::new();
    let mut cursor = start;
    let mut cursor_point: Option<Vec2> = None;
    let mut cursor_point_is_edge = true;
    // Full-circle fans close on the interval the circle was anchored in.
    let closing_point = occluded.first().map(|o| o.lo_point).filter(|_| window.is_none());
    for o in &rel {
        if o.lo > cursor {
            fans.push(make_fan(
                viewpoint,
                base,
                (
                    cursor,
                    cursor_point_is_edge.then(|| edge_vertex(cursor)).or(cursor_point),
                ),
                (o.lo, Some(o.lo_point)),
                [cursor_point_is_edge, false],
                detection_radius,
            ));
        }
        if o.hi > cursor {
            cursor = o.hi;
            cursor_point = Some(o.hi_point);
            cursor_point_is_edge = false;
        }
    }
    if cursor < end {
        let right_edge = cursor_point_is_edge;
        let left_edge = closing_point.is_none();
        let right = if right_edge {
            Some(edge_vertex(cursor))
        } else {
            cursor_point
        };
        let left = if left_edge {
            Some(edge_vertex(end))
        } else {
            closing_point
        };
        fans.push(make_fan(
            viewpoint,
            base,
            (cursor, right),
            (end, left),
            [right_edge, left_edge],
            detection_radius,
        ));
    }
    fans
}

fn make_fan(
    viewpoint: Vec2,
    base: f64,
    right: (f64, Option<Vec2>),
    left: (f64, Option<Vec2>),
    window_edge: [bool; 2],
    detection_radius: f64,
) -> FanSpace {
    let lo = wrap_angle(base + right.0);
    let extent = left.0 - right.0;
    let half = 0.5 * extent;
    let points = [right.1.unwrap_or(viewpoint), left.1.unwrap_or(viewpoint)];
    let lateral = half.min(FRAC_PI_2).sin();
    let width = if window_edge[0] && window_edge[1] {
        f64::INFINITY
    } else {
        points
            .iter()
            .zip(window_edge)
            .map(|(p, edge)| if edge { detection_radius } else { p.distance(viewpoint) } * lateral)
            .sum()
    };
    FanSpace {
        bisector: Vec2::from_angle(lo + half),
        half_angle_left: half,
        half_angle_right: half,
        width,
        bounding_points: points,
        lo,
        hi: lo + extent,
        window_edge,
    }
}

/// Fan spaces around `agent` given the placed shapes of its neighbours.
pub fn compute_fan_spaces<'s>(
    agent: &AgentState,
    neighbor_shapes: impl IntoIterator<Item = &'s CtmatShape>,
    cfg: &NavConfig,
) -> Vec<FanSpace> {
    fans_from_shapes(
        agent.reference_point(),
        agent.control.theta(),
        heading_window(agent, cfg),
        neighbor_shapes,
        cfg.detection_radius,
    )
}

/// Whether bearing `h` lies inside a fan at least `min_width` wide.
pub fn in_free_space(fans: &[FanSpace], h: Vec2, min_width: f64) -> bool {
    let bearing = h.angle();
    fans.iter().any(|f| f.width >= min_width && f.contains(bearing))
}

/// Direction the agent would like to move in: `h` when it is already free or
/// nothing is free, else the nearest free fan entered with half the agent's
/// width of clearance from the bounding point on the `h` side.
pub fn preferred_direction(viewpoint: Vec2, agent_width: f64, fans: &[FanSpace], h: Vec2, cfg: &NavConfig) -> Vec2 {
    let min_width = cfg.sigma * agent_width;
    let free: Vec<&FanSpace> = fans.iter().filter(|f| f.width >= min_width).collect();
    let bearing = h.angle();
    if free.is_empty() || free.iter().any(|f| f.contains(bearing)) {
        return h;
    }

    // (angular distance, fan, side) with side 0 = right, 1 = left.
    let mut options: Vec<(f64, &FanSpace, usize)> = free
        .iter()
        .map(|f| {
            let to_right = wrap_angle(f.lo - bearing).abs();
            let to_left = wrap_angle(f.hi - bearing).abs();
            if to_right <= to_left {
                (to_right, *f, 0)
            } else {
                (to_left, *f, 1)
            }
        })
        .collect();
    options.sort_by(|a, b| a.0.total_cmp(&b.0));

    let half_width = 0.5 * agent_width;
    let offset = |fan: &FanSpace, side: usize| -> Option<f64> {
        if fan.window_edge[side] {
            return Some(0.0);
        }
        let dist = fan.bounding_points[side].distance(viewpoint);
        (half_width < dist).then(|| (half_width / dist).asin())
    };
    for (_, fan, side) in options {
        if fan.window_edge[side] {
            return h;
        }
        let (Some(near), Some(far)) = (offset(fan, side), offset(fan, 1 - side)) else {
            continue;
        };
        if near + far >= fan.extent() {
            continue;
        }
        let angle = if side == 0 { fan.lo + near } else { fan.hi - near };
        return Vec2::from_angle(angle);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Disk;

    fn disk_shape(x: f64, y: f64, r: f64) -> CtmatShape {
        CtmatShape::new(vec![Disk::from([x, y, r])], Vec2::new(x, y)).unwrap()
    }

    fn cfg() -> NavConfig {
        NavConfig::default()
    }

    #[test]
    fn empty_world_gives_one_unbounded_fan() {
        let fans = fans_from_shapes(Vec2::ZERO, 0.3, Some(0.5), [], 20.0);
        assert_eq!(fans.len(), 1);
        assert_eq!(fans[0].width, f64::INFINITY);
        assert!((fans[0].lo + 0.2).abs() < 1e-12 && (fans[0].hi - 0.8).abs() < 1e-12);

        let full = fans_from_shapes(Vec2::ZERO, 0.3, None, [], 20.0);
        assert_eq!(full.len(), 1);
        assert!((full[0].extent() - TAU).abs() < 1e-12);
    }

    #[test]
    fn disk_ahead_splits_window_symmetrically() {
        let s = disk_shape(10.0, 0.0, 2.0);
        let fans = fans_from_shapes(Vec2::ZERO, 0.0, Some(FRAC_PI_2), [&s], 20.0);
        assert_eq!(fans.len(), 2);
        let a = 0.2f64.asin();
        assert!((fans[0].lo + FRAC_PI_2).abs() < 1e-12 && (fans[0].hi + a).abs() < 1e-12);
        assert!((fans[1].lo - a).abs() < 1e-12 && (fans[1].hi - FRAC_PI_2).abs() < 1e-12);
        assert!((fans[0].width - fans[1].width).abs() < 1e-9);
        assert_eq!(fans[0].window_edge, [true, false]);
        // Width is the sum of the two side distances to the bisector line.
        for f in &fans {
            let w: f64 = f.bounding_points.iter().map(|p| p.cross(f.bisector).abs()).sum();
            assert!((w - f.width).abs() < 1e-9);
        }
    }

    #[test]
    fn overlapping_occlusions_merge() {
        let a = disk_shape(10.0, 1.0, 1.5);
        let b = disk_shape(10.0, -1.0, 1.5);
        let fans = fans_from_shapes(Vec2::ZERO, 0.0, Some(FRAC_PI_2), [&a, &b], 20.0);
        assert_eq!(fans.len(), 2);
    }

    #[test]
    fn full_circle_gaps_between_two_occluders() {
        let a = disk_shape(5.0, 0.0, 1.0);
        let b = disk_shape(-5.0, 0.0, 1.0);
        let fans = fans_from_shapes(Vec2::ZERO, 0.0, None, [&a, &b], 20.0);
        assert_eq!(fans.len(), 2);
        let a_half = 0.2f64.asin();
        for f in &fans {
            assert!((f.extent() - (PI - 2.0 * a_half)).abs() < 1e-9);
            assert_eq!(f.window_edge, [false, false]);
        }
        assert!(fans.iter().any(|f| f.contains(FRAC_PI_2)));
        assert!(fans.iter().any(|f| f.contains(-FRAC_PI_2)));
        assert!(!fans.iter().any(|f| f.contains(0.0) || f.contains(PI)));
    }

    #[test]
    fn full_circle_single_occluder_straddling_the_seam() {
        let a = disk_shape(-5.0, 0.0, 1.0);
        let fans = fans_from_shapes(Vec2::ZERO, 0.0, None, [&a], 20.0);
        assert_eq!(fans.len(), 1);
        assert!(fans[0].contains(0.0) && !fans[0].contains(PI));
        assert_eq!(fans[0].window_edge, [false, false]);
    }

    #[test]
    fn inside_a_neighbour_leaves_no_fans() {
        let a = disk_shape(0.5, 0.0, 1.0);
        assert!(fans_from_shapes(Vec2::ZERO, 0.0, None, [&a], 20.0).is_empty());
    }

    #[test]
    fn preferred_direction_rules() {
        let h = Vec2::new(1.0, 0.0);
        assert_eq!(preferred_direction(Vec2::ZERO, 2.0, &[], h, &cfg()), h);
        let fans = fans_from_shapes(Vec2::ZERO, 0.0, None, [], 20.0);
        assert_eq!(preferred_direction(Vec2::ZERO, 2.0, &fans, h, &cfg()), h);
    }

    #[test]
    fn blocked_goal_detours_into_left_fan() {
        // A chain of disks blocks the goal bearing; the nearest free fan
        // opens to the left.
        let big = CtmatShape::new(
            vec![
                Disk::from([0.0, -9.0, 2.0]),
                Disk::from([6.0, -3.0, 2.0]),
                Disk::from([7.2, 1.9, 2.0]),
            ],
            Vec2::ZERO,
        )
        .unwrap();
        let fans = fans_from_shapes(Vec2::ZERO, 0.0, None, [&big], 20.0);
        let h = Vec2::new(1.0, 0.0);
        assert!(!in_free_space(&fans, h, 3.0));
        let d = preferred_direction(Vec2::ZERO, 2.0, &fans, h, &cfg());
        assert!(d.angle() > 0.0);
        let fan = fans.iter().find(|f| f.contains(d.angle())).unwrap();
        // Perpendicular clearance from the h-side tangent point is half the width.
        let q = fan.bounding_points[0];
        assert!((q.cross(d).abs() - 1.0).abs() < 1e-9);
    }
}
