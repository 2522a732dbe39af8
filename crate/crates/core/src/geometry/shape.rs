use serde::{Deserialize, Serialize};

use super::GeometryError;
use crate::math::Vec2;

/// A closed disk. Serialized as `[x, y, r]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Disk {
    pub center: Vec2,
    pub radius: f64,
}

impl Disk {
    pub const fn new(center: Vec2, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        self.center.distance(p) <= self.radius + super::EPS
    }
}

impl From<[f64; 3]> for Disk {
    fn from(v: [f64; 3]) -> Self {
        Disk::new(Vec2::new(v[0], v[1]), v[2])
    }
}

impl From<Disk> for [f64; 3] {
    fn from(d: Disk) -> Self {
        [d.center.x, d.center.y, d.radius]
    }
}

/// Position of the reference point plus heading (radians).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vec2,
    pub theta: f64,
}

impl Pose {
    pub const fn new(position: Vec2, theta: f64) -> Self {
        Self { position, theta }
    }
}

/// Convex hull of two disks: the tangent-segment "bone" between neighbouring
/// medial disks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexPiece {
    pub disks: [Disk; 2],
}

impl ConvexPiece {
    pub fn is_degenerate(&self) -> bool {
        self.disks[0] == self.disks[1]
    }
}

/// Chain of medial disks joined by tangent segments.
///
/// Disks are stored in the agent's body frame (x forward) unless the shape was
/// produced by [`CtmatShape::place`], in which case they are in world
/// coordinates and `reference_offset` holds the world reference point.
#[derive(Debug, Clone, PartialEq)]
pub struct CtmatShape {
    disks: Vec<Disk>,
    pieces: Vec<ConvexPiece>,
    width: f64,
    reference_offset: Vec2,
}

impl CtmatShape {
    pub fn new(disks: Vec<Disk>, reference_offset: Vec2) -> Result<Self, GeometryError> {
        if disks.is_empty() {
            return Err(GeometryError::EmptyShape);
        }
        for (i, d) in disks.iter().enumerate() {
            if !d.center.is_finite() || !d.radius.is_finite() || d.radius < 0.0 {
                return Err(GeometryError::InvalidDisk(i));
            }
        }
        if !reference_offset.is_finite() {
            return Err(GeometryError::InvalidReference);
        }
        let width = lateral_extent(&disks);
        if width <= 0.0 {
            return Err(GeometryError::ZeroWidth);
        }
        Ok(Self::from_parts(disks, width, reference_offset))
    }

    /// Shape whose reference point sits at the middle of the disk chain's
    /// bounding box.
    pub fn centered(disks: Vec<Disk>) -> Result<Self, GeometryError> {
        let mid = bounding_box_mid(&disks);
        Self::new(disks, mid)
    }

    fn from_parts(disks: Vec<Disk>, width: f64, reference_offset: Vec2) -> Self {
        let pieces = disks.windows(2).map(|w| ConvexPiece { disks: [w[0], w[1]] }).collect();
        Self {
            disks,
            pieces,
            width,
            reference_offset,
        }
    }

    pub fn disks(&self) -> &[Disk] {
        &self.disks
    }

    pub fn pieces(&self) -> &[ConvexPiece] {
        &self.pieces
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn reference_offset(&self) -> Vec2 {
        self.reference_offset
    }

    /// Convex parts as disk slices: every adjacent pair, or the lone disk of a
    /// single-disk shape.
    pub fn hull_slices(&self) -> std::slice::Windows<'_, Disk> {
        self.disks.windows(self.disks.len().min(2))
    }

    /// Largest distance from the reference point to any point of the shape.
    pub fn reach(&self) -> f64 {
        self.disks
            .iter()
            .map(|d| d.center.distance(self.reference_offset) + d.radius)
            .fold(0.0, f64::max)
    }

    /// Rigidly moves a body-frame shape so its reference point lands on
    /// `pose.position` with the body x-axis along `pose.theta`.
    pub fn place(&self, pose: Pose) -> CtmatShape {
        let (s, c) = pose.theta.sin_cos();
        let disks = self
            .disks
            .iter()
            .map(|d| {
                Disk::new(
                    pose.position + (d.center - self.reference_offset).rotate_sc(s, c),
                    d.radius,
                )
            })
            .collect();
        Self::from_parts(disks, self.width, pose.position)
    }

    /// Mid-point of the chain's bounding box; the pedestrian reference point.
    pub fn midpoint(&self) -> Vec2 {
        bounding_box_mid(&self.disks)
    }

    pub fn translated(&self, by: Vec2) -> CtmatShape {
        let disks = self.disks.iter().map(|d| Disk::new(d.center + by, d.radius)).collect();
        Self::from_parts(disks, self.width, self.reference_offset + by)
    }
}

/// Free-function form of [`CtmatShape::place`].
pub fn place_shape(shape: &CtmatShape, pose: Pose) -> CtmatShape {
    shape.place(pose)
}

fn lateral_extent(disks: &[Disk]) -> f64 {
    let hi = disks
        .iter()
        .map(|d| d.center.y + d.radius)
        .fold(f64::NEG_INFINITY, f64::max);
    let lo = disks
        .iter()
        .map(|d| d.center.y - d.radius)
        .fold(f64::INFINITY, f64::min);
    hi - lo
}

fn bounding_box_mid(disks: &[Disk]) -> Vec2 {
    let (mut lo, mut hi) = (
        Vec2::new(f64::INFINITY, f64::INFINITY),
        Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
    );
    for d in disks {
        lo.x = lo.x.min(d.center.x - d.radius);
        lo.y = lo.y.min(d.center.y - d.radius);
        hi.x = hi.x.max(d.center.x + d.radius);
        hi.y = hi.y.max(d.center.y + d.radius);
    }
    (lo + hi) * 0.5
}
