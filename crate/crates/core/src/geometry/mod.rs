//! Medial-axis (disk chain) shapes and the collision geometry built on them.

mod hull;
mod minkowski;
mod shape;
mod tangent;

pub use hull::{hull_gap, point_gap, ray_entry, support, BoundingCircle, DiskHull};
pub use minkowski::{
    contains_origin, minkowski_sum, point_shape_distance, point_shape_gap, shape_gap, shapes_overlap, shapes_within,
    signed_distance_origin, MinkowskiSumShape,
};
pub use shape::{place_shape, ConvexPiece, CtmatShape, Disk, Pose};
pub use tangent::{disks_tangent_interval, tangent_angles, TangentInterval};

/// Absolute tolerance (metres) for closed-set geometric predicates.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("shape has no disks")]
    EmptyShape,
    #[error("disk {0} has a negative or non-finite radius or centre")]
    InvalidDisk(usize),
    #[error("reference point is not finite")]
    InvalidReference,
    #[error("shape has zero lateral width")]
    ZeroWidth,
    #[error("viewpoint lies inside the shape")]
    ViewpointInsideShape,
}
