//! Explicit surface and disk models: circle-action orbit surfaces,
//! Lagrangian disk push-offs, nodal degenerations, node smoothings, and
//! the linear chart change that intertwines the two model families.

pub mod c1;
pub mod coord;
pub mod disk;
pub mod profile;
pub mod smoothing;

use thiserror::Error;

use crate::geometry::GeometryError;

pub use c1::{c1_distance, polyline_hausdorff, C1Target};
pub use coord::CoordinateChangeS4;
pub use disk::{
    intersection_circles, normal_winding, pushoff_disk, sigma_ml, winding_number, ParamCircle,
    PushoffDisk, PushoffSign, ZeroSectionDisk,
};
pub use profile::{
    deformation_family, nodalized_profile, orbit_surface, orbit_surface_reversed,
    profile_admissible, ProfileCurve,
};
pub use smoothing::{
    gamma_smoothing, lagrangian_disk_in_smoothing, rotated_smoothing, GammaCurve, NodeModel,
};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("corner radius {radius} does not fit (limit {limit:.6})")]
    CornerTooLarge { radius: f64, limit: f64 },
    #[error("gamma curve violates its invariants: {0}")]
    InvalidGamma(String),
    #[error("hyperbola constraint violated on core region: residual {residual:.3e} at s = {s}")]
    ConstraintViolation { residual: f64, s: f64 },
    #[error("fiber component vanishes along the loop (min |p| = {0:.3e})")]
    TransversalityFailure(f64),
    #[error("surface does not contain the disk boundary (residual {0:.3e})")]
    BoundaryMismatch(f64),
    #[error("projection onto target failed (residual {0:.3e})")]
    ProjectionFailure(f64),
    #[error("profile parse error: {0}")]
    Parse(String),
}
