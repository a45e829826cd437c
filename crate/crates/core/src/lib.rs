//! Verification laboratory for local symplectic surface models.
//!
//! The crate certifies, numerically and combinatorially, the explicit
//! constructions behind a family of surface isotopy arguments in
//! 4-dimensional charts:
//!
//! - circle-action orbit surfaces, Lagrangian disk push-offs and nodal
//!   degenerations ([`models`]);
//! - the radial-cutoff node orthogonalization and the Moser flow from the
//!   Kahler to the Darboux form ([`isotopies`]);
//! - splitting-system combinatorics on closed surfaces and integer
//!   homology of curve complements ([`topology`]);
//! - batch verification suites, figure emission and reports ([`suite`]).
//!
//! All numerics run on two fixed charts defined in [`geometry`].

pub mod geometry;
pub mod models;

pub use geometry::{Chart, ChartPoint, Frame, GeometryError, Tangent4};
