//! The two analytic engines: node orthogonalization with a radial cutoff
//! (a 1-parameter family of symplectic planes is rotated onto the
//! `(x2, y2)` coordinate plane near the node, through symplectic
//! surfaces), and the Moser flow carrying the Kahler form of the affine
//! chart to the Darboux form.

pub mod cutoff;
pub mod moser;
pub mod ode;
pub mod phi;
pub mod plane;

use thiserror::Error;

use crate::geometry::GeometryError;

pub use cutoff::{build_cutoff, CutoffFn};
pub use moser::{
    lambda_form, moser_ft, moser_flow, moser_mu, moser_mu_form, omega_k, omega_t,
    radial_flow_oracle, verify_pullback,
};
pub use ode::{integrate, integrate_rk4, OdeOptions};
pub use phi::PhiModel;
pub use plane::{complex_preservation_check, eta_margin, is_complex_plane, PlaneFamily};

#[derive(Debug, Error)]
pub enum IsotopyError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("plane family violates the symplectic condition at t = {t}: ad - bc = {value}")]
    FamilyNotSymplectic { t: f64, value: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cutoff construction failed verification: {0}")]
    CutoffVerification(String),
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("flow failure: {0}")]
    FlowFailure(String),
}
