//! The omega-orthogonal node model, its symplectic smoothing by a planar
//! curve `gamma`, the rotated smoothings for non-orthogonal complex nodes,
//! and the embedded Lagrangian disk inside the smoothing.

use std::sync::Arc;

use crate::geometry::patch::{ParamPatch, Rect};
use crate::geometry::{Chart, ChartPoint};

use super::ModelError;

const TAU: f64 = std::f64::consts::TAU;

/// The model node: two coordinate disks meeting omega-orthogonally at 0.
#[derive(Debug, Clone, Copy)]
pub struct NodeModel {
    pub eps1: f64,
    pub eps2: f64,
}

impl NodeModel {
    pub fn new(eps1: f64, eps2: f64) -> Result<Self, ModelError> {
        if eps1 <= 0.0 || eps2 <= 0.0 {
            return Err(ModelError::InvalidParameter("node disk radii must be positive".into()));
        }
        Ok(NodeModel { eps1, eps2 })
    }

    /// Disk radii sized to contain the endpoint rings of a gamma curve.
    pub fn for_gamma(gamma: &GammaCurve) -> Self {
        NodeModel { eps1: gamma.gamma1(0.0), eps2: gamma.gamma2(1.0) }
    }

    /// Distance from the point to the first coordinate disk
    /// `{(x1, y1, 0, 0) : x1^2 + y1^2 <= eps1^2}`.
    pub fn distance_to_disk1(&self, p: &ChartPoint) -> f64 {
        let c = p.coords;
        let radial = ((c[0] * c[0] + c[1] * c[1]).sqrt() - self.eps1).max(0.0);
        (radial * radial + c[2] * c[2] + c[3] * c[3]).sqrt()
    }

    pub fn distance_to_disk2(&self, p: &ChartPoint) -> f64 {
        let c = p.coords;
        let radial = ((c[2] * c[2] + c[3] * c[3]).sqrt() - self.eps2).max(0.0);
        (radial * radial + c[0] * c[0] + c[1] * c[1]).sqrt()
    }
}

type Scalar = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A smoothing curve `s -> (gamma1(s), gamma2(s))` in the real `(x1, x2)`
/// plane: follows the positive `x1`-axis near `s = 0`, the positive
/// `x2`-axis near `s = 1`, with `gamma1, gamma2, gamma2' >= 0`,
/// `gamma1' <= 0`, and the degenerate values confined to the ends
/// (`gamma2 = gamma2' = 0` only near 0, `gamma1 = gamma1' = 0` only
/// near 1).
#[derive(Clone)]
pub struct GammaCurve {
    pub name: String,
    g1: Scalar,
    g2: Scalar,
    d1: Scalar,
    d2: Scalar,
    /// Sub-interval on which `gamma1 * gamma2` is exactly constant.
    pub core: (f64, f64),
    /// Endpoint radii `(gamma1(0), gamma2(1))`.
    pub endpoint_radii: (f64, f64),
}

/// 7th-order smoothstep: value and first three derivatives vanish at 0,
/// value 1 with three vanishing derivatives at 1, monotone in between.
fn smoothstep7(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let u3 = u * u * u;
        u3 * u * (35.0 - 84.0 * u + 70.0 * u * u - 20.0 * u3)
    }
}

fn smoothstep7_deriv(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        let w = u * (1.0 - u);
        140.0 * w * w * w
    }
}

impl std::fmt::Debug for GammaCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GammaCurve")
            .field("name", &self.name)
            .field("core", &self.core)
            .field("endpoint_radii", &self.endpoint_radii)
            .finish_non_exhaustive()
    }
}

impl GammaCurve {
    /// Default construction: a log-linear hyperbola branch
    /// `gamma2 = eps_prime * exp(5K(s - 1/2))` on `[0.3, 1]`, tapered to
    /// zero across `[0.1, 0.3]` with a flat smoothstep, and
    /// `gamma1(s) := gamma2(1 - s)`. On the core `[0.3, 0.7]` the product
    /// is exactly `eps_prime^2` and the curve passes through
    /// `(eps_prime, eps_prime)` at `s = 1/2`. `ratio` sets the endpoint
    /// radius over `eps_prime`.
    pub fn standard(eps_prime: f64, ratio: f64) -> Result<Self, ModelError> {
        if eps_prime <= 0.0 {
            return Err(ModelError::InvalidParameter("eps_prime must be positive".into()));
        }
        if ratio <= 1.0 {
            return Err(ModelError::InvalidParameter("ratio must exceed 1".into()));
        }
        let k = ratio.ln() / 2.5;
        let z1 = 0.1;
        let z2 = 0.3;
        let g2 = move |s: f64| -> f64 {
            if s <= z1 {
                0.0
            } else {
                let hyper = eps_prime * (5.0 * k * (s - 0.5)).exp();
                if s < z2 {
                    hyper * smoothstep7((s - z1) / (z2 - z1))
                } else {
                    hyper
                }
            }
        };
        let d2 = move |s: f64| -> f64 {
            if s <= z1 {
                0.0
            } else {
                let hyper = eps_prime * (5.0 * k * (s - 0.5)).exp();
                if s < z2 {
                    let u = (s - z1) / (z2 - z1);
                    hyper * (5.0 * k * smoothstep7(u) + smoothstep7_deriv(u) / (z2 - z1))
                } else {
                    5.0 * k * hyper
                }
            }
        };
        let g1 = move |s: f64| g2(1.0 - s);
        let d1 = move |s: f64| -d2(1.0 - s);
        let curve = GammaCurve {
            name: format!("gamma[eps'={eps_prime}]"),
            g1: Arc::new(g1),
            g2: Arc::new(g2),
            d1: Arc::new(d1),
            d2: Arc::new(d2),
            core: (z2, 1.0 - z2),
            endpoint_radii: (g2(1.0), g2(1.0)),
        };
        curve.validate(2000)?;
        Ok(curve)
    }

    pub fn from_parts(
        name: impl Into<String>,
        g1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        core: (f64, f64),
    ) -> Self {
        let endpoint_radii = (g1(0.0), g2(1.0));
        GammaCurve {
            name: name.into(),
            g1: Arc::new(g1),
            g2: Arc::new(g2),
            d1: Arc::new(d1),
            d2: Arc::new(d2),
            core,
            endpoint_radii,
        }
    }

    pub fn gamma1(&self, s: f64) -> f64 {
        (self.g1)(s)
    }

    pub fn gamma2(&self, s: f64) -> f64 {
        (self.g2)(s)
    }

    pub fn dgamma1(&self, s: f64) -> f64 {
        (self.d1)(s)
    }

    pub fn dgamma2(&self, s: f64) -> f64 {
        (self.d2)(s)
    }

    /// Closed-form annulus density `gamma2 gamma2' - gamma1 gamma1'`.
    pub fn density(&self, s: f64) -> f64 {
        self.gamma2(s) * self.dgamma2(s) - self.gamma1(s) * self.dgamma1(s)
    }

    /// Check the sign/vanishing pattern and density positivity on a
    /// uniform sample of `[0, 1]`.
    pub fn validate(&self, n: usize) -> Result<(), ModelError> {
        let end_zone = 0.15;
        for k in 0..=n {
            let s = k as f64 / n as f64;
            let (g1, g2, d1, d2) = (self.gamma1(s), self.gamma2(s), self.dgamma1(s), self.dgamma2(s));
            if g1 < 0.0 || g2 < 0.0 {
                return Err(ModelError::InvalidGamma(format!("negative component at s = {s}")));
            }
            if d2 < 0.0 {
                return Err(ModelError::InvalidGamma(format!("gamma2' = {d2} < 0 at s = {s}")));
            }
            if d1 > 0.0 {
                return Err(ModelError::InvalidGamma(format!("gamma1' = {d1} > 0 at s = {s}")));
            }
            if g2 == 0.0 && s > end_zone {
                return Err(ModelError::InvalidGamma(format!("gamma2 vanishes at s = {s}")));
            }
            if g1 == 0.0 && s < 1.0 - end_zone {
                return Err(ModelError::InvalidGamma(format!("gamma1 vanishes at s = {s}")));
            }
            let density = g2 * d2 - g1 * d1;
            if !(density > 0.0) {
                return Err(ModelError::InvalidGamma(format!(
                    "density {density} not positive at s = {s}"
                )));
            }
        }
        // endpoints sit on the correct axes
        if self.gamma2(0.0) != 0.0 || self.gamma1(1.0) != 0.0 {
            return Err(ModelError::InvalidGamma("endpoints not on the coordinate axes".into()));
        }
        Ok(())
    }

    /// Max residual of `gamma1 * gamma2 - target` on core samples.
    pub fn core_product_residual(&self, target: f64, n: usize) -> f64 {
        let (c0, c1) = self.core;
        let mut worst: f64 = 0.0;
        for k in 0..=n {
            let s = c0 + (c1 - c0) * k as f64 / n as f64;
            worst = worst.max((self.gamma1(s) * self.gamma2(s) - target).abs());
        }
        worst
    }
}

/// The smoothing annulus `A(t, s) = (gamma1 e^{it}, gamma2 e^{-it})` over
/// `(t, s) in [0, 2pi] x [0, 1]`, with analytic partials. Its density is
/// `gamma2 gamma2' - gamma1 gamma1'`.
pub fn gamma_smoothing(gamma: &GammaCurve) -> Result<ParamPatch, ModelError> {
    gamma.validate(1000)?;
    let g = gamma.clone();
    let h = gamma.clone();
    Ok(ParamPatch::analytic(
        format!("A[{}]", gamma.name),
        Chart::Complex,
        Rect::new(0.0, TAU, 0.0, 1.0),
        move |t, s| {
            let (g1, g2) = (g.gamma1(s), g.gamma2(s));
            [g1 * t.cos(), g1 * t.sin(), g2 * t.cos(), -g2 * t.sin()]
        },
        move |t, s| {
            let (g1, g2, d1, d2) = (h.gamma1(s), h.gamma2(s), h.dgamma1(s), h.dgamma2(s));
            (
                [-g1 * t.sin(), g1 * t.cos(), -g2 * t.sin(), -g2 * t.cos()],
                [d1 * t.cos(), d1 * t.sin(), d2 * t.cos(), -d2 * t.sin()],
            )
        },
    ))
}

/// The rotated smoothing `A_{a+bi}` of the complex node
/// `(z1 - (a+bi) z2) z2 = 0`: parametrizes the complex deformation level
/// set `(z1 - (a+bi) z2) z2 = eps` wherever `gamma1 gamma2 = eps`.
///
/// Requires the product constraint to hold on the gamma curve's core
/// region (`residual < 1e-12`); outside the core the patch interpolates
/// toward the coordinate-axis annuli exactly like the unrotated model.
/// With `a = b = 0` the map reduces pointwise to [`gamma_smoothing`].
pub fn rotated_smoothing(
    a: f64,
    b: f64,
    gamma: &GammaCurve,
    eps: f64,
) -> Result<ParamPatch, ModelError> {
    gamma.validate(1000)?;
    let residual = gamma.core_product_residual(eps, 500);
    if residual >= 1e-12 {
        return Err(ModelError::ConstraintViolation { residual, s: gamma.core.0 });
    }
    let g = gamma.clone();
    let h = gamma.clone();
    Ok(ParamPatch::analytic(
        format!("A_{{{a}+{b}i}}[{}]", gamma.name),
        Chart::Complex,
        Rect::new(0.0, TAU, 0.0, 1.0),
        move |t, s| {
            let (g1, g2) = (g.gamma1(s), g.gamma2(s));
            [
                (g1 + a * g2) * t.cos() + b * g2 * t.sin(),
                (g1 - a * g2) * t.sin() + b * g2 * t.cos(),
                g2 * t.cos(),
                -g2 * t.sin(),
            ]
        },
        move |t, s| {
            let (g1, g2, d1, d2) = (h.gamma1(s), h.gamma2(s), h.dgamma1(s), h.dgamma2(s));
            (
                [
                    -(g1 + a * g2) * t.sin() + b * g2 * t.cos(),
                    (g1 - a * g2) * t.cos() - b * g2 * t.sin(),
                    -g2 * t.sin(),
                    -g2 * t.cos(),
                ],
                [
                    (d1 + a * d2) * t.cos() + b * d2 * t.sin(),
                    (d1 - a * d2) * t.sin() + b * d2 * t.cos(),
                    d2 * t.cos(),
                    -d2 * t.sin(),
                ],
            )
        },
    ))
}

/// Residual of the defining complex equation `(z1 - (a+bi) z2) z2 = eps`
/// at a chart point.
pub fn complex_curve_residual(p: &ChartPoint, a: f64, b: f64, eps: f64) -> f64 {
    let c = p.coords;
    // z1 z2 - (a+bi) z2^2 - eps
    let (x1, y1, x2, y2) = (c[0], c[1], c[2], c[3]);
    let z1z2 = (x1 * x2 - y1 * y2, x1 * y2 + y1 * x2);
    let z2sq = (x2 * x2 - y2 * y2, 2.0 * x2 * y2);
    let re = z1z2.0 - (a * z2sq.0 - b * z2sq.1) - eps;
    let im = z1z2.1 - (a * z2sq.1 + b * z2sq.0);
    (re * re + im * im).sqrt()
}

/// The embedded Lagrangian disk
/// `(r cos t, r sin t, r cos t, -r sin t)`, `r <= eps_prime`, whose
/// boundary lies on the smoothing annulus whenever the gamma curve passes
/// through `(eps_prime, eps_prime)`.
pub fn lagrangian_disk_in_smoothing(eps_prime: f64) -> Result<ParamPatch, ModelError> {
    if eps_prime <= 0.0 {
        return Err(ModelError::InvalidParameter("eps_prime must be positive".into()));
    }
    Ok(ParamPatch::analytic(
        format!("L[{eps_prime}]"),
        Chart::Complex,
        Rect::new(0.0, eps_prime, 0.0, TAU),
        |r, t| [r * t.cos(), r * t.sin(), r * t.cos(), -r * t.sin()],
        |r, t| {
            (
                [t.cos(), t.sin(), t.cos(), -t.sin()],
                [-r * t.sin(), r * t.cos(), -r * t.sin(), -r * t.cos()],
            )
        },
    ))
}
