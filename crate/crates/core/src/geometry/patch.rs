//! Parametrized patches: smooth maps from a parameter rectangle into a
//! 4-dimensional chart, with analytic or finite-difference partials.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::forms::{pairing, TwoFormField};
use super::{check_charts, Chart, ChartPoint, Frame, GeometryError};

/// Closed parameter rectangle `[u0, u1] x [v0, v1]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Rect {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Rect {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Self {
        Rect { u0, u1, v0, v1 }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        // small slack for grid endpoints assembled by repeated addition
        let eps_u = 1e-12 * (1.0 + (self.u1 - self.u0).abs());
        let eps_v = 1e-12 * (1.0 + (self.v1 - self.v0).abs());
        u >= self.u0 - eps_u && u <= self.u1 + eps_u && v >= self.v0 - eps_v && v <= self.v1 + eps_v
    }

    pub fn clamp(&self, u: f64, v: f64) -> (f64, f64) {
        (u.clamp(self.u0, self.u1), v.clamp(self.v0, self.v1))
    }
}

/// How a patch supplies its partial derivatives.
#[derive(Clone)]
pub enum Partials {
    /// Closed-form `(u, v) -> (d/du, d/dv)`.
    Analytic(Arc<dyn Fn(f64, f64) -> ([f64; 4], [f64; 4]) + Send + Sync>),
    /// Centered finite differences with the declared step.
    FiniteDiff { h: f64 },
}

/// A smooth map from a parameter rectangle into one of the two charts.
///
/// The underlying map must be evaluable slightly outside the closed domain
/// so centered differences work on the boundary; the domain only gates
/// point queries and grid construction.
#[derive(Clone)]
pub struct ParamPatch {
    pub name: String,
    pub chart: Chart,
    pub domain: Rect,
    map: Arc<dyn Fn(f64, f64) -> [f64; 4] + Send + Sync>,
    partials: Partials,
}

impl std::fmt::Debug for ParamPatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParamPatch")
            .field("name", &self.name)
            .field("chart", &self.chart)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl ParamPatch {
    pub fn new(
        name: impl Into<String>,
        chart: Chart,
        domain: Rect,
        map: impl Fn(f64, f64) -> [f64; 4] + Send + Sync + 'static,
        partials: Partials,
    ) -> Self {
        ParamPatch { name: name.into(), chart, domain, map: Arc::new(map), partials }
    }

    pub fn analytic(
        name: impl Into<String>,
        chart: Chart,
        domain: Rect,
        map: impl Fn(f64, f64) -> [f64; 4] + Send + Sync + 'static,
        partials: impl Fn(f64, f64) -> ([f64; 4], [f64; 4]) + Send + Sync + 'static,
    ) -> Self {
        Self::new(name, chart, domain, map, Partials::Analytic(Arc::new(partials)))
    }

    pub fn finite_diff(
        name: impl Into<String>,
        chart: Chart,
        domain: Rect,
        map: impl Fn(f64, f64) -> [f64; 4] + Send + Sync + 'static,
        h: f64,
    ) -> Self {
        Self::new(name, chart, domain, map, Partials::FiniteDiff { h })
    }

    pub fn has_analytic_partials(&self) -> bool {
        matches!(self.partials, Partials::Analytic(_))
    }

    pub fn eval_raw(&self, u: f64, v: f64) -> [f64; 4] {
        (self.map)(u, v)
    }

    pub fn point(&self, u: f64, v: f64) -> Result<ChartPoint, GeometryError> {
        if !self.domain.contains(u, v) {
            return Err(GeometryError::DomainViolation(u, v));
        }
        Ok(ChartPoint::new(self.chart, self.eval_raw(u, v)))
    }

    /// Partials by the declared mechanism.
    pub fn partials(&self, u: f64, v: f64) -> ([f64; 4], [f64; 4]) {
        match &self.partials {
            Partials::Analytic(f) => f(u, v),
            Partials::FiniteDiff { h } => self.fd_partials(u, v, *h),
        }
    }

    /// Centered-difference partials, always available for cross-checks.
    pub fn fd_partials(&self, u: f64, v: f64, h: f64) -> ([f64; 4], [f64; 4]) {
        let up = self.eval_raw(u + h, v);
        let um = self.eval_raw(u - h, v);
        let vp = self.eval_raw(u, v + h);
        let vm = self.eval_raw(u, v - h);
        let mut du = [0.0; 4];
        let mut dv = [0.0; 4];
        for i in 0..4 {
            du[i] = (up[i] - um[i]) / (2.0 * h);
            dv[i] = (vp[i] - vm[i]) / (2.0 * h);
        }
        (du, dv)
    }

    pub fn frame(&self, u: f64, v: f64) -> Result<Frame, GeometryError> {
        let base = self.point(u, v)?;
        let (du, dv) = self.partials(u, v);
        Ok(Frame::new(base, du, dv))
    }
}

/// `ω(∂_u, ∂_v)` of the patch at `(u, v)`; the patch is symplectic at the
/// point iff the result is positive.
pub fn symplectic_density(
    patch: &ParamPatch,
    form: &TwoFormField,
    u: f64,
    v: f64,
) -> Result<f64, GeometryError> {
    check_charts(patch.chart, form.chart)?;
    if !patch.domain.contains(u, v) {
        return Err(GeometryError::DomainViolation(u, v));
    }
    let (du, dv) = patch.partials(u, v);
    let m = form.eval_coords(&patch.eval_raw(u, v));
    Ok(pairing(&m, &du, &dv))
}

/// Damped Gauss-Newton closest-point solve: finds `(u, v)` in the domain
/// minimizing the distance from `patch(u, v)` to `target`.
///
/// Seeded by a coarse grid scan. Returns `(u, v, distance)`.
pub fn closest_point(
    patch: &ParamPatch,
    target: &ChartPoint,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, f64, f64), GeometryError> {
    check_charts(patch.chart, target.chart)?;
    let d = &patch.domain;
    // coarse scan
    let scan = 48;
    let mut best = (d.u0, d.v0, f64::INFINITY);
    for i in 0..=scan {
        for j in 0..=scan {
            let u = d.u0 + (d.u1 - d.u0) * i as f64 / scan as f64;
            let v = d.v0 + (d.v1 - d.v0) * j as f64 / scan as f64;
            let p = patch.eval_raw(u, v);
            let dist2: f64 = (0..4).map(|k| (p[k] - target.coords[k]).powi(2)).sum();
            if dist2 < best.2 {
                best = (u, v, dist2);
            }
        }
    }
    let (mut u, mut v, _) = best;
    let residual = |u: f64, v: f64| -> [f64; 4] {
        let p = patch.eval_raw(u, v);
        [
            p[0] - target.coords[0],
            p[1] - target.coords[1],
            p[2] - target.coords[2],
            p[3] - target.coords[3],
        ]
    };
    let norm = |r: &[f64; 4]| r.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut r = residual(u, v);
    let mut dist = norm(&r);
    for _ in 0..max_iter {
        if dist <= tol {
            break;
        }
        let (ju, jv) = patch.partials(u, v);
        // normal equations of the 4x2 Jacobian
        let a11: f64 = ju.iter().map(|x| x * x).sum();
        let a12: f64 = ju.iter().zip(&jv).map(|(x, y)| x * y).sum();
        let a22: f64 = jv.iter().map(|x| x * x).sum();
        let b1: f64 = -ju.iter().zip(&r).map(|(x, y)| x * y).sum::<f64>();
        let b2: f64 = -jv.iter().zip(&r).map(|(x, y)| x * y).sum::<f64>();
        let det = a11 * a22 - a12 * a12;
        if det.abs() < 1e-300 {
            break;
        }
        let mut step_u = (b1 * a22 - b2 * a12) / det;
        let mut step_v = (a11 * b2 - a12 * b1) / det;
        // damping: halve until the residual does not increase
        let mut improved = false;
        for _ in 0..30 {
            let (cu, cv) = d.clamp(u + step_u, v + step_v);
            let rn = residual(cu, cv);
            let dn = norm(&rn);
            if dn <= dist {
                u = cu;
                v = cv;
                r = rn;
                dist = dn;
                improved = true;
                break;
            }
            step_u *= 0.5;
            step_v *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok((u, v, dist))
}

/// Membership test: true iff the target lies on the patch within `tol`.
pub fn on_patch(patch: &ParamPatch, target: &ChartPoint, tol: f64) -> Result<bool, GeometryError> {
    let (_, _, dist) = closest_point(patch, target, tol, 50)?;
    Ok(dist <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::forms::std_form;

    fn plane_patch() -> ParamPatch {
        // the (q1, q2)-plane of the zero section
        ParamPatch::analytic(
            "zero-section",
            Chart::Cotangent,
            Rect::new(-1.0, 1.0, -1.0, 1.0),
            |u, v| [u, 0.0, v, 0.0],
            |_, _| ([1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]),
        )
    }

    #[test]
    fn domain_violation_is_an_error() {
        let p = plane_patch();
        assert!(p.point(2.0, 0.0).is_err());
        assert!(p.point(0.5, 0.5).is_ok());
    }

    #[test]
    fn lagrangian_plane_has_zero_density() {
        let p = plane_patch();
        let w = std_form(Chart::Cotangent);
        assert_eq!(symplectic_density(&p, &w, 0.3, -0.4).unwrap(), 0.0);
    }

    #[test]
    fn fd_partials_match_analytic_on_a_curved_patch() {
        let patch = ParamPatch::analytic(
            "curved",
            Chart::Complex,
            Rect::new(0.0, std::f64::consts::TAU, -1.0, 1.0),
            |u, v| [u.cos() * (1.0 + v), u.sin() * (1.0 + v), v * v, u * v],
            |u, v| {
                (
                    [-u.sin() * (1.0 + v), u.cos() * (1.0 + v), 0.0, v],
                    [u.cos(), u.sin(), 2.0 * v, u],
                )
            },
        );
        let (au, av) = patch.partials(1.1, 0.4);
        let (fu, fv) = patch.fd_partials(1.1, 0.4, 1e-5);
        for i in 0..4 {
            assert!((au[i] - fu[i]).abs() < 1e-8);
            assert!((av[i] - fv[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn closest_point_recovers_an_on_patch_point() {
        let p = plane_patch();
        let target = ChartPoint::cotangent(0.25, 0.0, -0.6, 0.0);
        let (u, v, dist) = closest_point(&p, &target, 1e-12, 50).unwrap();
        assert!(dist < 1e-12);
        assert!((u - 0.25).abs() < 1e-9);
        assert!((v + 0.6).abs() < 1e-9);
    }

    #[test]
    fn closest_point_reports_distance_for_off_patch_point() {
        let p = plane_patch();
        let target = ChartPoint::cotangent(0.0, 0.5, 0.0, 0.0);
        let (_, _, dist) = closest_point(&p, &target, 1e-12, 50).unwrap();
        assert!((dist - 0.5).abs() < 1e-9);
    }
}
