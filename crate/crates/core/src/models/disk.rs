//! The model Lagrangian disk, its symplectic annulus neighborhood model,
//! the two push-off disks, and the boundary framing computation.

use std::sync::Arc;

use crate::geometry::forms::{eval_form, std_form};
use crate::geometry::patch::{closest_point, ParamPatch, Rect};
use crate::geometry::{Chart, ChartPoint, Frame};

use super::ModelError;

const TAU: f64 = std::f64::consts::TAU;

/// The unit(ish) disk in the zero section of the cotangent chart.
#[derive(Debug, Clone, Copy)]
pub struct ZeroSectionDisk {
    pub radius: f64,
}

impl ZeroSectionDisk {
    pub fn unit() -> Self {
        ZeroSectionDisk { radius: 1.0 }
    }

    pub fn boundary_point(&self, theta: f64) -> ChartPoint {
        ChartPoint::cotangent(self.radius * theta.cos(), 0.0, self.radius * theta.sin(), 0.0)
    }

    /// The disk as a patch over `(q1, q2)` (density is identically zero).
    pub fn patch(&self) -> ParamPatch {
        let r = self.radius;
        ParamPatch::analytic(
            "D_ml",
            Chart::Cotangent,
            Rect::new(-r, r, -r, r),
            |q1, q2| [q1, 0.0, q2, 0.0],
            |_, _| ([1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]),
        )
    }
}

/// The model symplectic annulus
/// `A(t, s) = (cos t, -s sin t, sin t, s cos t)` over `[0, 2pi] x [-c, c]`.
/// Its symplectic density is identically 1.
pub fn sigma_ml(c: f64) -> ParamPatch {
    assert!(c > 0.0, "half-width must be positive");
    ParamPatch::analytic(
        "Sigma_ml",
        Chart::Cotangent,
        Rect::new(0.0, TAU, -c, c),
        |t, s| [t.cos(), -s * t.sin(), t.sin(), s * t.cos()],
        |t, s| {
            (
                [-t.sin(), -s * t.cos(), t.cos(), -s * t.sin()],
                [0.0, -t.sin(), 0.0, t.cos()],
            )
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PushoffSign {
    Plus,
    Minus,
}

/// A symplectic push-off of the model Lagrangian disk.
pub struct PushoffDisk {
    pub sign: PushoffSign,
    pub epsilon: f64,
    pub patch: ParamPatch,
}

impl PushoffDisk {
    /// The constant tangent frame, matching the displayed basis:
    /// minus: `(dq1 + e dp2, dq2 - e dp1)`, plus: `(dq1 - e dp2, dq2 + e dp1)`.
    pub fn frame_at(&self, q1: f64, q2: f64) -> Result<Frame, ModelError> {
        let base = self.patch.point(q1, q2)?;
        let e = self.epsilon;
        let (u, v) = match self.sign {
            PushoffSign::Minus => ([1.0, 0.0, 0.0, e], [0.0, -e, 1.0, 0.0]),
            PushoffSign::Plus => ([1.0, 0.0, 0.0, -e], [0.0, e, 1.0, 0.0]),
        };
        Ok(Frame::new(base, u, v))
    }

    /// `omega` evaluated on the push-off frame; equals `-2e` for the minus
    /// disk and `+2e` for the plus disk.
    pub fn frame_pairing(&self) -> f64 {
        let frame = self.frame_at(0.0, 0.0).expect("origin is in the domain");
        let w = std_form(Chart::Cotangent);
        eval_form(&w, &frame.base, &frame.first(), &frame.second()).expect("same chart")
    }

    pub fn contains(&self, q1: f64, q2: f64) -> bool {
        q1 * q1 + q2 * q2 <= 1.0
    }
}

/// Build a push-off disk `D_±` with offset `epsilon > 0`, parametrized
/// over `(q1, q2)` in the unit square (the disk is the subset
/// `q1^2 + q2^2 <= 1`).
pub fn pushoff_disk(sign: PushoffSign, epsilon: f64) -> Result<PushoffDisk, ModelError> {
    if epsilon <= 0.0 {
        return Err(ModelError::InvalidParameter(format!("epsilon = {epsilon} must be > 0")));
    }
    let e = epsilon;
    let domain = Rect::new(-1.0, 1.0, -1.0, 1.0);
    let patch = match sign {
        PushoffSign::Minus => ParamPatch::analytic(
            "D_minus",
            Chart::Cotangent,
            domain,
            move |q1, q2| [q1, -e * q2, q2, e * q1],
            move |_, _| ([1.0, 0.0, 0.0, e], [0.0, -e, 1.0, 0.0]),
        ),
        PushoffSign::Plus => ParamPatch::analytic(
            "D_plus",
            Chart::Cotangent,
            domain,
            move |q1, q2| [q1, e * q2, q2, -e * q1],
            move |_, _| ([1.0, 0.0, 0.0, -e], [0.0, e, 1.0, 0.0]),
        ),
    };
    Ok(PushoffDisk { sign, epsilon, patch })
}

/// A parametrized circle in one of the charts.
#[derive(Clone)]
pub struct ParamCircle {
    pub name: String,
    pub chart: Chart,
    map: Arc<dyn Fn(f64) -> [f64; 4] + Send + Sync>,
}

impl ParamCircle {
    pub fn point(&self, theta: f64) -> ChartPoint {
        ChartPoint::new(self.chart, (self.map)(theta))
    }
}

/// The two clean intersection circles of the model annulus with the
/// push-offs: `Sigma ∩ D_- = (cos t, -e sin t, sin t, e cos t)` and
/// `Sigma ∩ D_+ = (cos t, e sin t, sin t, -e cos t)`.
pub fn intersection_circles(epsilon: f64) -> Result<(ParamCircle, ParamCircle), ModelError> {
    if epsilon <= 0.0 {
        return Err(ModelError::InvalidParameter(format!("epsilon = {epsilon} must be > 0")));
    }
    let e = epsilon;
    let minus = ParamCircle {
        name: "Sigma ∩ D_-".into(),
        chart: Chart::Cotangent,
        map: Arc::new(move |t: f64| [t.cos(), -e * t.sin(), t.sin(), e * t.cos()]),
    };
    let plus = ParamCircle {
        name: "Sigma ∩ D_+".into(),
        chart: Chart::Cotangent,
        map: Arc::new(move |t: f64| [t.cos(), e * t.sin(), t.sin(), -e * t.cos()]),
    };
    Ok((minus, plus))
}

/// Membership residual of a circle against a patch: the max over sampled
/// circle points of the closest-point distance to the patch.
pub fn circle_membership_residual(
    circle: &ParamCircle,
    patch: &ParamPatch,
    samples: usize,
) -> Result<f64, ModelError> {
    let mut worst: f64 = 0.0;
    for k in 0..samples {
        let theta = TAU * k as f64 / samples as f64;
        let p = circle.point(theta);
        let (_, _, dist) = closest_point(patch, &p, 1e-13, 60)?;
        worst = worst.max(dist);
    }
    Ok(worst)
}

/// Winding number of a loop of plane vectors by angle accumulation.
///
/// Samples must be dense enough that consecutive vectors turn by less
/// than pi. Errors if any vector is shorter than `tol` (the field is not
/// transverse to zero).
pub fn winding_number(samples: &[(f64, f64)], tol: f64) -> Result<i64, ModelError> {
    let n = samples.len();
    assert!(n >= 4, "need at least 4 samples");
    let mut min_len = f64::INFINITY;
    let mut total = 0.0;
    for k in 0..n {
        let (x0, y0) = samples[k];
        let (x1, y1) = samples[(k + 1) % n];
        let l0 = (x0 * x0 + y0 * y0).sqrt();
        min_len = min_len.min(l0);
        if l0 < tol {
            return Err(ModelError::TransversalityFailure(min_len));
        }
        // signed turn from v0 to v1
        let dot = x0 * x1 + y0 * y1;
        let cross = x0 * y1 - y0 * x1;
        total += cross.atan2(dot);
    }
    Ok((total / TAU).round() as i64)
}

/// Framing of the disk boundary induced by a surface containing it.
///
/// The surface patch must trace `∂disk` along its parameter line
/// `v = boundary_v`; the in-surface normal-to-boundary field there is the
/// `v`-partial, and the returned integer is the winding of its fiber
/// (`p1`, `p2`) component relative to the constant trivialization.
pub fn normal_winding(
    surface: &ParamPatch,
    disk: &ZeroSectionDisk,
    boundary_v: f64,
    samples: usize,
) -> Result<i64, ModelError> {
    let d = &surface.domain;
    let mut field = Vec::with_capacity(samples);
    let mut boundary_residual: f64 = 0.0;
    for k in 0..samples {
        let u = d.u0 + (d.u1 - d.u0) * k as f64 / samples as f64;
        let p = surface.eval_raw(u, boundary_v);
        let radial = (p[0] * p[0] + p[2] * p[2]).sqrt() - disk.radius;
        boundary_residual = boundary_residual.max(radial.abs()).max(p[1].abs()).max(p[3].abs());
        let (_, dv) = surface.partials(u, boundary_v);
        field.push((dv[1], dv[3]));
    }
    if boundary_residual > 1e-9 {
        return Err(ModelError::BoundaryMismatch(boundary_residual));
    }
    winding_number(&field, 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::forms::{eval_form, std_form};
    use crate::geometry::patch::symplectic_density;
    use crate::geometry::{omega_orthogonal, orientation_sign, Tangent4};
    use rand::{Rng, SeedableRng};

    #[test]
    fn sigma_ml_substitution_and_boundary() {
        let sigma = sigma_ml(1.0);
        let p = sigma.point(0.0, 0.0).unwrap();
        assert_eq!(p.coords, [1.0, 0.0, 0.0, 0.0]);
        // s = 0 traces the unit circle in the zero section
        for t in [0.3, 1.2, 4.0] {
            let p = sigma.point(t, 0.0).unwrap().coords;
            assert!((p[0] - t.cos()).abs() < 1e-15);
            assert_eq!(p[1], 0.0);
            assert!((p[2] - t.sin()).abs() < 1e-15);
            assert_eq!(p[3], 0.0);
        }
    }

    #[test]
    fn sigma_ml_density_is_exactly_one_at_random_points() {
        let sigma = sigma_ml(1.0);
        let w = std_form(Chart::Cotangent);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..1000 {
            let t = rng.random_range(0.0..TAU);
            let s = rng.random_range(-1.0..1.0);
            let d = symplectic_density(&sigma, &w, t, s).unwrap();
            assert!((d - 1.0).abs() < 1e-15, "density {d}");
        }
    }

    #[test]
    fn pushoff_pairings_match_displayed_values() {
        for eps in [1e-3, 1e-2, 0.1] {
            let minus = pushoff_disk(PushoffSign::Minus, eps).unwrap();
            let plus = pushoff_disk(PushoffSign::Plus, eps).unwrap();
            assert!((minus.frame_pairing() + 2.0 * eps).abs() < 1e-15);
            assert!((plus.frame_pairing() - 2.0 * eps).abs() < 1e-15);
        }
    }

    #[test]
    fn pushoffs_intersect_omega_orthogonally_at_origin() {
        let eps = 0.05;
        let minus = pushoff_disk(PushoffSign::Minus, eps).unwrap();
        let plus = pushoff_disk(PushoffSign::Plus, eps).unwrap();
        let fm = minus.frame_at(0.0, 0.0).unwrap();
        let fp = plus.frame_at(0.0, 0.0).unwrap();
        let w = std_form(Chart::Cotangent);
        assert!(omega_orthogonal(&w, &fp, &fm, 1e-12).unwrap());
        // a symplectic plane is not omega-orthogonal to itself
        assert!(!omega_orthogonal(&w, &fp, &fp, 1e-12).unwrap());
    }

    #[test]
    fn concatenated_pushoff_frames_are_positively_oriented() {
        let eps = 0.01;
        let plus = pushoff_disk(PushoffSign::Plus, eps).unwrap();
        let minus = pushoff_disk(PushoffSign::Minus, eps).unwrap();
        let fp = plus.frame_at(0.0, 0.0).unwrap();
        let fm = minus.frame_at(0.0, 0.0).unwrap();
        let s = orientation_sign(&fp.first(), &fp.second(), &fm.second(), &fm.first(), 1e-12)
            .unwrap();
        assert_eq!(s, 1);
    }

    #[test]
    fn intersection_circles_lie_on_both_surfaces() {
        let eps = 0.1;
        let (cm, cp) = intersection_circles(eps).unwrap();
        assert_eq!(cm.point(0.0).coords, [1.0, 0.0, 0.0, eps]);
        let sigma = sigma_ml(1.0);
        let dm = pushoff_disk(PushoffSign::Minus, eps).unwrap();
        let dp = pushoff_disk(PushoffSign::Plus, eps).unwrap();
        assert!(circle_membership_residual(&cm, &sigma, 60).unwrap() < 1e-12);
        assert!(circle_membership_residual(&cm, &dm.patch, 60).unwrap() < 1e-12);
        assert!(circle_membership_residual(&cp, &sigma, 60).unwrap() < 1e-12);
        assert!(circle_membership_residual(&cp, &dp.patch, 60).unwrap() < 1e-12);
    }

    #[test]
    fn intersection_circles_are_disjoint() {
        let eps = 0.1;
        let (cm, cp) = intersection_circles(eps).unwrap();
        let mut min_dist = f64::INFINITY;
        for i in 0..90 {
            let a = cm.point(TAU * i as f64 / 90.0);
            for j in 0..90 {
                let b = cp.point(TAU * j as f64 / 90.0);
                min_dist = min_dist.min(a.distance(&b).unwrap());
            }
        }
        assert!(min_dist > eps, "circles approach within {min_dist}");
    }

    #[test]
    fn winding_of_model_annulus_along_disk_boundary_is_plus_one() {
        let sigma = sigma_ml(1.0);
        let disk = ZeroSectionDisk::unit();
        assert_eq!(normal_winding(&sigma, &disk, 0.0, 720).unwrap(), 1);
    }

    #[test]
    fn conormal_field_winds_once() {
        // conormal direction to the boundary circle, i.e. the Gauss map
        let field: Vec<(f64, f64)> =
            (0..360).map(|k| (TAU * k as f64 / 360.0).sin_cos()).map(|(s, c)| (c, s)).collect();
        assert_eq!(winding_number(&field, 1e-9).unwrap(), 1);
    }

    #[test]
    fn synthetic_double_rotation_winds_twice() {
        // surface whose in-surface normal rotates twice in the fibers
        let patch = ParamPatch::finite_diff(
            "double",
            Chart::Cotangent,
            Rect::new(0.0, TAU, -0.5, 0.5),
            |t, s| [t.cos(), s * (2.0 * t).cos(), t.sin(), s * (2.0 * t).sin()],
            1e-5,
        );
        assert_eq!(normal_winding(&patch, &ZeroSectionDisk::unit(), 0.0, 720).unwrap(), 2);
    }

    #[test]
    fn vanishing_fiber_component_is_a_transversality_error() {
        // zero-section disk: its v-partial has no fiber component at all
        let disk = ZeroSectionDisk::unit();
        let flat = ParamPatch::finite_diff(
            "flat",
            Chart::Cotangent,
            Rect::new(0.0, TAU, -0.5, 0.5),
            |t, s| [(1.0 + s) * t.cos(), 0.0, (1.0 + s) * t.sin(), 0.0],
            1e-5,
        );
        match normal_winding(&flat, &disk, 0.0, 128) {
            Err(ModelError::TransversalityFailure(_)) => {}
            other => panic!("expected transversality failure, got {other:?}"),
        }
    }

    #[test]
    fn random_tangent_pairings_of_sigma_and_pushoffs() {
        // spot-check eval_form against the displayed -2e / +2e on the
        // actual patch frames rather than hand-built vectors
        let eps = 0.02;
        let minus = pushoff_disk(PushoffSign::Minus, eps).unwrap();
        let w = std_form(Chart::Cotangent);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let q1 = rng.random_range(-0.7..0.7);
            let q2 = rng.random_range(-0.7..0.7);
            let f = minus.patch.frame(q1, q2).unwrap();
            let val = eval_form(&w, &f.base, &f.first(), &f.second()).unwrap();
            assert!((val + 2.0 * eps).abs() < 1e-14);
        }
        let _ = Tangent4::basis(ChartPoint::origin(Chart::Cotangent), 0);
    }
}
