//! C1 proximity of surfaces: sup over a grid of point distance plus
//! tangent-plane angular distance, against either another patch or the
//! implicit complex curve `(z1 - (a+bi) z2) z2 = eps`. Also the Hausdorff
//! distance between planar polylines used by the deformation-family
//! convergence checks.

use crate::geometry::patch::{closest_point, ParamPatch};
use crate::geometry::grid::GridSpec;
use crate::geometry::ChartPoint;

use super::ModelError;

/// Comparison target for [`c1_distance`].
pub enum C1Target<'a> {
    Patch(&'a ParamPatch),
    /// The level set `(z1 - (a+bi) z2) z2 = eps` in the complex chart.
    ComplexCurve { a: f64, b: f64, eps: f64 },
}

/// Sup over the grid of (point distance to target) + (largest principal
/// angle between tangent planes, in radians).
pub fn c1_distance(
    patch: &ParamPatch,
    target: &C1Target,
    grid: GridSpec,
) -> Result<f64, ModelError> {
    let d = &patch.domain;
    let mut sup: f64 = 0.0;
    for i in 0..grid.nu {
        let u = d.u0 + (d.u1 - d.u0) * i as f64 / (grid.nu - 1) as f64;
        for j in 0..grid.nv {
            let v = d.v0 + (d.v1 - d.v0) * j as f64 / (grid.nv - 1) as f64;
            let p = patch.point(u, v)?;
            let (tu, tv) = patch.partials(u, v);
            let plane_a = orthonormalize(&tu, &tv);
            let (dist, plane_b) = match target {
                C1Target::Patch(other) => {
                    let (cu, cv, dist) = closest_point(other, &p, 1e-13, 60)?;
                    let (ou, ov) = other.partials(cu, cv);
                    (dist, orthonormalize(&ou, &ov))
                }
                C1Target::ComplexCurve { a, b, eps } => {
                    let (q, plane) = project_to_complex_curve(&p, *a, *b, *eps)?;
                    let dist =
                        (0..4).map(|k| (p.coords[k] - q[k]).powi(2)).sum::<f64>().sqrt();
                    (dist, plane)
                }
            };
            let angle = plane_angle(&plane_a, &plane_b);
            sup = sup.max(dist + angle);
        }
    }
    Ok(sup)
}

/// Gram-Schmidt orthonormal basis of the span of two vectors.
fn orthonormalize(u: &[f64; 4], v: &[f64; 4]) -> [[f64; 4]; 2] {
    let nu = norm(u);
    let e1: [f64; 4] = std::array::from_fn(|i| u[i] / nu);
    let d = dot(v, &e1);
    let w: [f64; 4] = std::array::from_fn(|i| v[i] - d * e1[i]);
    let nw = norm(&w);
    let e2: [f64; 4] = std::array::from_fn(|i| w[i] / nw);
    [e1, e2]
}

/// Largest principal angle between two 2-planes given by orthonormal bases.
fn plane_angle(a: &[[f64; 4]; 2], b: &[[f64; 4]; 2]) -> f64 {
    // C = A^t B is 2x2; its singular values are the cosines of the
    // principal angles
    let c = [
        [dot(&a[0], &b[0]), dot(&a[0], &b[1])],
        [dot(&a[1], &b[0]), dot(&a[1], &b[1])],
    ];
    let g = [
        [
            c[0][0] * c[0][0] + c[1][0] * c[1][0],
            c[0][0] * c[0][1] + c[1][0] * c[1][1],
        ],
        [
            c[0][1] * c[0][0] + c[1][1] * c[1][0],
            c[0][1] * c[0][1] + c[1][1] * c[1][1],
        ],
    ];
    let tr = g[0][0] + g[1][1];
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    let min_eig = (tr / 2.0 - disc).max(0.0);
    min_eig.sqrt().clamp(0.0, 1.0).acos()
}

/// Minimal-norm Newton projection onto the zero set of the two real
/// equations Re/Im of `(z1 - (a+bi) z2) z2 - eps`, plus the tangent plane
/// (kernel of the Jacobian) at the projected point.
fn project_to_complex_curve(
    p: &ChartPoint,
    a: f64,
    b: f64,
    eps: f64,
) -> Result<([f64; 4], [[f64; 4]; 2]), ModelError> {
    let mut x = p.coords;
    let g = |x: &[f64; 4]| -> [f64; 2] {
        let (x1, y1, x2, y2) = (x[0], x[1], x[2], x[3]);
        let z1z2 = (x1 * x2 - y1 * y2, x1 * y2 + y1 * x2);
        let z2sq = (x2 * x2 - y2 * y2, 2.0 * x2 * y2);
        [
            z1z2.0 - (a * z2sq.0 - b * z2sq.1) - eps,
            z1z2.1 - (a * z2sq.1 + b * z2sq.0),
        ]
    };
    // rows of the 2x4 Jacobian
    let jac = |x: &[f64; 4]| -> [[f64; 4]; 2] {
        let (x1, y1, x2, y2) = (x[0], x[1], x[2], x[3]);
        [
            [x2, -y2, x1 - 2.0 * a * x2 + 2.0 * b * y2, -y1 + 2.0 * a * y2 + 2.0 * b * x2],
            [y2, x2, y1 - 2.0 * a * y2 - 2.0 * b * x2, x1 - 2.0 * a * x2 + 2.0 * b * y2],
        ]
    };
    for _ in 0..80 {
        let r = g(&x);
        let rn = (r[0] * r[0] + r[1] * r[1]).sqrt();
        if rn < 1e-13 {
            break;
        }
        let j = jac(&x);
        // delta = -J^t (J J^t)^{-1} r
        let jjt = [
            [dot(&j[0], &j[0]), dot(&j[0], &j[1])],
            [dot(&j[1], &j[0]), dot(&j[1], &j[1])],
        ];
        let det = jjt[0][0] * jjt[1][1] - jjt[0][1] * jjt[1][0];
        if det.abs() < 1e-300 {
            return Err(ModelError::ProjectionFailure(rn));
        }
        let s = [
            (jjt[1][1] * r[0] - jjt[0][1] * r[1]) / det,
            (jjt[0][0] * r[1] - jjt[1][0] * r[0]) / det,
        ];
        for i in 0..4 {
            x[i] -= j[0][i] * s[0] + j[1][i] * s[1];
        }
    }
    let r = g(&x);
    let rn = (r[0] * r[0] + r[1] * r[1]).sqrt();
    if rn > 1e-10 {
        return Err(ModelError::ProjectionFailure(rn));
    }
    // tangent plane = orthogonal complement of the Jacobian rows
    let j = jac(&x);
    let plane = kernel_basis(&j).ok_or(ModelError::ProjectionFailure(rn))?;
    Ok((x, plane))
}

/// Orthonormal basis of the kernel of a full-rank 2x4 matrix.
fn kernel_basis(j: &[[f64; 4]; 2]) -> Option<[[f64; 4]; 2]> {
    // orthonormalize the rows, then complete to a basis and project out
    let r = orthonormalize(&j[0], &j[1]);
    let mut kernel: Vec<[f64; 4]> = Vec::new();
    for i in 0..4 {
        let mut e = [0.0; 4];
        e[i] = 1.0;
        for prev in r.iter().chain(kernel.iter()) {
            let d = dot(&e, prev);
            for k in 0..4 {
                e[k] -= d * prev[k];
            }
        }
        let n = norm(&e);
        if n > 1e-8 {
            kernel.push(std::array::from_fn(|k| e[k] / n));
            if kernel.len() == 2 {
                return Some([kernel[0], kernel[1]]);
            }
        }
    }
    None
}

/// Symmetric Hausdorff distance between planar polylines.
pub fn polyline_hausdorff(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

fn directed_hausdorff(from: &[(f64, f64)], to: &[(f64, f64)]) -> f64 {
    let mut sup: f64 = 0.0;
    for &p in from {
        let mut best = f64::INFINITY;
        for w in to.windows(2) {
            best = best.min(point_segment_distance(p, w[0], w[1]));
        }
        sup = sup.max(best);
    }
    sup
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let ab = (b.0 - a.0, b.1 - a.1);
    let ap = (p.0 - a.0, p.1 - a.1);
    let len2 = ab.0 * ab.0 + ab.1 * ab.1;
    let t = if len2 == 0.0 { 0.0 } else { ((ap.0 * ab.0 + ap.1 * ab.1) / len2).clamp(0.0, 1.0) };
    let q = (a.0 + t * ab.0, a.1 + t * ab.1);
    ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt()
}

fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64; 4]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::disk::{pushoff_disk, sigma_ml, PushoffSign};
    use crate::models::profile::deformation_family;
    use crate::models::smoothing::{rotated_smoothing, GammaCurve};

    #[test]
    fn patch_against_itself_has_zero_c1_distance() {
        let sigma = sigma_ml(0.5);
        let d = c1_distance(&sigma, &C1Target::Patch(&sigma), GridSpec::square(8)).unwrap();
        assert!(d < 1e-7, "self distance {d}");
    }

    #[test]
    fn distinct_surfaces_stay_apart() {
        let sigma = sigma_ml(0.5);
        let dm = pushoff_disk(PushoffSign::Minus, 0.1).unwrap();
        let d = c1_distance(&sigma, &C1Target::Patch(&dm.patch), GridSpec::square(8)).unwrap();
        assert!(d > 0.1, "distance {d} unexpectedly small");
    }

    #[test]
    fn rotated_smoothing_approaches_complex_curve_as_eps_shrinks() {
        let (a, b) = (0.25, -0.15);
        let mut last = f64::INFINITY;
        for eps_prime in [0.2, 0.1, 0.05] {
            let gamma = GammaCurve::standard(eps_prime, 5.0).unwrap();
            let eps = eps_prime * eps_prime;
            let patch = rotated_smoothing(a, b, &gamma, eps).unwrap();
            let d = c1_distance(
                &patch,
                &C1Target::ComplexCurve { a, b, eps },
                GridSpec::new(12, 24),
            )
            .unwrap();
            assert!(d < last, "C1 distance {d} did not decrease (previous {last})");
            last = d;
        }
        assert!(last < 0.5);
    }

    #[test]
    fn hausdorff_of_identical_polylines_is_zero() {
        let a = vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)];
        assert_eq!(polyline_hausdorff(&a, &a), 0.0);
    }

    #[test]
    fn hausdorff_measures_offset() {
        let a = vec![(0.0, 0.0), (1.0, 0.0)];
        let b = vec![(0.0, 0.25), (1.0, 0.25)];
        assert!((polyline_hausdorff(&a, &b) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn deformation_family_hausdorff_decreases_toward_wedge() {
        let eps = 0.25;
        let wedge = vec![(1.0, -1.0), (1.0, -eps), (0.0, 0.0), (1.0, eps), (1.0, 1.0)];
        let mut last = f64::INFINITY;
        for tau in [0.5, 0.7, 0.9] {
            let p = deformation_family(tau, eps).unwrap();
            let poly = p.sample_polyline(400);
            let d = polyline_hausdorff(&poly, &wedge);
            assert!(d < last, "tau = {tau}: {d} >= {last}");
            last = d;
        }
        // and it is already small near the end of the family
        let p = deformation_family(0.99, eps).unwrap();
        let d = polyline_hausdorff(&p.sample_polyline(800), &wedge);
        assert!(d < 0.05, "tau = 0.99 Hausdorff {d}");
    }
}
