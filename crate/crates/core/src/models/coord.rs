//! The linear chart change intertwining the disk-neighborhood model with
//! the node model:
//! `x1 = e q1 + p2, y1 = p1 - e q2, x2 = p2 - e q1, y2 = -p1 - e q2`.
//!
//! The map is linear, so its pullback of the standard complex-chart form
//! is a constant multiple `kappa * omega` of the cotangent-chart form;
//! the measured constant is `2e` (a conformal symplectomorphism, not a
//! strict one).

use crate::geometry::forms::{Mat4, STD_MATRIX};
use crate::geometry::{Chart, ChartPoint};

use super::ModelError;

#[derive(Debug, Clone, Copy)]
pub struct CoordinateChangeS4 {
    pub epsilon: f64,
}

impl CoordinateChangeS4 {
    pub fn new(epsilon: f64) -> Result<Self, ModelError> {
        if epsilon <= 0.0 {
            return Err(ModelError::InvalidParameter(format!("epsilon = {epsilon} must be > 0")));
        }
        Ok(CoordinateChangeS4 { epsilon })
    }

    /// Matrix of the map in the bases `(q1, p1, q2, p2) -> (x1, y1, x2, y2)`.
    pub fn matrix(&self) -> Mat4 {
        let e = self.epsilon;
        [
            [e, 0.0, 0.0, 1.0],
            [0.0, 1.0, -e, 0.0],
            [-e, 0.0, 0.0, 1.0],
            [0.0, -1.0, -e, 0.0],
        ]
    }

    pub fn apply(&self, p: &ChartPoint) -> Result<ChartPoint, ModelError> {
        if p.chart != Chart::Cotangent {
            return Err(ModelError::Geometry(crate::geometry::GeometryError::ChartMismatch(
                Chart::Cotangent,
                p.chart,
            )));
        }
        let m = self.matrix();
        let mut out = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i] += m[i][j] * p.coords[j];
            }
        }
        Ok(ChartPoint::new(Chart::Complex, out))
    }

    /// Exact pullback matrix `T^t M_complex T` of the standard
    /// complex-chart form.
    pub fn pullback_matrix(&self) -> Mat4 {
        let t = self.matrix();
        let mut mt = [[0.0; 4]; 4]; // M * T
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    mt[i][j] += STD_MATRIX[i][k] * t[k][j];
                }
            }
        }
        let mut out = [[0.0; 4]; 4]; // T^t * (M T)
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    out[i][j] += t[k][i] * mt[k][j];
                }
            }
        }
        out
    }

    /// The measured pullback constant: the unique `kappa` with
    /// `T^* omega_complex = kappa * omega_cotangent`, together with the
    /// max deviation of the pullback matrix from that multiple.
    pub fn measured_kappa(&self) -> (f64, f64) {
        let p = self.pullback_matrix();
        let kappa = p[0][1];
        let mut deviation: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                deviation = deviation.max((p[i][j] - kappa * STD_MATRIX[i][j]).abs());
            }
        }
        (kappa, deviation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::disk::{pushoff_disk, PushoffSign};
    use crate::models::profile::{orbit_surface_reversed, ProfileCurve};
    use rand::{Rng, SeedableRng};

    #[test]
    fn image_of_minus_pushoff_is_planar_disk_one() {
        let eps = 0.1;
        let t = CoordinateChangeS4::new(eps).unwrap();
        let d = pushoff_disk(PushoffSign::Minus, eps).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let q1 = rng.random_range(-1.0..1.0);
            let q2 = rng.random_range(-1.0..1.0);
            let img = t.apply(&d.patch.point(q1, q2).unwrap()).unwrap();
            let expected = [2.0 * eps * q1, -2.0 * eps * q2, 0.0, 0.0];
            for i in 0..4 {
                assert!((img.coords[i] - expected[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn image_of_plus_pushoff_is_planar_disk_two() {
        let eps = 0.1;
        let t = CoordinateChangeS4::new(eps).unwrap();
        let d = pushoff_disk(PushoffSign::Plus, eps).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(32);
        for _ in 0..200 {
            let q1 = rng.random_range(-1.0..1.0);
            let q2 = rng.random_range(-1.0..1.0);
            let img = t.apply(&d.patch.point(q1, q2).unwrap()).unwrap();
            let expected = [0.0, 0.0, -2.0 * eps * q1, -2.0 * eps * q2];
            for i in 0..4 {
                assert!((img.coords[i] - expected[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn image_of_reversed_annulus_is_gamma_annulus() {
        // the theta -> -theta annulus maps to (gamma1 e^{it}, gamma2 e^{-it})
        // with gamma1 = e a + b, gamma2 = -e a + b
        let eps = 0.1;
        let t = CoordinateChangeS4::new(eps).unwrap();
        let profile =
            ProfileCurve::closed_form("test", (0.5, 2.0), |s| s, |s| s, |_| 1.0, |_| 1.0);
        let annulus = orbit_surface_reversed(&profile);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        for _ in 0..200 {
            let th = rng.random_range(0.0..std::f64::consts::TAU);
            let s = rng.random_range(0.5..2.0);
            let img = t.apply(&annulus.point(th, s).unwrap()).unwrap();
            let (a, b) = (profile.a(s), profile.b(s));
            let g1 = eps * a + b;
            let g2 = -eps * a + b;
            let expected = [g1 * th.cos(), g1 * th.sin(), g2 * th.cos(), -g2 * th.sin()];
            for i in 0..4 {
                assert!((img.coords[i] - expected[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pullback_constant_is_twice_epsilon_exactly() {
        for eps in [1e-3, 0.05, 0.1, 0.7] {
            let t = CoordinateChangeS4::new(eps).unwrap();
            let (kappa, dev) = t.measured_kappa();
            assert!((kappa - 2.0 * eps).abs() < 1e-15);
            assert!(dev < 1e-15);
        }
    }

    #[test]
    fn pullback_constant_is_point_independent_under_fd_jacobian() {
        // finite-difference oracle: the Jacobian measured at random points
        // is the constant matrix, so kappa has vanishing variance
        let eps = 0.05;
        let t = CoordinateChangeS4::new(eps).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(34);
        let h = 1e-5;
        let mut kappas = Vec::new();
        for _ in 0..1000 {
            let base: [f64; 4] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
            // pullback on (dq1, dp1) via finite differences of the map
            let mut jac = [[0.0; 4]; 4];
            for j in 0..4 {
                let mut plus = base;
                let mut minus = base;
                plus[j] += h;
                minus[j] -= h;
                let fp = t.apply(&ChartPoint::new(Chart::Cotangent, plus)).unwrap().coords;
                let fm = t.apply(&ChartPoint::new(Chart::Cotangent, minus)).unwrap().coords;
                for i in 0..4 {
                    jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
                }
            }
            let col = |j: usize| -> [f64; 4] { std::array::from_fn(|i| jac[i][j]) };
            let kappa =
                crate::geometry::forms::pairing(&STD_MATRIX, &col(0), &col(1));
            kappas.push(kappa);
        }
        let mean = kappas.iter().sum::<f64>() / kappas.len() as f64;
        let var =
            kappas.iter().map(|k| (k - mean) * (k - mean)).sum::<f64>() / kappas.len() as f64;
        assert!((mean - 2.0 * eps).abs() < 1e-9);
        assert!(var < 1e-18, "variance {var}");
    }
}
