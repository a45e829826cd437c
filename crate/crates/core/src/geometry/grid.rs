//! Grid-based verification: evaluate a scalar quantity over a parameter
//! grid, reduce deterministically, and report min/max/witness/verdict.

use serde::{Deserialize, Serialize};

use super::patch::ParamPatch;
use super::GeometryError;

/// Grid resolution over the patch domain.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridSpec {
    pub nu: usize,
    pub nv: usize,
}

impl GridSpec {
    pub fn new(nu: usize, nv: usize) -> Self {
        GridSpec { nu, nv }
    }

    pub fn square(n: usize) -> Self {
        GridSpec { nu: n, nv: n }
    }
}

/// Node predicate checked at every grid point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Predicate {
    /// `value > bound` (strict).
    GreaterThan { bound: f64 },
    /// `|value - target| <= tol`.
    AbsDiffLe { target: f64 },
}

impl Predicate {
    pub fn holds(&self, value: f64, tol: f64) -> bool {
        if !value.is_finite() {
            return false;
        }
        match self {
            Predicate::GreaterThan { bound } => value > *bound,
            Predicate::AbsDiffLe { target } => (value - target).abs() <= tol,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Predicate::GreaterThan { bound } => format!("> {bound}"),
            Predicate::AbsDiffLe { target } => format!("|. - {target}| <= tol"),
        }
    }
}

/// Result of one grid (or sample sweep) verification.
///
/// On pass the witness is the lexicographically first node achieving the
/// minimum; on fail it is the lexicographically first violating node.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub quantity: String,
    pub grid: GridSpec,
    pub predicate: String,
    pub min: f64,
    pub max: f64,
    pub witness: Vec<f64>,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl VerificationReport {
    /// A report for a single scalar check (1x1 "grid").
    pub fn scalar(quantity: impl Into<String>, value: f64, tol: f64, pass: bool) -> Self {
        VerificationReport {
            quantity: quantity.into(),
            grid: GridSpec::new(1, 1),
            predicate: String::new(),
            min: value,
            max: value,
            witness: vec![],
            tol,
            pass,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// Evaluate `quantity` at every node of a `grid` over the patch domain and
/// check `predicate` at each node.
///
/// The reduction is order-independent by construction: min/max range over
/// all nodes and the witness is picked by the lexicographic rule above, so
/// permuting grid traversal yields an identical report. Non-finite values
/// fail with the offending node as witness.
pub fn grid_verify(
    patch: &ParamPatch,
    quantity: &str,
    f: impl Fn(&ParamPatch, f64, f64) -> f64,
    grid: GridSpec,
    predicate: Predicate,
    tol: f64,
) -> Result<VerificationReport, GeometryError> {
    if grid.nu < 2 || grid.nv < 2 {
        return Err(GeometryError::GridTooCoarse(grid.nu, grid.nv));
    }
    let d = &patch.domain;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut min_node: Option<(usize, usize, f64, f64)> = None;
    let mut violation: Option<(usize, usize, f64, f64)> = None;
    for i in 0..grid.nu {
        let u = d.u0 + (d.u1 - d.u0) * i as f64 / (grid.nu - 1) as f64;
        for j in 0..grid.nv {
            let v = d.v0 + (d.v1 - d.v0) * j as f64 / (grid.nv - 1) as f64;
            let val = f(patch, u, v);
            if val.is_finite() {
                if val < min {
                    min = val;
                    min_node = Some((i, j, u, v));
                }
                max = max.max(val);
            }
            if violation.is_none() && !predicate.holds(val, tol) {
                violation = Some((i, j, u, v));
            }
        }
    }
    let pass = violation.is_none();
    let witness = match (&violation, &min_node) {
        (Some((_, _, u, v)), _) => vec![*u, *v],
        (None, Some((_, _, u, v))) => vec![*u, *v],
        (None, None) => vec![],
    };
    Ok(VerificationReport {
        quantity: quantity.to_string(),
        grid,
        predicate: predicate.describe(),
        min,
        max,
        witness,
        tol,
        pass,
        detail: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::forms::std_form;
    use crate::geometry::patch::{symplectic_density, Rect};
    use crate::geometry::Chart;

    fn density_quantity() -> impl Fn(&ParamPatch, f64, f64) -> f64 {
        let w = std_form(Chart::Cotangent);
        move |p, u, v| symplectic_density(p, &w, u, v).unwrap_or(f64::NAN)
    }

    fn graph_patch(b: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static) -> ParamPatch {
        // orbit-style patch (a=1): density = b'(s); lets tests steer signs
        ParamPatch::finite_diff(
            "graph",
            Chart::Cotangent,
            Rect::new(0.0, std::f64::consts::TAU, 0.0, 1.0),
            move |t, s| {
                let (bv, _) = b(s);
                [t.cos(), -bv * t.sin(), t.sin(), bv * t.cos()]
            },
            1e-5,
        )
    }

    #[test]
    fn passing_grid_reports_min_and_witness() {
        // a=1, b = -1 + 2s: density = a'b + b'a = 2
        let p = graph_patch(|s| (-1.0 + 2.0 * s, 2.0));
        let rep = grid_verify(
            &p,
            "density",
            density_quantity(),
            GridSpec::square(40),
            Predicate::GreaterThan { bound: 0.0 },
            1e-9,
        )
        .unwrap();
        assert!(rep.pass);
        assert!((rep.min - 2.0).abs() < 1e-8, "min = {}", rep.min);
        assert!((rep.max - 2.0).abs() < 1e-8);
        assert_eq!(rep.witness.len(), 2);
    }

    #[test]
    fn violating_profile_fails_with_witness() {
        // b = -s has b' < 0: density = -1 < 0 everywhere
        let p = graph_patch(|s| (-s, -1.0));
        let rep = grid_verify(
            &p,
            "density",
            density_quantity(),
            GridSpec::square(10),
            Predicate::GreaterThan { bound: 0.0 },
            1e-9,
        )
        .unwrap();
        assert!(!rep.pass);
        // first violating node is the lexicographically first node
        assert_eq!(rep.witness, vec![0.0, 0.0]);
    }

    #[test]
    fn non_finite_value_fails_with_witness() {
        let p = ParamPatch::finite_diff(
            "bad",
            Chart::Cotangent,
            Rect::new(0.0, 1.0, 0.0, 1.0),
            |u, v| [u, v, 0.0, 0.0],
            1e-5,
        );
        let rep = grid_verify(
            &p,
            "poison",
            |_, u, v| if u > 0.5 && v > 0.5 { f64::NAN } else { 1.0 },
            GridSpec::square(5),
            Predicate::GreaterThan { bound: 0.0 },
            1e-9,
        )
        .unwrap();
        assert!(!rep.pass);
        assert!(rep.witness[0] > 0.5 && rep.witness[1] > 0.5);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let p = graph_patch(|s| (s, 1.0));
        let err = grid_verify(
            &p,
            "density",
            density_quantity(),
            GridSpec::new(1, 10),
            Predicate::GreaterThan { bound: 0.0 },
            1e-9,
        );
        assert!(err.is_err());
    }

    #[test]
    fn report_is_independent_of_traversal_order() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let p = graph_patch(|s| (-1.0 + 2.0 * s, 2.0));
        let grid = GridSpec::square(17);
        let pred = Predicate::GreaterThan { bound: 0.0 };
        let rep = grid_verify(&p, "density", density_quantity(), grid, pred, 1e-9).unwrap();

        // re-evaluate in shuffled order with the same lexicographic reduction
        let d = p.domain;
        let mut nodes: Vec<(usize, usize)> =
            (0..grid.nu).flat_map(|i| (0..grid.nv).map(move |j| (i, j))).collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        nodes.shuffle(&mut rng);
        let q = density_quantity();
        let mut vals = vec![vec![0.0; grid.nv]; grid.nu];
        for &(i, j) in &nodes {
            let u = d.u0 + (d.u1 - d.u0) * i as f64 / (grid.nu - 1) as f64;
            let v = d.v0 + (d.v1 - d.v0) * j as f64 / (grid.nv - 1) as f64;
            vals[i][j] = q(&p, u, v);
        }
        let min = vals.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
        let max = vals.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(min, rep.min);
        assert_eq!(max, rep.max);
    }
}
