//! Coordinate charts, tangent vectors, differential forms and the grid
//! verification engine shared by every model check.
//!
//! Everything lives on open subsets of two fixed 4-dimensional charts:
//! a cotangent chart with coordinates `(q1, p1, q2, p2)` and a complex
//! chart with coordinates `(x1, y1, x2, y2)`. Mixed-chart arithmetic is
//! rejected at runtime.

pub mod forms;
pub mod grid;
pub mod patch;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use forms::{OneFormField, Potential, TwoFormField};
pub use grid::{grid_verify, GridSpec, Predicate, VerificationReport};
pub use patch::{ParamPatch, Partials, Rect};

/// Identifies which 4-dimensional chart a point or vector lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    /// `(q1, p1, q2, p2)` with the form `dq1∧dp1 + dq2∧dp2`.
    Cotangent,
    /// `(x1, y1, x2, y2)` with the form `dx1∧dy1 + dx2∧dy2`.
    Complex,
}

impl Chart {
    pub fn axis_names(self) -> [&'static str; 4] {
        match self {
            Chart::Cotangent => ["q1", "p1", "q2", "p2"],
            Chart::Complex => ["x1", "y1", "x2", "y2"],
        }
    }
}

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("chart mismatch: {0:?} vs {1:?}")]
    ChartMismatch(Chart, Chart),
    #[error("vectors not based at a common point (separation {0:.3e})")]
    BaseMismatch(f64),
    #[error("parameter ({0}, {1}) outside patch domain")]
    DomainViolation(f64, f64),
    #[error("degenerate input: |det| = {0:.3e} below threshold")]
    Degenerate(f64),
    #[error("grid resolution must be at least 2 per axis, got {0}x{1}")]
    GridTooCoarse(usize, usize),
    #[error("closest-point solve failed to converge (residual {0:.3e})")]
    ProjectionFailure(f64),
    #[error("non-finite value encountered in {0}")]
    NonFinite(String),
}

/// A point of one of the two charts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub chart: Chart,
    pub coords: [f64; 4],
}

impl ChartPoint {
    pub fn new(chart: Chart, coords: [f64; 4]) -> Self {
        ChartPoint { chart, coords }
    }

    pub fn cotangent(q1: f64, p1: f64, q2: f64, p2: f64) -> Self {
        Self::new(Chart::Cotangent, [q1, p1, q2, p2])
    }

    pub fn complex(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        Self::new(Chart::Complex, [x1, y1, x2, y2])
    }

    pub fn origin(chart: Chart) -> Self {
        Self::new(chart, [0.0; 4])
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    /// Euclidean distance between two points of the same chart.
    pub fn distance(&self, other: &ChartPoint) -> Result<f64, GeometryError> {
        check_charts(self.chart, other.chart)?;
        Ok(sub4(&self.coords, &other.coords).iter().map(|d| d * d).sum::<f64>().sqrt())
    }

    /// Squared radius `|z|^2` (chart-independent formula).
    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum()
    }
}

/// A tangent vector anchored at a chart point.
#[derive(Debug, Clone, Copy)]
pub struct Tangent4 {
    pub base: ChartPoint,
    pub vec: [f64; 4],
}

impl Tangent4 {
    pub fn new(base: ChartPoint, vec: [f64; 4]) -> Self {
        Tangent4 { base, vec }
    }

    /// The `i`-th coordinate basis vector at `base`.
    pub fn basis(base: ChartPoint, i: usize) -> Self {
        let mut vec = [0.0; 4];
        vec[i] = 1.0;
        Tangent4 { base, vec }
    }
}

/// An ordered pair of tangent vectors at a common base point.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub base: ChartPoint,
    pub u: [f64; 4],
    pub v: [f64; 4],
}

impl Frame {
    pub fn new(base: ChartPoint, u: [f64; 4], v: [f64; 4]) -> Self {
        Frame { base, u, v }
    }

    pub fn first(&self) -> Tangent4 {
        Tangent4::new(self.base, self.u)
    }

    pub fn second(&self) -> Tangent4 {
        Tangent4::new(self.base, self.v)
    }
}

pub(crate) fn check_charts(a: Chart, b: Chart) -> Result<(), GeometryError> {
    if a == b {
        Ok(())
    } else {
        Err(GeometryError::ChartMismatch(a, b))
    }
}

pub(crate) fn sub4(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

/// Sign of the determinant of four tangent vectors at one point.
///
/// Errors if the vectors are near-degenerate (`|det| < tol`) or anchored
/// at visibly different base points.
pub fn orientation_sign(
    v1: &Tangent4,
    v2: &Tangent4,
    v3: &Tangent4,
    v4: &Tangent4,
    tol: f64,
) -> Result<i32, GeometryError> {
    let vs = [v1, v2, v3, v4];
    for v in &vs[1..] {
        check_charts(v1.base.chart, v.base.chart)?;
        let sep = v1.base.distance(&v.base)?;
        if sep > 1e-12 {
            return Err(GeometryError::BaseMismatch(sep));
        }
    }
    let mut m = [[0.0; 4]; 4];
    for (j, v) in vs.iter().enumerate() {
        for i in 0..4 {
            m[i][j] = v.vec[i];
        }
    }
    let det = det4(&m);
    if det.abs() < tol {
        return Err(GeometryError::Degenerate(det.abs()));
    }
    Ok(if det > 0.0 { 1 } else { -1 })
}

pub(crate) fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let mut a = *m;
    let mut det = 1.0;
    for col in 0..4 {
        let mut pivot = col;
        for row in col + 1..4 {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    det
}

/// True iff all four cross-pairings of the two frames vanish within `tol`.
pub fn omega_orthogonal(
    form: &TwoFormField,
    a: &Frame,
    b: &Frame,
    tol: f64,
) -> Result<bool, GeometryError> {
    check_charts(a.base.chart, b.base.chart)?;
    let sep = a.base.distance(&b.base)?;
    if sep > 1e-12 {
        return Err(GeometryError::BaseMismatch(sep));
    }
    let m = form.eval(&a.base)?;
    for x in [a.u, a.v] {
        for y in [b.u, b.v] {
            if forms::pairing(&m, &x, &y).abs() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
