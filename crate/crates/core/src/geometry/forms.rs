//! Differential 1- and 2-forms as point-dependent coefficient fields, the
//! `d^C` operator, and finite-difference exterior calculus.
//!
//! Convention fixed for the whole crate: `d^C g := (1/4) dg∘J` with
//! `J∂x = ∂y`, `J∂y = -∂x`, and the half radial field
//! `V0 := (1/2) Σ (x_i ∂x_i + y_i ∂y_i)`. Under this scaling
//! `ω = -d d^C |z|^2` is exactly the standard form and the three radial
//! identities `df(V0) = |z|^2`, `λ(V0) = 0`, `ι_{V0} dλ = λ` hold with
//! `λ = -d^C |z|^2`.

use std::sync::Arc;

use super::{check_charts, Chart, ChartPoint, GeometryError, Tangent4};

pub type Mat4 = [[f64; 4]; 4];
pub type Covector = [f64; 4];

/// A point-dependent antisymmetric bilinear form, stored as the matrix
/// `M[i][j] = ω(e_i, e_j)`.
#[derive(Clone)]
pub struct TwoFormField {
    pub chart: Chart,
    pub name: String,
    eval: Arc<dyn Fn(&[f64; 4]) -> Mat4 + Send + Sync>,
}

impl TwoFormField {
    pub fn new(
        chart: Chart,
        name: impl Into<String>,
        eval: impl Fn(&[f64; 4]) -> Mat4 + Send + Sync + 'static,
    ) -> Self {
        TwoFormField { chart, name: name.into(), eval: Arc::new(eval) }
    }

    pub fn eval(&self, p: &ChartPoint) -> Result<Mat4, GeometryError> {
        check_charts(self.chart, p.chart)?;
        Ok((self.eval)(&p.coords))
    }

    pub fn eval_coords(&self, coords: &[f64; 4]) -> Mat4 {
        (self.eval)(coords)
    }

    /// Pfaffian of the coefficient matrix; nonzero iff the form is
    /// nondegenerate at the point.
    pub fn pfaffian(&self, p: &ChartPoint) -> Result<f64, GeometryError> {
        let m = self.eval(p)?;
        Ok(m[0][1] * m[2][3] - m[0][2] * m[1][3] + m[0][3] * m[1][2])
    }
}

/// A point-dependent covector field.
#[derive(Clone)]
pub struct OneFormField {
    pub chart: Chart,
    pub name: String,
    eval: Arc<dyn Fn(&[f64; 4]) -> Covector + Send + Sync>,
}

impl OneFormField {
    pub fn new(
        chart: Chart,
        name: impl Into<String>,
        eval: impl Fn(&[f64; 4]) -> Covector + Send + Sync + 'static,
    ) -> Self {
        OneFormField { chart, name: name.into(), eval: Arc::new(eval) }
    }

    pub fn eval(&self, p: &ChartPoint) -> Result<Covector, GeometryError> {
        check_charts(self.chart, p.chart)?;
        Ok((self.eval)(&p.coords))
    }

    pub fn eval_coords(&self, coords: &[f64; 4]) -> Covector {
        (self.eval)(coords)
    }

    /// Contraction with a tangent vector.
    pub fn apply(&self, v: &Tangent4) -> Result<f64, GeometryError> {
        let c = self.eval(&v.base)?;
        Ok(dot4(&c, &v.vec))
    }
}

/// A scalar potential with an optional analytic gradient.
#[derive(Clone)]
pub struct Potential {
    pub chart: Chart,
    value: Arc<dyn Fn(&[f64; 4]) -> f64 + Send + Sync>,
    grad: Option<Arc<dyn Fn(&[f64; 4]) -> [f64; 4] + Send + Sync>>,
}

impl Potential {
    pub fn new(chart: Chart, value: impl Fn(&[f64; 4]) -> f64 + Send + Sync + 'static) -> Self {
        Potential { chart, value: Arc::new(value), grad: None }
    }

    pub fn with_gradient(
        mut self,
        grad: impl Fn(&[f64; 4]) -> [f64; 4] + Send + Sync + 'static,
    ) -> Self {
        self.grad = Some(Arc::new(grad));
        self
    }

    pub fn value(&self, coords: &[f64; 4]) -> f64 {
        (self.value)(coords)
    }

    pub fn gradient(&self, coords: &[f64; 4], h: f64) -> [f64; 4] {
        match &self.grad {
            Some(g) => g(coords),
            None => fd_gradient(|c| (self.value)(c), coords, h),
        }
    }
}

/// Default finite-difference step on unit-scale data.
pub const FD_STEP: f64 = 1e-4;

/// The complex structure `J∂x = ∂y`, `J∂y = -∂x` applied to a vector.
pub fn apply_j(v: &[f64; 4]) -> [f64; 4] {
    // J e0 = e1, J e1 = -e0, J e2 = e3, J e3 = -e2
    [-v[1], v[0], -v[3], v[2]]
}

/// The standard symplectic form of the chart as a constant-coefficient field.
pub fn std_form(chart: Chart) -> TwoFormField {
    let name = match chart {
        Chart::Cotangent => "dq1^dp1 + dq2^dp2",
        Chart::Complex => "dx1^dy1 + dx2^dy2",
    };
    TwoFormField::new(chart, name, |_| STD_MATRIX)
}

pub const STD_MATRIX: Mat4 = [
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0, 0.0],
];

/// `v^T M w` for an antisymmetric coefficient matrix.
pub fn pairing(m: &Mat4, v: &[f64; 4], w: &[f64; 4]) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            acc += v[i] * m[i][j] * w[j];
        }
    }
    acc
}

/// Evaluate a 2-form on two tangent vectors based at `point`.
pub fn eval_form(
    form: &TwoFormField,
    point: &ChartPoint,
    v: &Tangent4,
    w: &Tangent4,
) -> Result<f64, GeometryError> {
    check_charts(form.chart, point.chart)?;
    check_charts(point.chart, v.base.chart)?;
    check_charts(point.chart, w.base.chart)?;
    let m = form.eval(point)?;
    Ok(pairing(&m, &v.vec, &w.vec))
}

/// `d^C g` at a point: `(1/4) dg∘J`.
///
/// Component-wise: `(d^C g)_i = (1/4) ∇g · (J e_i)`.
pub fn dc(potential: &Potential, point: &ChartPoint, h: f64) -> Result<Covector, GeometryError> {
    check_charts(potential.chart, point.chart)?;
    let g = potential.gradient(&point.coords, h);
    let mut out = [0.0; 4];
    for i in 0..4 {
        let mut e = [0.0; 4];
        e[i] = 1.0;
        let je = apply_j(&e);
        out[i] = 0.25 * dot4(&g, &je);
    }
    Ok(out)
}

/// `d^C g` as a covector field with analytic gradient when available.
pub fn dc_field(potential: Potential, h: f64) -> OneFormField {
    let chart = potential.chart;
    OneFormField::new(chart, "d^C", move |coords| {
        let g = potential.gradient(coords, h);
        let mut out = [0.0; 4];
        for i in 0..4 {
            let mut e = [0.0; 4];
            e[i] = 1.0;
            out[i] = 0.25 * dot4(&g, &apply_j(&e));
        }
        out
    })
}

/// Centered finite-difference gradient.
pub fn fd_gradient(f: impl Fn(&[f64; 4]) -> f64, coords: &[f64; 4], h: f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    for i in 0..4 {
        let mut plus = *coords;
        let mut minus = *coords;
        plus[i] += h;
        minus[i] -= h;
        out[i] = (f(&plus) - f(&minus)) / (2.0 * h);
    }
    out
}

/// Centered finite-difference exterior derivative of a 1-form:
/// `(dλ)_{ij} = ∂_i λ_j - ∂_j λ_i`, error `O(h^2)` on smooth forms.
pub fn fd_exterior_derivative(
    one_form: &OneFormField,
    point: &ChartPoint,
    h: f64,
) -> Result<Mat4, GeometryError> {
    check_charts(one_form.chart, point.chart)?;
    // partial[i][j] = d(lambda_j)/dx_i
    let mut partial = [[0.0; 4]; 4];
    for i in 0..4 {
        let mut plus = point.coords;
        let mut minus = point.coords;
        plus[i] += h;
        minus[i] -= h;
        let lp = one_form.eval_coords(&plus);
        let lm = one_form.eval_coords(&minus);
        for j in 0..4 {
            partial[i][j] = (lp[j] - lm[j]) / (2.0 * h);
        }
    }
    let mut d = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            d[i][j] = partial[i][j] - partial[j][i];
        }
    }
    Ok(d)
}

/// The half radial field `V0 = (1/2) Σ (x_i ∂x_i + y_i ∂y_i)` at a point.
pub fn half_radial(point: &ChartPoint) -> Tangent4 {
    let c = point.coords;
    Tangent4::new(*point, [0.5 * c[0], 0.5 * c[1], 0.5 * c[2], 0.5 * c[3]])
}

pub(crate) fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

pub fn max_abs_diff(a: &Mat4, b: &Mat4) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}
