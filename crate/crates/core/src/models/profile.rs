//! Profile curves in the `(q1, p2)` slice plane and the orbit surfaces
//! they sweep out under the model circle action.
//!
//! A point `(q1, p2)` orbits as `(q1 cos t, -p2 sin t, q1 sin t, p2 cos t)`,
//! so a profile `(a(s), b(s))` generates the surface
//! `C(t, s) = (a cos t, -b sin t, a sin t, b cos t)` whose symplectic
//! density is `a'b + b'a`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::geometry::grid::{GridSpec, VerificationReport};
use crate::geometry::patch::{ParamPatch, Rect};
use crate::geometry::Chart;

use super::ModelError;

const TAU: f64 = std::f64::consts::TAU;

type Scalar = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A planar curve `s -> (a(s), b(s))` with derivative data.
#[derive(Clone)]
pub struct ProfileCurve {
    pub name: String,
    pub domain: (f64, f64),
    a: Scalar,
    b: Scalar,
    da: Scalar,
    db: Scalar,
    serial: ProfileSerial,
}

#[derive(Clone)]
enum ProfileSerial {
    Named { name: String, params: std::collections::BTreeMap<String, f64> },
    Samples,
}

impl std::fmt::Debug for ProfileCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProfileCurve")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl ProfileCurve {
    pub fn closed_form(
        name: impl Into<String>,
        domain: (f64, f64),
        a: impl Fn(f64) -> f64 + Send + Sync + 'static,
        b: impl Fn(f64) -> f64 + Send + Sync + 'static,
        da: impl Fn(f64) -> f64 + Send + Sync + 'static,
        db: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let name = name.into();
        ProfileCurve {
            serial: ProfileSerial::Named { name: name.clone(), params: Default::default() },
            name,
            domain,
            a: Arc::new(a),
            b: Arc::new(b),
            da: Arc::new(da),
            db: Arc::new(db),
        }
    }

    fn with_params(mut self, params: &[(&str, f64)]) -> Self {
        if let ProfileSerial::Named { params: p, .. } = &mut self.serial {
            *p = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        }
        self
    }

    /// The profile of the model surface: `a = 1`, `b = s` on `[-c, c]`.
    pub fn sigma_ml(c: f64) -> Self {
        Self::closed_form("sigma_ml", (-c, c), |_| 1.0, |s| s, |_| 0.0, |_| 1.0)
            .with_params(&[("c", c)])
    }

    /// Sampled profile with linear interpolation between nodes.
    /// Columns per row: `[s, a, b, a', b']`.
    pub fn from_samples(name: impl Into<String>, rows: Vec<[f64; 5]>) -> Result<Self, ModelError> {
        if rows.len() < 2 {
            return Err(ModelError::Parse("need at least 2 sample rows".into()));
        }
        for w in rows.windows(2) {
            if w[1][0] <= w[0][0] {
                return Err(ModelError::Parse("sample s-values must be strictly increasing".into()));
            }
        }
        let domain = (rows[0][0], rows[rows.len() - 1][0]);
        let rows = Arc::new(rows);
        let interp = |col: usize, rows: Arc<Vec<[f64; 5]>>| -> Scalar {
            Arc::new(move |s: f64| {
                let r = &rows[..];
                let k = match r.binary_search_by(|row| row[0].partial_cmp(&s).unwrap()) {
                    Ok(k) => return r[k][col],
                    Err(k) => k.clamp(1, r.len() - 1),
                };
                let (lo, hi) = (&r[k - 1], &r[k]);
                let t = (s - lo[0]) / (hi[0] - lo[0]);
                lo[col] + t * (hi[col] - lo[col])
            })
        };
        Ok(ProfileCurve {
            name: name.into(),
            domain,
            a: interp(1, rows.clone()),
            b: interp(2, rows.clone()),
            da: interp(3, rows.clone()),
            db: interp(4, rows),
            serial: ProfileSerial::Samples,
        })
    }

    pub fn a(&self, s: f64) -> f64 {
        (self.a)(s)
    }

    pub fn b(&self, s: f64) -> f64 {
        (self.b)(s)
    }

    pub fn da(&self, s: f64) -> f64 {
        (self.da)(s)
    }

    pub fn db(&self, s: f64) -> f64 {
        (self.db)(s)
    }

    /// Closed-form orbit density `a'b + b'a` at `s`.
    pub fn density(&self, s: f64) -> f64 {
        self.da(s) * self.b(s) + self.db(s) * self.a(s)
    }

    /// Cross-check declared derivatives against centered differences.
    /// Returns the max absolute discrepancy over interior samples.
    pub fn derivative_residual(&self, n: usize, h: f64) -> f64 {
        let (s0, s1) = self.domain;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let s = s0 + h + (s1 - s0 - 2.0 * h) * k as f64 / (n - 1) as f64;
            let fa = (self.a(s + h) - self.a(s - h)) / (2.0 * h);
            let fb = (self.b(s + h) - self.b(s - h)) / (2.0 * h);
            worst = worst.max((fa - self.da(s)).abs()).max((fb - self.db(s)).abs());
        }
        worst
    }

    pub fn sample_polyline(&self, n: usize) -> Vec<(f64, f64)> {
        let (s0, s1) = self.domain;
        (0..n)
            .map(|k| {
                let s = s0 + (s1 - s0) * k as f64 / (n - 1) as f64;
                (self.a(s), self.b(s))
            })
            .collect()
    }

    pub fn to_json(&self, sample_count: usize) -> ProfileJson {
        match &self.serial {
            ProfileSerial::Named { name, params } => ProfileJson::ClosedForm {
                kind: "closed_form".into(),
                name: name.clone(),
                params: params.clone(),
            },
            ProfileSerial::Samples => {
                let (s0, s1) = self.domain;
                let samples = (0..sample_count)
                    .map(|k| {
                        let s = s0 + (s1 - s0) * k as f64 / (sample_count - 1) as f64;
                        [s, self.a(s), self.b(s), self.da(s), self.db(s)]
                    })
                    .collect();
                ProfileJson::Samples { samples }
            }
        }
    }

    pub fn from_json(json: &ProfileJson) -> Result<Self, ModelError> {
        match json {
            ProfileJson::Samples { samples } => Self::from_samples("samples", samples.clone()),
            ProfileJson::ClosedForm { name, params, .. } => {
                let get = |key: &str| {
                    params
                        .get(key)
                        .copied()
                        .ok_or_else(|| ModelError::Parse(format!("missing param {key}")))
                };
                match name.as_str() {
                    "sigma_ml" => Ok(Self::sigma_ml(get("c")?)),
                    "deformation_family" => deformation_family(get("tau")?, get("eps")?),
                    "nodalized" => nodalized_profile(get("eps")?, get("corner_radius")?),
                    other => Err(ModelError::Parse(format!("unknown closed form `{other}`"))),
                }
            }
        }
    }
}

/// Serialized profile data.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileJson {
    ClosedForm { kind: String, name: String, params: std::collections::BTreeMap<String, f64> },
    Samples { samples: Vec<[f64; 5]> },
}

/// Orbit surface `C(t, s) = (a cos t, -b sin t, a sin t, b cos t)` over
/// `(t, s) in [0, 2pi] x domain`, with analytic partials.
pub fn orbit_surface(profile: &ProfileCurve) -> ParamPatch {
    let p = profile.clone();
    let q = profile.clone();
    ParamPatch::analytic(
        format!("orbit[{}]", profile.name),
        Chart::Cotangent,
        Rect::new(0.0, TAU, profile.domain.0, profile.domain.1),
        move |t, s| {
            let (a, b) = (p.a(s), p.b(s));
            [a * t.cos(), -b * t.sin(), a * t.sin(), b * t.cos()]
        },
        move |t, s| {
            let (a, b, da, db) = (q.a(s), q.b(s), q.da(s), q.db(s));
            (
                [-a * t.sin(), -b * t.cos(), a * t.cos(), -b * t.sin()],
                [da * t.cos(), -db * t.sin(), da * t.sin(), db * t.cos()],
            )
        },
    )
}

/// The same orbit surface with the circle parameter reversed,
/// `C(-t, s) = (a cos t, b sin t, -a sin t, b cos t)`; this is the
/// orientation consumed by the chart change of [`super::coord`].
pub fn orbit_surface_reversed(profile: &ProfileCurve) -> ParamPatch {
    let p = profile.clone();
    let q = profile.clone();
    ParamPatch::analytic(
        format!("orbit_rev[{}]", profile.name),
        Chart::Cotangent,
        Rect::new(0.0, TAU, profile.domain.0, profile.domain.1),
        move |t, s| {
            let (a, b) = (p.a(s), p.b(s));
            [a * t.cos(), b * t.sin(), -a * t.sin(), b * t.cos()]
        },
        move |t, s| {
            let (a, b, da, db) = (q.a(s), q.b(s), q.da(s), q.db(s));
            (
                [-a * t.sin(), b * t.cos(), -a * t.cos(), -b * t.sin()],
                [da * t.cos(), db * t.sin(), -da * t.sin(), db * t.cos()],
            )
        },
    )
}

/// Check the four-condition admissibility table at `n_samples` points:
/// `a > 0`, `b' > 0`, `a' <= 0` wherever `b <= 0`, `a' >= 0` wherever
/// `b >= 0`. Failures are reported, not thrown. A passing profile has
/// positive sampled density, which the report's min field records.
pub fn profile_admissible(profile: &ProfileCurve, n_samples: usize) -> VerificationReport {
    assert!(n_samples >= 2, "need at least 2 samples");
    let (s0, s1) = profile.domain;
    let sign_tol = 1e-12;
    let mut min_density = f64::INFINITY;
    let mut max_density = f64::NEG_INFINITY;
    let mut witness: Option<(f64, String)> = None;
    for k in 0..n_samples {
        let s = s0 + (s1 - s0) * k as f64 / (n_samples - 1) as f64;
        let (a, b, da, db) = (profile.a(s), profile.b(s), profile.da(s), profile.db(s));
        let density = da * b + db * a;
        if density.is_finite() {
            min_density = min_density.min(density);
            max_density = max_density.max(density);
        }
        if witness.is_some() {
            continue;
        }
        let clause = if !(a.is_finite() && b.is_finite() && da.is_finite() && db.is_finite()) {
            Some("non-finite profile data".to_string())
        } else if a <= 0.0 {
            Some(format!("a(s) = {a} <= 0"))
        } else if db <= 0.0 {
            Some(format!("b'(s) = {db} <= 0"))
        } else if b <= 0.0 && da > sign_tol {
            Some(format!("a'(s) = {da} > 0 where b(s) = {b} <= 0"))
        } else if b >= 0.0 && da < -sign_tol {
            Some(format!("a'(s) = {da} < 0 where b(s) = {b} >= 0"))
        } else {
            None
        };
        if let Some(clause) = clause {
            witness = Some((s, clause));
        }
    }
    let pass = witness.is_none();
    let mut report = VerificationReport {
        quantity: format!("admissibility[{}]", profile.name),
        grid: GridSpec::new(n_samples, 1),
        predicate: "four-condition table".into(),
        min: min_density,
        max: max_density,
        witness: witness.as_ref().map(|(s, _)| vec![*s]).unwrap_or_default(),
        tol: sign_tol,
        pass,
        detail: None,
    };
    if let Some((_, clause)) = witness {
        report = report.with_detail(clause);
    }
    report
}

/// A family of admissible profiles deforming the vertical model slice
/// toward the concatenated push-off slice (the wedge through the origin
/// with slopes `±1/eps` in `(q1, p2)`, i.e. `q1 = min(1, |p2|/eps)`).
///
/// `tau = 0` returns the model profile exactly; as `tau -> 1` the profile
/// converges in C0 to the wedge. Realized by mixing toward a smoothed
/// wedge whose smoothing width shrinks with `1 - tau`.
pub fn deformation_family(tau: f64, eps: f64) -> Result<ProfileCurve, ModelError> {
    if !(0.0..1.0).contains(&tau) {
        return Err(ModelError::InvalidParameter(format!("tau = {tau} outside [0, 1)")));
    }
    if eps <= 0.0 || eps >= 1.0 {
        return Err(ModelError::InvalidParameter(format!("eps = {eps} outside (0, 1)")));
    }
    let c = 1.0;
    // smooth |x| and the smooth min(1, .) built from it
    let sigma = 0.5 * (1.0 - tau);
    let soft = move |x: f64| (x * x + sigma * sigma).sqrt();
    let dsoft = move |x: f64| x / soft(x);
    let wedge = move |u: f64| 0.5 * (1.0 + soft(u) - soft(1.0 - soft(u)));
    let dwedge = move |u: f64| 0.5 * dsoft(u) * (1.0 + dsoft(1.0 - soft(u)));
    let a = move |s: f64| (1.0 - tau) + tau * wedge(s / eps);
    let da = move |s: f64| tau * dwedge(s / eps) / eps;
    Ok(ProfileCurve::closed_form(
        format!("deformation[tau={tau}]"),
        (-c, c),
        a,
        |s| s,
        da,
        |_| 1.0,
    )
    .with_params(&[("tau", tau), ("eps", eps)]))
}

/// The nodal slice: agrees with the model profile `(1, s)` in the far
/// field, runs along the push-off slice lines `p2 = ∓eps·q1` near the
/// origin, and joins the two by circular-arc fillets at `(1, ∓eps)`.
/// Passes through the origin (the node) at `s = 0`.
pub fn nodalized_profile(eps: f64, corner_radius: f64) -> Result<ProfileCurve, ModelError> {
    let c = 1.0;
    if eps <= 0.0 || eps >= 0.5 {
        return Err(ModelError::InvalidParameter(format!("eps = {eps} outside (0, 0.5)")));
    }
    if corner_radius <= 0.0 {
        return Err(ModelError::InvalidParameter("corner_radius must be positive".into()));
    }
    // corner at P = (1, -eps); rays away from it: down the vertical line and
    // toward the origin along the push-off slice
    let len = (1.0 + eps * eps).sqrt();
    let v1 = (0.0, -1.0);
    let v2 = (-1.0 / len, eps / len);
    let cos_alpha = v1.0 * v2.0 + v1.1 * v2.1;
    let alpha = cos_alpha.clamp(-1.0, 1.0).acos();
    let tangent_len = corner_radius / (alpha / 2.0).tan();
    // the fillet must leave room on both rays and keep the arc below s = 0
    let limit_vertical = c - eps;
    let limit_slope = 0.9 * len;
    let limit = limit_vertical.min(limit_slope);
    if tangent_len >= limit {
        let max_radius = limit * (alpha / 2.0).tan();
        return Err(ModelError::CornerTooLarge { radius: corner_radius, limit: max_radius });
    }
    let p = (1.0, -eps);
    let t1 = (p.0 + tangent_len * v1.0, p.1 + tangent_len * v1.1);
    let t2 = (p.0 + tangent_len * v2.0, p.1 + tangent_len * v2.1);
    let bis_raw = (v1.0 + v2.0, v1.1 + v2.1);
    let bis_norm = (bis_raw.0 * bis_raw.0 + bis_raw.1 * bis_raw.1).sqrt();
    let center_dist = corner_radius / (alpha / 2.0).sin();
    let center =
        (p.0 + center_dist * bis_raw.0 / bis_norm, p.1 + center_dist * bis_raw.1 / bis_norm);
    let phi1 = (t1.1 - center.1).atan2(t1.0 - center.0);
    let phi2 = (t2.1 - center.1).atan2(t2.0 - center.0);
    let mut sweep = phi2 - phi1;
    while sweep > std::f64::consts::PI {
        sweep -= TAU;
    }
    while sweep < -std::f64::consts::PI {
        sweep += TAU;
    }
    let arc_len = corner_radius * sweep.abs();
    // unit-speed parameter boundaries on the lower half
    let s_arc_start = -eps - tangent_len; // = t1.1
    let s_arc_end = s_arc_start + arc_len;
    if s_arc_end >= 0.0 {
        return Err(ModelError::CornerTooLarge { radius: corner_radius, limit });
    }
    let r = corner_radius;
    // lower-half curve for s in [-c, 0]; the upper half is its mirror
    let lower = move |s: f64| -> (f64, f64, f64, f64) {
        if s <= s_arc_start {
            (1.0, s, 0.0, 1.0)
        } else if s <= s_arc_end {
            let phi = phi1 + sweep * (s - s_arc_start) / arc_len;
            (
                center.0 + r * phi.cos(),
                center.1 + r * phi.sin(),
                -phi.sin() * sweep.signum(),
                phi.cos() * sweep.signum(),
            )
        } else {
            // straight run from t2 into the origin, linear in s
            let w = s / s_arc_end; // 1 at the arc end, 0 at the node
            (t2.0 * w, t2.1 * w, t2.0 / s_arc_end, t2.1 / s_arc_end)
        }
    };
    let full = move |s: f64| -> (f64, f64, f64, f64) {
        if s <= 0.0 {
            lower(s)
        } else {
            let (a, b, da, db) = lower(-s);
            (a, -b, -da, db)
        }
    };
    Ok(ProfileCurve::closed_form(
        format!("nodalized[eps={eps}]"),
        (-c, c),
        move |s| full(s).0,
        move |s| full(s).1,
        move |s| full(s).2,
        move |s| full(s).3,
    )
    .with_params(&[("eps", eps), ("corner_radius", corner_radius)]))
}
