//! Embedded Dormand-Prince 5(4) integrator with adaptive step control,
//! for the non-autonomous radial flows of this module. Validated by
//! step-halving in the callers' tests; a fixed-step RK4 is provided as an
//! independent oracle for those checks.

use super::IsotopyError;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-12, max_steps: 100_000 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `dy/dt = f(t, y)` from `t0` to `t1`.
pub fn integrate<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    t1: f64,
    y0: [f64; N],
    opts: &OdeOptions,
) -> Result<[f64; N], IsotopyError> {
    if t1 == t0 {
        return Ok(y0);
    }
    let span = t1 - t0;
    let mut t = t0;
    let mut y = y0;
    let mut h = span / 100.0;
    let mut steps = 0usize;
    while (span > 0.0 && t < t1) || (span < 0.0 && t > t1) {
        if steps >= opts.max_steps {
            return Err(IsotopyError::FlowFailure(format!("max steps exceeded at t = {t}")));
        }
        steps += 1;
        if (span > 0.0 && t + h > t1) || (span < 0.0 && t + h < t1) {
            h = t1 - t;
        }
        let mut k = [[0.0; N]; 7];
        k[0] = f(t, &y);
        for stage in 1..7 {
            let mut ys = y;
            for j in 0..stage {
                let a = A[stage][j];
                if a != 0.0 {
                    for n in 0..N {
                        ys[n] += h * a * k[j][n];
                    }
                }
            }
            k[stage] = f(t + C[stage] * h, &ys);
        }
        let mut y5 = y;
        let mut y4 = y;
        for stage in 0..7 {
            for n in 0..N {
                y5[n] += h * B5[stage] * k[stage][n];
                y4[n] += h * B4[stage] * k[stage][n];
            }
        }
        // weighted RMS error norm
        let mut err: f64 = 0.0;
        for n in 0..N {
            let scale = opts.atol + opts.rtol * y[n].abs().max(y5[n].abs());
            err = err.max(((y5[n] - y4[n]) / scale).abs());
        }
        if err <= 1.0 {
            t += h;
            y = y5;
        }
        let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
        if h.abs() < 1e-15 * span.abs() {
            return Err(IsotopyError::StepSizeUnderflow { t });
        }
    }
    Ok(y)
}

/// Fixed-step classical RK4, used as a step-halving oracle in tests.
pub fn integrate_rk4<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    t1: f64,
    y0: [f64; N],
    n_steps: usize,
) -> [f64; N] {
    let h = (t1 - t0) / n_steps as f64;
    let mut t = t0;
    let mut y = y0;
    for _ in 0..n_steps {
        let k1 = f(t, &y);
        let mut y2 = y;
        for n in 0..N {
            y2[n] += 0.5 * h * k1[n];
        }
        let k2 = f(t + 0.5 * h, &y2);
        let mut y3 = y;
        for n in 0..N {
            y3[n] += 0.5 * h * k2[n];
        }
        let k3 = f(t + 0.5 * h, &y3);
        let mut y4 = y;
        for n in 0..N {
            y4[n] += h * k3[n];
        }
        let k4 = f(t + h, &y4);
        for n in 0..N {
            y[n] += h / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
        }
        t += h;
    }
    y
}
