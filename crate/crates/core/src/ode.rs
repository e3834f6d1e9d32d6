//! Adaptive Dormand-Prince 5(4) stepping for small fixed-size systems.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MAX_STEPS: usize = 2_000_000;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates `dy/dt = f(t, y)` from `t0` through every point of `stops`
/// (ascending, all `> t0`), returning the state at each stop.
///
/// `f` may return `Err` to abort (e.g. on a detected pole).
pub(crate) fn integrate<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    stops: &[f64],
    tol: Tolerance,
) -> Result<Vec<[f64; N]>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut out = Vec::with_capacity(stops.len());
    let Some(&t_end) = stops.last() else {
        return Ok(out);
    };
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;
    let mut h = ((t_end - t0) * 1e-3).max(1e-12);
    let mut next_stop = 0;
    let mut steps = 0;

    while next_stop < stops.len() {
        let target = stops[next_stop];
        if t >= target {
            out.push(y);
            next_stop += 1;
            continue;
        }
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::Tolerance(format!("step budget exhausted at t = {t}")));
        }
        let mut last = false;
        if t + h >= target {
            h = target - t;
            last = true;
        }

        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]))?;
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = f(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let k6 = f(
            t + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        )?;
        let y_new = axpy(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + h, &y_new)?;

        let mut err: f64 = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / sc).abs());
        }
        if !err.is_finite() {
            h *= 0.1;
            if h < 1e-14 * (1.0 + t.abs()) {
                return Err(Error::Tolerance(format!("non-finite step error at t = {t}")));
            }
            continue;
        }

        if err <= 1.0 {
            t = if last { target } else { t + h };
            y = y_new;
            k1 = k7;
            let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).min(5.0) };
            h *= grow.max(1.0);
        } else {
            h *= (0.9 * err.powf(-0.2)).max(0.1);
            if h < 1e-14 * (1.0 + t.abs()) {
                return Err(Error::Tolerance(format!("step size underflow at t = {t}")));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let tol = Tolerance { rtol: 1e-12, atol: 1e-14 };
        let out = integrate(|_, y: &[f64; 1]| Ok([y[0]]), 0.0, [1.0], &[0.5, 1.0], tol).unwrap();
        assert!((out[0][0] - 0.5f64.exp()).abs() < 1e-11);
        assert!((out[1][0] - 1f64.exp()).abs() < 1e-11);
    }

    #[test]
    fn riccati_tanh() {
        // u' = 1 - u^2, u(0) = 0  ->  tanh(t)
        let tol = Tolerance { rtol: 1e-11, atol: 1e-13 };
        let out = integrate(|_, u: &[f64; 1]| Ok([1.0 - u[0] * u[0]]), 0.0, [0.0], &[3.0], tol)
            .unwrap();
        assert!((out[0][0] - 3f64.tanh()).abs() < 1e-10);
    }
}
