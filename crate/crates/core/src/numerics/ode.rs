//! Adaptive Dormand-Prince 5(4) integrator over fixed-size real states.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-300,
            h_init: None,
            h_max: f64::INFINITY,
            max_steps: 5_000_000,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn max_abs<const N: usize>(y: &[f64; N]) -> f64 {
    y.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
///
/// `observe` sees the initial point and every accepted step. The error norm is
/// taken over the whole state vector, which keeps zero crossings of single
/// components from stalling the controller.
pub fn integrate<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    ctl: &StepControl,
    mut observe: O,
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N], &[f64; N]),
{
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut y = y0;
    let mut k0 = f(t, &y);
    observe(t, &y, &k0);
    if span == 0.0 {
        return Ok(y);
    }

    let mut h = match ctl.h_init {
        Some(h) => h.abs(),
        None => {
            let sc = ctl.atol + ctl.rtol * max_abs(&y);
            let d0 = max_abs(&y) / sc;
            let d1 = max_abs(&k0) / sc;
            let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            h0.min(span)
        }
    }
    .min(ctl.h_max);

    let mut steps = 0usize;
    while (t1 - t) * dir > 0.0 {
        steps += 1;
        if steps > ctl.max_steps {
            return Err(Error::Integration {
                r: t,
                reason: "step budget exhausted".into(),
            });
        }
        let mut last = false;
        if h >= (t1 - t).abs() {
            h = (t1 - t).abs();
            last = true;
        }
        let hs = h * dir;
        let mut k = [[0.0; N]; 7];
        k[0] = k0;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += hs * a * kj[i];
                    }
                }
            }
            k[s] = f(t + C[s] * hs, &ys);
        }
        let mut y_new = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            let b = A[6][j];
            for i in 0..N {
                y_new[i] += hs * b * kj[i];
            }
        }
        // k[6] was evaluated at y_new (FSAL).
        let mut err = [0.0; N];
        for (j, kj) in k.iter().enumerate() {
            for i in 0..N {
                err[i] += hs * E[j] * kj[i];
            }
        }
        let sc = ctl.atol + ctl.rtol * max_abs(&y).max(max_abs(&y_new));
        let en = max_abs(&err) / sc;
        if !en.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            h *= 0.25;
            if h < 1e-14 * t.abs().max(1e-300) {
                return Err(Error::Integration {
                    r: t,
                    reason: "non-finite state".into(),
                });
            }
            continue;
        }
        if en <= 1.0 {
            t = if last { t1 } else { t + hs };
            y = y_new;
            k0 = k[6];
            observe(t, &y, &k0);
            let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h * fac).min(ctl.h_max);
        } else {
            h *= (0.9 * en.powf(-0.2)).clamp(0.1, 0.9);
            if h < 1e-15 * t.abs().max(1e-300) {
                return Err(Error::Integration {
                    r: t,
                    reason: "step size underflow".into(),
                });
            }
        }
    }
    Ok(y)
}
