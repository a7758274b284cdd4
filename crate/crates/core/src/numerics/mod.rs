pub mod fd;
pub mod ode;
pub mod quad;
pub mod special;
pub mod tridiag;

/// Ordinary least squares `y = a + b x`; returns (a, b, rms residual).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: f64 = x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum();
    (a, b, (rss / n).sqrt())
}

/// Log-log slope of positive samples.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).1
}

/// `per_decade` log-spaced points covering [lo, hi], both ends included.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = ((decades * per_decade as f64).round() as usize).max(1);
    (0..=n)
        .map(|i| lo * 10f64.powf(decades * i as f64 / n as f64))
        .collect()
}

/// 1/sinh^2 r - 1/r^2, with its Maclaurin series near 0.
pub fn inv_sinh2_minus_inv_r2(r: f64) -> f64 {
    if r.abs() < 1e-2 {
        let r2 = r * r;
        -1.0 / 3.0 + r2 * (1.0 / 15.0 + r2 * (-2.0 / 189.0 + r2 * (1.0 / 675.0)))
    } else {
        let s = r.sinh();
        1.0 / (s * s) - 1.0 / (r * r)
    }
}
