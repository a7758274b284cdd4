//! Finite-difference derivatives: Fornberg stencils on grids, Richardson on closures.

/// Fornberg weights for derivatives 0..=m at `x0` from nodes `xs`.
pub fn fornberg(x0: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// First and second derivatives at every node from 5-point stencils
/// (centered in the interior, shifted at the ends).
pub fn derivatives_on_grid(x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    assert!(n >= 5, "need at least five nodes");
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 0..n {
        let lo = i.saturating_sub(2).min(n - 5);
        let w = fornberg(x[i], &x[lo..lo + 5], 2);
        d1[i] = (0..5).map(|k| w[1][k] * y[lo + k]).sum();
        d2[i] = (0..5).map(|k| w[2][k] * y[lo + k]).sum();
    }
    (d1, d2)
}

fn d1_4(f: &impl Fn(f64) -> f64, r: f64, h: f64) -> f64 {
    (f(r - 2.0 * h) - 8.0 * f(r - h) + 8.0 * f(r + h) - f(r + 2.0 * h)) / (12.0 * h)
}

fn d2_4(f: &impl Fn(f64) -> f64, r: f64, h: f64) -> f64 {
    (-f(r - 2.0 * h) + 16.0 * f(r - h) - 30.0 * f(r) + 16.0 * f(r + h) - f(r + 2.0 * h)) / (12.0 * h * h)
}

/// First derivative: 4th-order centered difference with one Richardson step.
pub fn d1_richardson(f: impl Fn(f64) -> f64, r: f64, h: f64) -> f64 {
    (16.0 * d1_4(&f, r, 0.5 * h) - d1_4(&f, r, h)) / 15.0
}

/// Second derivative: 4th-order centered difference with one Richardson step.
pub fn d2_richardson(f: impl Fn(f64) -> f64, r: f64, h: f64) -> f64 {
    (16.0 * d2_4(&f, r, 0.5 * h) - d2_4(&f, r, h)) / 15.0
}
