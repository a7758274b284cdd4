//! Symmetric tridiagonal eigenvalues by Sturm counting and bisection.

/// Number of eigenvalues strictly below `x`. `off[i]` couples rows i and i+1.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = diag[i] - x - if i == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = -1e-300;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues in `[lo, hi)`, each bisected to absolute width `tol`.
pub fn eigenvalues_in(diag: &[f64], off: &[f64], lo: f64, hi: f64, tol: f64) -> Vec<f64> {
    let n_lo = sturm_count(diag, off, lo);
    let n_hi = sturm_count(diag, off, hi);
    (n_lo..n_hi)
        .map(|k| {
            // k-th eigenvalue (0-based): smallest x with count(x) > k
            let (mut a, mut b) = (lo, hi);
            while b - a > tol {
                let m = 0.5 * (a + b);
                if sturm_count(diag, off, m) > k {
                    b = m;
                } else {
                    a = m;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrete_laplacian_spectrum() {
        let n = 50;
        let diag = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        let ev = eigenvalues_in(&diag, &off, 0.0, 0.1, 1e-14);
        let exact: Vec<f64> = (1..=n)
            .map(|k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .filter(|v| *v < 0.1)
            .collect();
        assert_eq!(ev.len(), exact.len());
        for (a, b) in ev.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
