use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{fd, quad};

/// A function sampled on a half-line grid `0 < r_0 < r_1 < ... <= R_max`.
///
/// `origin_order` is the exponent `nu` of the leading behaviour `c r^nu` at 0.
/// When the producer knows the derivative (ODE solutions), it is kept so that
/// interpolation can be Hermite instead of Lagrange.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub derivatives: Option<Vec<f64>>,
    pub origin_order: f64,
}

impl RadialProfile {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, origin_order: f64) -> Result<Self> {
        if grid.len() != values.len() || grid.len() < 2 {
            return Err(Error::Precondition("grid and values must have equal length >= 2".into()));
        }
        if grid[0] <= 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Precondition("grid must be positive and strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("profile values must be finite".into()));
        }
        Ok(Self { grid, values, derivatives: None, origin_order })
    }

    pub fn with_derivatives(mut self, d: Vec<f64>) -> Result<Self> {
        if d.len() != self.grid.len() {
            return Err(Error::Precondition("derivative length mismatch".into()));
        }
        self.derivatives = Some(d);
        Ok(self)
    }

    pub fn from_fn(grid: Vec<f64>, origin_order: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.iter().map(|&r| f(r)).collect();
        Self::new(grid, values, origin_order)
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            values: vec![0.0; self.grid.len()],
            derivatives: self.derivatives.as_ref().map(|d| vec![0.0; d.len()]),
            origin_order: self.origin_order,
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn scale(&mut self, c: f64) {
        self.values.iter_mut().for_each(|v| *v *= c);
        if let Some(d) = self.derivatives.as_mut() {
            d.iter_mut().for_each(|v| *v *= c);
        }
    }

    /// Derivative at the nodes: stored if available, else 5-point stencils.
    pub fn derivative(&self) -> Vec<f64> {
        match &self.derivatives {
            Some(d) => d.clone(),
            None if self.len() >= 5 => fd::derivatives_on_grid(&self.grid, &self.values).0,
            None => {
                let n = self.len();
                let s = (self.values[n - 1] - self.values[0]) / (self.grid[n - 1] - self.grid[0]);
                vec![s; n]
            }
        }
    }

    /// Value at `r`; `None` beyond the grid. Below the first node the
    /// leading power law `r^nu` is used.
    pub fn value_at(&self, r: f64) -> Option<f64> {
        let g = &self.grid;
        let n = g.len();
        if r > g[n - 1] * (1.0 + 1e-14) || r <= 0.0 {
            return None;
        }
        if r <= g[0] {
            return Some(self.values[0] * (r / g[0]).powf(self.origin_order));
        }
        let i = g.partition_point(|&x| x <= r).clamp(1, n - 1) - 1;
        if let Some(d) = &self.derivatives {
            let h = g[i + 1] - g[i];
            let t = (r - g[i]) / h;
            let (t2, t3) = (t * t, t * t * t);
            let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
            let h10 = t3 - 2.0 * t2 + t;
            let h01 = -2.0 * t3 + 3.0 * t2;
            let h11 = t3 - t2;
            return Some(
                h00 * self.values[i] + h10 * h * d[i] + h01 * self.values[i + 1] + h11 * h * d[i + 1],
            );
        }
        // cubic Lagrange through four neighbours
        let lo = i.saturating_sub(1).min(n.saturating_sub(4));
        let hi = (lo + 4).min(n);
        let mut s = 0.0;
        for j in lo..hi {
            let mut l = 1.0;
            for k in lo..hi {
                if k != j {
                    l *= (r - g[k]) / (g[j] - g[k]);
                }
            }
            s += l * self.values[j];
        }
        Some(s)
    }

    /// Resample onto `grid`; points beyond R_max get `fill`.
    pub fn resample(&self, grid: &[f64], fill: f64) -> Vec<f64> {
        grid.iter().map(|&r| self.value_at(r).unwrap_or(fill)).collect()
    }

    /// `int_0^{R_max} g(r, f(r), f'(r)) dr`.
    ///
    /// Simpson on the stored grid; the origin panel `[0, r_0]` assumes the
    /// integrand behaves like a power of r there, with the exponent read off
    /// the first two samples.
    pub fn integrate(&self, g: impl Fn(f64, f64, f64) -> f64) -> f64 {
        let d = self.derivative();
        let ys: Vec<f64> = (0..self.len()).map(|i| g(self.grid[i], self.values[i], d[i])).collect();
        let body = quad::simpson(&self.grid, &ys);
        let (r0, r1) = (self.grid[0], self.grid[1]);
        let head = if ys[0] != 0.0 && ys[1] / ys[0] > 0.0 {
            let p = (ys[1] / ys[0]).ln() / (r1 / r0).ln();
            if p > -1.0 {
                ys[0] * r0 / (p + 1.0)
            } else {
                0.5 * ys[0] * r0
            }
        } else {
            0.5 * ys[0] * r0
        };
        body + head
    }

    /// Squared L^2(0, R_max) norm.
    pub fn l2_norm_sq(&self) -> f64 {
        self.integrate(|_, f, _| f * f)
    }

    /// Number of sign changes, ignoring samples below `floor` times the max modulus.
    pub fn sign_changes(&self) -> usize {
        let scale = self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let floor = 1e-300_f64.max(scale * 1e-14);
        let mut last = 0.0;
        let mut count = 0;
        for &v in &self.values {
            if v.abs() <= floor {
                continue;
            }
            if last != 0.0 && v.signum() != last {
                count += 1;
            }
            last = v.signum();
        }
        count
    }

    /// Limit value at R_max: mean over the last 10% of the grid, whose spread must be < 1e-6.
    pub fn endpoint(&self) -> Result<f64> {
        let n = self.len();
        let k = (n / 10).max(2).min(n);
        let tail = &self.values[n - k..];
        let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo >= 1e-6 {
            return Err(Error::InconclusiveEndpoint { spread: hi - lo });
        }
        Ok(tail.iter().sum::<f64>() / k as f64)
    }
}

/// Uniform grid `h, 2h, ..., <= r_max` (the origin is excluded).
pub fn uniform_grid(h: f64, r_max: f64) -> Vec<f64> {
    let n = (r_max / h).round() as usize;
    (1..=n).map(|i| i as f64 * h).collect()
}

/// Geometric spacing from `r_min` up to spacing `h`, uniform afterwards up to `r_max`.
pub fn graded_grid(r_min: f64, ratio: f64, h: f64, r_max: f64) -> Vec<f64> {
    let mut g = vec![r_min];
    let mut r = r_min;
    while r * (ratio - 1.0) < h && r < r_max {
        r *= ratio;
        g.push(r);
    }
    while r + h <= r_max + 1e-12 {
        r += h;
        g.push(r);
    }
    let last = *g.last().unwrap();
    if r_max - last > 0.1 * h {
        g.push(r_max);
    } else if g.len() > 1 {
        *g.last_mut().unwrap() = r_max;
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(RadialProfile::new(vec![0.0, 1.0], vec![0.0, 0.0], 1.0).is_err());
        assert!(RadialProfile::new(vec![1.0, 1.0], vec![0.0, 0.0], 1.0).is_err());
        assert!(RadialProfile::new(vec![1.0, 2.0], vec![f64::NAN, 0.0], 1.0).is_err());
    }

    #[test]
    fn integral_with_power_head() {
        let p = RadialProfile::from_fn(graded_grid(1e-3, 1.05, 0.01, 3.0), 1.5, |r| r.powf(1.5)).unwrap();
        let v = p.integrate(|_, f, _| f);
        assert!((v - 3f64.powf(2.5) / 2.5).abs() < 1e-7, "{v}");
    }

    #[test]
    fn endpoint_needs_settled_tail() {
        let p = RadialProfile::from_fn(uniform_grid(0.1, 30.0), 1.0, |r| 1.0 - (-r).exp()).unwrap();
        assert!((p.endpoint().unwrap() - 1.0).abs() < 1e-9);
        let q = RadialProfile::from_fn(uniform_grid(0.1, 30.0), 1.0, |r| r).unwrap();
        assert!(matches!(q.endpoint(), Err(Error::InconclusiveEndpoint { .. })));
    }

    #[test]
    fn hermite_interpolation() {
        let g = uniform_grid(0.1, 5.0);
        let p = RadialProfile::from_fn(g.clone(), 1.0, f64::sin)
            .unwrap()
            .with_derivatives(g.iter().map(|r| r.cos()).collect())
            .unwrap();
        assert!((p.value_at(2.345).unwrap() - 2.345f64.sin()).abs() < 1e-6);
        assert!(p.value_at(6.0).is_none());
    }
}
