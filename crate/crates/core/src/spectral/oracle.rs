//! Independent eigenvalue check: a symmetric second-order discretization of
//! `-d_rr + q` on a uniform mesh with Dirichlet ends, extrapolated in h.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::tridiag::eigenvalues_in;
use crate::operators::{MetricTerm, OperatorSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Coarsest mesh width; the finer meshes are h/2 and h/4.
    pub h: f64,
    /// Dirichlet box radius; `None` picks it from a coarse eigenvalue estimate.
    pub box_radius: Option<f64>,
}

impl OracleConfig {
    /// Mesh fine enough to resolve a potential core of width ~1/lambda.
    pub fn for_lambda(lambda: f64) -> Self {
        Self { h: 0.01 / lambda.max(1.0), box_radius: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Extrapolated eigenvalues in (0, q_inf).
    pub eigenvalues: Vec<f64>,
    /// Raw eigenvalues per mesh (h, h/2, h/4).
    pub per_mesh: Vec<Vec<f64>>,
    pub box_radius: f64,
}

fn mesh_eigenvalues(op: &OperatorSpec, h: f64, radius: f64, top: f64) -> Vec<f64> {
    let n = (radius / h).round() as usize - 1;
    let inv_h2 = 1.0 / (h * h);
    let diag: Vec<f64> = (1..=n).map(|i| 2.0 * inv_h2 + op.q(i as f64 * h)).collect();
    let off = vec![-inv_h2; n - 1];
    eigenvalues_in(&diag, &off, 0.0, top, 1e-14)
}

/// Eigenvalues in (0, q_inf) from three meshes, with the error model
/// `a + b h^2 log h + c h^2` (the r^{3/2} origin behaviour adds the log term).
pub fn matrix_oracle(op: &OperatorSpec, cfg: &OracleConfig) -> Result<OracleResult> {
    let op = op.half_line();
    if op.metric_term == MetricTerm::HyperbolicFour || cfg.h <= 0.0 {
        return Err(Error::Config("oracle needs a half-line operator and h > 0".into()));
    }
    let top = op.q_infinity();
    let box_radius = match cfg.box_radius {
        Some(r) => r,
        None => {
            let coarse = mesh_eigenvalues(&op, cfg.h, 60.0, top);
            match coarse.last() {
                Some(&mu) => (25.0 / (top - mu).max(1e-8).sqrt()).clamp(60.0, 2000.0),
                None => 60.0,
            }
        }
    };
    let hs = [cfg.h, 0.5 * cfg.h, 0.25 * cfg.h];
    let per_mesh: Vec<Vec<f64>> = hs.iter().map(|&h| mesh_eigenvalues(&op, h, box_radius, top)).collect();
    let count = per_mesh.iter().map(Vec::len).min().unwrap_or(0);
    let eigenvalues = (0..count)
        .map(|k| {
            let v = [per_mesh[0][k], per_mesh[1][k], per_mesh[2][k]];
            extrapolate(&hs, &v)
        })
        .collect();
    Ok(OracleResult { eigenvalues, per_mesh, box_radius })
}

/// Solves for `a` in `v_i = a + b h_i^2 ln h_i + c h_i^2`.
fn extrapolate(h: &[f64; 3], v: &[f64; 3]) -> f64 {
    let row = |i: usize| [1.0, h[i] * h[i] * h[i].ln(), h[i] * h[i]];
    let m = [row(0), row(1), row(2)];
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let mut ma = m;
    for i in 0..3 {
        ma[i][0] = v[i];
    }
    det(&ma) / det(&m)
}
