use crate::error::{Error, Result};
use crate::geometry::{explicit_solution_value, ExplicitSolutionKind};
use crate::numerics::quad::cumulative_trapezoid;
use crate::operators::{renormalized_potential, OperatorSpec};
use crate::profile::RadialProfile;

use super::{half_line, jost_state, ShootingConfig, Trace};

/// The solution at the threshold tending to 1 at infinity (the m = 0 Jost solution),
/// integrated inward from r_max to `r_to`.
pub fn threshold_jost(op: &OperatorSpec, r_to: f64, cfg: &ShootingConfig) -> Result<RadialProfile> {
    cfg.validate()?;
    let op = half_line(op)?;
    let mut t = Trace::default();
    jost_state(&op, op.q_infinity(), r_to, cfg, Some(&mut t))?;
    t.into_profile(-0.5)
}

/// Solves `(g' phi_0^2)' = phi_0^2 W g`, `(g, g')(0) = (1, 0)` on (0, rho_max]
/// by Picard iteration of the double-integral form. Values are g, derivatives g'.
pub fn renormalized_ratio(lambda: f64, mu_bar_sq: f64, rho_max: f64, max_iter: usize) -> Result<RadialProfile> {
    if !(lambda > 0.0 && rho_max > 0.0 && rho_max <= lambda * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!("need 0 < rho_max <= lambda, got rho_max = {rho_max}, lambda = {lambda}")));
    }
    if !(mu_bar_sq > 0.0 && mu_bar_sq <= 0.25) {
        return Err(Error::Domain(format!("mu_bar^2 = {mu_bar_sq} outside (0, 1/4]")));
    }
    let n = ((rho_max / 2.5e-4).ceil() as usize).clamp(20_000, 400_000);
    let h = rho_max / n as f64;
    let rho: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let phi_sq: Vec<f64> = rho
        .iter()
        .map(|&p| {
            if p == 0.0 {
                0.0
            } else {
                explicit_solution_value(ExplicitSolutionKind::EuclideanResonance, 0.0, p).unwrap().powi(2)
            }
        })
        .collect();
    let weight: Vec<f64> = rho
        .iter()
        .zip(&phi_sq)
        .map(|(&p, &f)| f * renormalized_potential(lambda, mu_bar_sq, p))
        .collect();

    let mut g = vec![1.0; n + 1];
    let mut gp = vec![0.0; n + 1];
    let mut last_diff = f64::INFINITY;
    for iter in 0..max_iter {
        let src: Vec<f64> = weight.iter().zip(&g).map(|(w, v)| w * v).collect();
        let inner = cumulative_trapezoid(&rho, &src);
        for i in 1..=n {
            gp[i] = inner[i] / phi_sq[i];
        }
        let outer = cumulative_trapezoid(&rho, &gp);
        let mut diff = 0.0_f64;
        let mut scale = 0.0_f64;
        for i in 0..=n {
            let v = 1.0 + outer[i];
            diff = diff.max((v - g[i]).abs());
            scale = scale.max(v.abs());
            g[i] = v;
        }
        if !scale.is_finite() || scale > 1e100 {
            return Err(Error::Convergence(format!("iteration diverged after {iter} steps")));
        }
        if diff <= 1e-13 * scale {
            return RadialProfile::new(rho[1..].to_vec(), g[1..].to_vec(), 0.0)?.with_derivatives(gp[1..].to_vec());
        }
        last_diff = diff;
    }
    Err(Error::Convergence(format!(
        "no contraction within {max_iter} iterations (last update {last_diff:.2e}); reduce rho_max"
    )))
}
