//! Spectral measure of the half-line operators on the continuous spectrum
//! and the free spherical-function baseline.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::ode::{integrate, StepControl};
use crate::numerics::quad::{gauss_kronrod, simpson};
use crate::numerics::special::ln_gamma;
use crate::operators::OperatorSpec;
use crate::profile::RadialProfile;
use crate::spectral::{regular_profile, regular_state, ShootingConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureMethod {
    Perturbed,
    FreeCFunction,
    EuclideanExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasureSample {
    pub xi: f64,
    pub omega: f64,
    pub a_abs_sq: f64,
    pub method: MeasureMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatoryJost {
    pub profile_real: RadialProfile,
    pub profile_imag: RadialProfile,
}

impl OscillatoryJost {
    pub fn modulus_at(&self, r: f64) -> Option<f64> {
        Some(self.profile_real.value_at(r)?.hypot(self.profile_imag.value_at(r)?))
    }

    /// W(psi, conj psi) at grid node `i`.
    pub fn self_wronskian(&self, i: usize) -> Complex64 {
        let (re, im) = (&self.profile_real, &self.profile_imag);
        let (dre, dim) = (re.derivatives.as_ref().unwrap(), im.derivatives.as_ref().unwrap());
        let psi = Complex64::new(re.values[i], im.values[i]);
        let dpsi = Complex64::new(dre[i], dim[i]);
        psi * dpsi.conj() - dpsi * psi.conj()
    }
}

fn check_xi(xi: f64) -> Result<()> {
    if xi > 0.0 && xi.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("xi = {xi} must be positive")))
    }
}

/// |c(xi)|^{-2} for c(xi) = 4 Gamma(i xi) / (sqrt(pi) Gamma(3/2 + i xi)).
pub fn free_spectral_density(xi: f64) -> Result<f64> {
    check_xi(xi)?;
    let ln_c = 4f64.ln() + ln_gamma(Complex64::new(0.0, xi)).re
        - 0.5 * PI.ln()
        - ln_gamma(Complex64::new(1.5, xi)).re;
    Ok((-2.0 * ln_c).exp())
}

/// Plancherel density of the free transform with kernel `spherical_function`.
pub fn free_plancherel_density(xi: f64) -> Result<f64> {
    Ok(4.0 / PI * free_spectral_density(xi)?)
}

/// Normalization of the spherical function: Phi_xi(0) = 1.
pub const SPHERICAL_CONSTANT: f64 = 2.0 / PI;

/// phi_0(r; xi) = C sinh^{3/2} r int_0^pi (cosh r - sinh r cos t)^{-i xi - 3/2} sin^2 t dt.
pub fn spherical_function(xi: f64, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::Domain(format!("r = {r} must be positive")));
    }
    let s = r.sinh();
    let integrand = |t: f64| {
        // cosh r - sinh r cos t = e^{-r} + 2 sinh r sin^2(t/2), free of cancellation
        let a = (-r).exp() + 2.0 * s * (0.5 * t).sin().powi(2);
        a.powf(-1.5) * (xi * a.ln()).cos() * t.sin().powi(2)
    };
    let v = gauss_kronrod(integrand, 0.0, PI, 1e-13 * s.powf(-1.5), 4000)
        .map_err(|_| Error::Oscillatory(r * xi))?;
    Ok(SPHERICAL_CONSTANT * s.powf(1.5) * v)
}

fn check_tail(op: &OperatorSpec, cfg: &ShootingConfig) -> Result<()> {
    let n2 = (op.q(cfg.r_max) - op.q_infinity()).abs();
    if n2 > 1e-12 {
        return Err(Error::Truncation(format!("|N_2(r_max)| = {n2:.2e} > 1e-12")));
    }
    Ok(())
}

fn jost_complex(
    op: &OperatorSpec,
    xi: f64,
    r_to: f64,
    cfg: &ShootingConfig,
    mut observe: impl FnMut(f64, &[f64; 4]),
) -> Result<[f64; 4]> {
    let big_r = cfg.r_max;
    let (s, c) = (xi * big_r).sin_cos();
    let y0 = [c, s, -xi * s, xi * c];
    let e = op.q_infinity() + xi * xi;
    let ctl = StepControl {
        rtol: cfg.integrator_tolerance,
        atol: 1e-300,
        h_init: Some((0.01_f64).min(0.05 / xi)),
        h_max: (0.1 / xi).min(0.25),
        ..Default::default()
    };
    integrate(
        |r, y: &[f64; 4]| {
            let k = op.q(r) - e;
            [y[2], y[3], k * y[0], k * y[1]]
        },
        big_r,
        y0,
        r_to,
        &ctl,
        |r, y, _| observe(r, y),
    )
}

/// psi(r; xi) ~ e^{i r xi}, integrated inward from r_max to `r_to`.
pub fn oscillatory_jost(op: &OperatorSpec, xi: f64, r_to: f64, cfg: &ShootingConfig) -> Result<OscillatoryJost> {
    check_xi(xi)?;
    cfg.validate()?;
    let op = op.half_line();
    check_tail(&op, cfg)?;
    let mut rows: Vec<(f64, [f64; 4])> = Vec::new();
    jost_complex(&op, xi, r_to, cfg, |r, y| rows.push((r, *y)))?;
    rows.reverse();
    let grid: Vec<f64> = rows.iter().map(|x| x.0).collect();
    let col = |k: usize| rows.iter().map(|x| x.1[k]).collect::<Vec<f64>>();
    Ok(OscillatoryJost {
        profile_real: RadialProfile::new(grid.clone(), col(0), -0.5)?.with_derivatives(col(2))?,
        profile_imag: RadialProfile::new(grid, col(1), -0.5)?.with_derivatives(col(3))?,
    })
}

/// a(xi) = 1 / W(psi, phi) with phi the r^{3/2}-normalized regular solution.
pub fn jost_coefficient(op: &OperatorSpec, xi: f64, cfg: &ShootingConfig) -> Result<Complex64> {
    check_xi(xi)?;
    let op = op.half_line();
    check_tail(&op, cfg)?;
    let rm = cfg.match_radius;
    let e = op.q_infinity() + xi * xi;
    let phi = regular_state(&op, e, rm, cfg, (0.1 / xi).min(0.25), None)?;
    let j = jost_complex(&op, xi, rm, cfg, |_, _| {})?;
    let psi = Complex64::new(j[0], j[1]);
    let dpsi = Complex64::new(j[2], j[3]);
    let w = psi * phi[1] - dpsi * phi[0];
    if w.norm() < 1e-12 {
        return Err(Error::NearResonance(w.norm()));
    }
    Ok(1.0 / w)
}

/// omega(xi) = 2 xi^2 |a(xi)|^2.
pub fn spectral_density(op: &OperatorSpec, xi: f64, cfg: &ShootingConfig) -> Result<SpectralMeasureSample> {
    let a = jost_coefficient(op, xi, cfg)?;
    let a_abs_sq = a.norm_sqr();
    Ok(SpectralMeasureSample { xi, omega: 2.0 * xi * xi * a_abs_sq, a_abs_sq, method: MeasureMethod::Perturbed })
}

/// The free density expressed in the same omega normalization: 4 |c|^{-2} = 2 xi^2 |a_free|^2.
pub fn free_sample(xi: f64) -> Result<SpectralMeasureSample> {
    let c = free_spectral_density(xi)?;
    Ok(SpectralMeasureSample { xi, omega: 4.0 * c, a_abs_sq: 2.0 * c / (xi * xi), method: MeasureMethod::FreeCFunction })
}

/// m_E(xi) = (pi/4) xi^2 [i - log(xi^2)/pi].
pub fn euclidean_reference_m(xi: f64) -> Complex64 {
    let z2 = xi * xi;
    PI / 4.0 * z2 * Complex64::new(-z2.ln() / PI, 1.0)
}

/// Regular solution on the continuous spectrum: phi(r; xi) at mu^2 = 1/4 + xi^2.
pub fn regular_solution_xi(op: &OperatorSpec, xi: f64, r_to: f64, cfg: &ShootingConfig) -> Result<RadialProfile> {
    let op = op.half_line();
    regular_profile(&op, op.q_infinity() + xi * xi, r_to, cfg)
}

/// Which generalized Fourier transform a Plancherel check uses.
#[derive(Debug, Clone)]
pub enum Transform {
    /// Regular solutions of the operator, density omega / pi.
    Perturbed(OperatorSpec),
    /// Spherical functions, density (4/pi) |c|^{-2}.
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlancherelReport {
    pub l2_norm_sq: f64,
    pub transform_norm_sq: f64,
    pub relative_gap: f64,
}

/// Compares ||f||^2 with int |f^(xi)|^2 rho(d xi) over `xi_grid`.
pub fn plancherel_check(
    transform: &Transform,
    f: &RadialProfile,
    xi_grid: &[f64],
    cfg: &ShootingConfig,
) -> Result<PlancherelReport> {
    let l2 = simpson(&f.grid, &f.values.iter().map(|v| v * v).collect::<Vec<_>>());
    if l2 == 0.0 {
        return Ok(PlancherelReport { l2_norm_sq: 0.0, transform_norm_sq: 0.0, relative_gap: 0.0 });
    }
    if xi_grid.len() < 3 || xi_grid.iter().any(|x| *x <= 0.0) {
        return Err(Error::Precondition("xi grid needs >= 3 positive points".into()));
    }
    let r_end = f.r_max();
    let density: Vec<f64> = xi_grid
        .par_iter()
        .map(|&xi| -> Result<f64> {
            let (kernel, rho) = match transform {
                Transform::Perturbed(op) => {
                    let phi = regular_solution_xi(op, xi, r_end, cfg)?;
                    (phi.resample(&f.grid, 0.0), spectral_density(op, xi, cfg)?.omega / PI)
                }
                Transform::Free => (
                    f.grid.iter().map(|&r| spherical_function(xi, r)).collect::<Result<Vec<_>>>()?,
                    free_plancherel_density(xi)?,
                ),
            };
            let prod: Vec<f64> = kernel.iter().zip(&f.values).map(|(k, v)| k * v).collect();
            let fhat = simpson(&f.grid, &prod);
            Ok(fhat * fhat * rho)
        })
        .collect::<Result<_>>()?;
    let total = simpson(xi_grid, &density);
    let gap = (total - l2).abs() / l2;
    if gap > 0.2 {
        let step = (xi_grid[xi_grid.len() - 1] - xi_grid[0]) / (xi_grid.len() - 1) as f64;
        return Err(Error::Resolution { gap, suggested_step: 0.5 * step });
    }
    Ok(PlancherelReport { l2_norm_sq: l2, transform_norm_sq: total, relative_gap: gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{assemble, OperatorKind};

    #[test]
    fn c_function_closed_form() {
        for xi in [1e-3, 0.1, 1.0, 7.0, 300.0] {
            let closed = PI / 16.0 * xi * (0.25 + xi * xi) * (PI * xi).tanh();
            let v = free_spectral_density(xi).unwrap();
            assert!((v / closed - 1.0).abs() < 1e-11, "xi = {xi} {}", v / closed - 1.0);
        }
        assert!(free_spectral_density(0.0).is_err());
    }

    #[test]
    fn euclidean_m() {
        assert!((euclidean_reference_m(2.0).im - PI).abs() < 1e-14);
    }

    #[test]
    fn spherical_function_origin_normalization() {
        for xi in [0.0, 0.5, 3.0] {
            let r = 1e-3;
            let v = spherical_function(xi, r).unwrap() / r.powf(1.5);
            assert!((v - 1.0).abs() < 1e-5, "{v}");
        }
    }

    #[test]
    fn free_jost_coefficient_matches_c_function() {
        let op = assemble(OperatorKind::Free, 0.0, 0.0).unwrap();
        let cfg = ShootingConfig { r_max: 20.0, ..Default::default() };
        for xi in [0.1, 1.0, 3.0] {
            let s = spectral_density(&op, xi, &cfg).unwrap();
            let f = free_sample(xi).unwrap();
            assert!((s.omega / f.omega - 1.0).abs() < 1e-8);
        }
    }
}
