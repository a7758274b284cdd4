//! Equivariant harmonic maps H^2 -> S^2 and H^2 -> H^2, their potentials and
//! the explicit ODE solutions used as ground truth elsewhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::RadialProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Sphere,
    HyperbolicPlane,
}

impl Target {
    pub fn check_lambda(self, lambda: f64) -> Result<()> {
        let ok = match self {
            Target::Sphere => lambda >= 0.0 && lambda.is_finite(),
            Target::HyperbolicPlane => (0.0..1.0).contains(&lambda),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("lambda = {lambda} is not admissible for {self:?}")))
        }
    }

    /// The warping function: sin for the sphere, sinh for the hyperbolic plane.
    pub fn g(self, psi: f64) -> f64 {
        match self {
            Target::Sphere => psi.sin(),
            Target::HyperbolicPlane => psi.sinh(),
        }
    }

    /// g(psi) g'(psi) = sin(2 psi)/2 or sinh(2 psi)/2.
    pub fn gg_prime(self, psi: f64) -> f64 {
        match self {
            Target::Sphere => 0.5 * (2.0 * psi).sin(),
            Target::HyperbolicPlane => 0.5 * (2.0 * psi).sinh(),
        }
    }

    /// Antiderivative of g vanishing at 0: 1 - cos or cosh - 1.
    pub fn big_g(self, psi: f64) -> f64 {
        match self {
            Target::Sphere => 2.0 * (0.5 * psi).sin().powi(2),
            Target::HyperbolicPlane => 2.0 * (0.5 * psi).sinh().powi(2),
        }
    }

    /// Inverse of `big_g` on [0, inf); the sphere branch saturates at pi.
    pub fn big_g_inv(self, e: f64) -> f64 {
        match self {
            Target::Sphere => {
                if e >= 2.0 {
                    std::f64::consts::PI
                } else {
                    2.0 * (0.5 * e).sqrt().asin()
                }
            }
            Target::HyperbolicPlane => 2.0 * (0.5 * e).sqrt().asinh(),
        }
    }
}

/// The harmonic map family with parameter lambda and its derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicFamily {
    pub target: Target,
    pub lambda: f64,
    pub endpoint: f64,
    pub energy: f64,
}

impl HarmonicFamily {
    pub fn new(target: Target, lambda: f64) -> Result<Self> {
        target.check_lambda(lambda)?;
        let l2 = lambda * lambda;
        let (endpoint, energy) = match target {
            Target::Sphere => (2.0 * lambda.atan(), 2.0 * l2 / (1.0 + l2)),
            Target::HyperbolicPlane => (2.0 * lambda.atanh(), 2.0 * l2 / (1.0 - l2)),
        };
        Ok(Self { target, lambda, endpoint, energy })
    }

    pub fn value(&self, r: f64) -> f64 {
        let x = self.lambda * (0.5 * r).tanh();
        match self.target {
            Target::Sphere => 2.0 * x.atan(),
            Target::HyperbolicPlane => 2.0 * x.atanh(),
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        let t = (0.5 * r).tanh();
        let l = self.lambda;
        let one_m_t2 = 1.0 / (0.5 * r).cosh().powi(2);
        match self.target {
            Target::Sphere => l * one_m_t2 / (1.0 + l * l * t * t),
            Target::HyperbolicPlane => l * one_m_t2 / (1.0 - l * l * t * t),
        }
    }

    /// The map sampled on `grid`, with exact derivatives attached.
    pub fn profile(&self, grid: &[f64]) -> RadialProfile {
        RadialProfile {
            grid: grid.to_vec(),
            values: grid.iter().map(|&r| self.value(r)).collect(),
            derivatives: Some(grid.iter().map(|&r| self.derivative(r)).collect()),
            origin_order: 1.0,
        }
    }

    /// The linearized potential of the reduced operator around this map.
    pub fn potential(&self) -> PotentialKind {
        match self.target {
            Target::Sphere => PotentialKind::VLambda,
            Target::HyperbolicPlane => PotentialKind::ULambda,
        }
    }
}

/// Residual `psi_rr + coth r psi_r - g g'(psi) / sinh^2 r` of the harmonic map ODE at `r`.
pub fn harmonic_residual(family: &HarmonicFamily, r: f64) -> f64 {
    let h = 0.01 * r.min(1.0);
    let psi_rr = crate::numerics::fd::d1_richardson(|x| family.derivative(x), r, h);
    let s = r.sinh();
    psi_rr + family.derivative(r) / r.tanh() - family.target.gg_prime(family.value(r)) / (s * s)
}

pub fn harmonic_map_value(family: &HarmonicFamily, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::Domain(format!("r = {r} must be positive")));
    }
    family.target.check_lambda(family.lambda)?;
    Ok(family.value(r))
}

pub fn family_energy(family: &HarmonicFamily) -> f64 {
    family.energy
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    VLambda,
    ULambda,
    VEuclidean,
}

/// `V_lambda`, `U_lambda` (argument r) or the Euclidean `V_euc` (argument rho).
pub fn potential_value(kind: PotentialKind, lambda: f64, r: f64) -> Result<f64> {
    match kind {
        PotentialKind::VLambda => Target::Sphere.check_lambda(lambda)?,
        PotentialKind::ULambda => Target::HyperbolicPlane.check_lambda(lambda)?,
        PotentialKind::VEuclidean => {}
    }
    if r < 0.0 {
        return Err(Error::Domain(format!("r = {r} must be nonnegative")));
    }
    Ok(potential_unchecked(kind, lambda, r))
}

/// Potential evaluation without domain checks (hot loops).
pub(crate) fn potential_unchecked(kind: PotentialKind, lambda: f64, r: f64) -> f64 {
    // cosh r - 1 = 2 sinh^2(r/2) keeps the small-r form free of cancellation
    let s2 = (0.5 * r).sinh().powi(2);
    let l2 = lambda * lambda;
    match kind {
        PotentialKind::VLambda => -2.0 * l2 / (1.0 + (1.0 + l2) * s2).powi(2),
        PotentialKind::ULambda => 2.0 * l2 / (1.0 + (1.0 - l2) * s2).powi(2),
        PotentialKind::VEuclidean => -2.0 / (1.0 + 0.25 * r * r).powi(2),
    }
}

/// Coefficient kappa of the e^{-2r} tail of 3/(4 sinh^2 r) + V.
pub(crate) fn tail_coefficient(kind: PotentialKind, lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    match kind {
        PotentialKind::VLambda => 3.0 - 32.0 * l2 / (1.0 + l2).powi(2),
        PotentialKind::ULambda => 3.0 + 32.0 * l2 / (1.0 - l2).powi(2),
        PotentialKind::VEuclidean => 3.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExplicitSolutionKind {
    /// zeta_0: the regular zero-energy solution of the V_lambda half-line operator.
    ZeroModeOrigin,
    /// zeta_inf: the decaying zero-energy solution, W[zeta_0, zeta_inf] = -1.
    ZeroModeInfinity,
    /// phi_0(rho) = rho^{3/2} / (1 + (rho/2)^2).
    EuclideanResonance,
    /// f(r) = tanh^{3/2} r.
    ThresholdComparison,
}

fn zeta0(lambda: f64, r: f64) -> f64 {
    let t = (0.5 * r).tanh();
    t / (1.0 + lambda * lambda * t * t) * r.sinh().sqrt()
}

/// int_r^inf zeta_0^{-2}, in closed form.
fn zeta0_tail_integral(lambda: f64, r: f64) -> f64 {
    let t = (0.5 * r).tanh();
    let eps = if r > 1.0 { 2.0 / (r.exp() + 1.0) } else { 1.0 - t };
    let one_m_t2 = eps * (2.0 - eps);
    let log_t = if t < 0.5 { t.ln() } else { (-eps).ln_1p() };
    let l2 = lambda * lambda;
    one_m_t2 / (2.0 * t * t) - 2.0 * l2 * log_t + 0.5 * l2 * l2 * one_m_t2
}

pub fn explicit_solution_value(kind: ExplicitSolutionKind, lambda: f64, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::Domain(format!("r = {r} must be positive")));
    }
    if matches!(kind, ExplicitSolutionKind::ZeroModeOrigin | ExplicitSolutionKind::ZeroModeInfinity)
        && !(lambda >= 0.0 && lambda.is_finite())
    {
        return Err(Error::Domain(format!("lambda = {lambda} must be nonnegative")));
    }
    Ok(match kind {
        ExplicitSolutionKind::ZeroModeOrigin => zeta0(lambda, r),
        ExplicitSolutionKind::ZeroModeInfinity => zeta0_tail_integral(lambda, r) * zeta0(lambda, r),
        ExplicitSolutionKind::EuclideanResonance => r.powf(1.5) / (1.0 + 0.25 * r * r),
        ExplicitSolutionKind::ThresholdComparison => r.tanh().powf(1.5),
    })
}

/// Amplitude c_lambda of zeta_inf ~ c_lambda e^{-r/2}.
pub fn zeta_inf_amplitude(lambda: f64) -> f64 {
    std::f64::consts::SQRT_2 * (1.0 + lambda * lambda)
}

/// |sinh(r) u| beyond which the nonlinearity refuses to evaluate.
pub const SATURATION_LIMIT: f64 = 50.0;

/// (x - sin x) or (x - sinh x), with series near 0.
fn odd_defect(target: Target, x: f64) -> f64 {
    let sign = match target {
        Target::Sphere => 1.0,
        Target::HyperbolicPlane => -1.0,
    };
    if x.abs() < 1e-2 {
        let x2 = x * x;
        // x - sin x = x^3/6 - x^5/120 + x^7/5040 - ...; sinh flips every sign
        let series = x * x2 * (1.0 / 6.0 + x2 * (-sign / 120.0 + x2 * (1.0 / 5040.0 - sign * x2 / 362_880.0)));
        sign * series
    } else {
        x - match target {
            Target::Sphere => x.sin(),
            Target::HyperbolicPlane => x.sinh(),
        }
    }
}

/// The (F, G) split of the reduced-variable nonlinearity around the family map.
pub fn nonlinearity_value(target: Target, lambda: f64, r: f64, u: f64) -> Result<(f64, f64)> {
    target.check_lambda(lambda)?;
    if r <= 0.0 {
        return Err(Error::Domain(format!("r = {r} must be positive")));
    }
    let s = r.sinh();
    let su = s * u;
    if !su.is_finite() || su.abs() > SATURATION_LIMIT {
        return Err(Error::Saturation { arg: su.abs(), limit: SATURATION_LIMIT });
    }
    let q = HarmonicFamily::new(target, lambda)?.value(r);
    let s3 = s * s * s;
    Ok(match target {
        Target::Sphere => (
            (2.0 * q).sin() * su.sin().powi(2) / s3,
            (2.0 * q).cos() * odd_defect(target, 2.0 * su) / (2.0 * s3),
        ),
        Target::HyperbolicPlane => (
            -(2.0 * q).sinh() * su.sinh().powi(2) / s3,
            (2.0 * q).cosh() * odd_defect(target, 2.0 * su) / (2.0 * s3),
        ),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bogomolnyi {
    pub kinetic: f64,
    pub quadratic_defect: f64,
    pub topological: f64,
}

impl Bogomolnyi {
    pub fn total(&self) -> f64 {
        self.kinetic + self.quadratic_defect + self.topological
    }
}

fn check_origin(psi: &RadialProfile) -> Result<()> {
    let scale = psi.values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    if psi.values[0].abs() > 1e-2 * scale {
        return Err(Error::Precondition("profile must vanish at the origin".into()));
    }
    Ok(())
}

fn kinetic(psi_t: Option<&RadialProfile>) -> f64 {
    psi_t.map_or(0.0, |p| 0.5 * p.integrate(|r, v, _| v * v * r.sinh()))
}

/// Energy split into kinetic part, nonnegative defect and the boundary term.
pub fn bogomolnyi_decomposition(
    target: Target,
    psi: &RadialProfile,
    psi_t: Option<&RadialProfile>,
) -> Result<Bogomolnyi> {
    check_origin(psi)?;
    let end = psi.endpoint()?;
    let quadratic_defect = 0.5
        * psi.integrate(|r, v, d| {
            let s = r.sinh();
            let e = d - target.g(v) / s;
            e * e * s
        });
    Ok(Bogomolnyi {
        kinetic: kinetic(psi_t),
        quadratic_defect,
        topological: target.big_g(end),
    })
}

/// (1/2) int (psi_t^2 + psi_r^2 + g(psi)^2 / sinh^2 r) sinh r dr.
pub fn profile_energy(target: Target, psi: &RadialProfile, psi_t: Option<&RadialProfile>) -> f64 {
    let potential = 0.5
        * psi.integrate(|r, v, d| {
            let s = r.sinh();
            let g = target.g(v);
            (d * d + g * g / (s * s)) * s
        });
    potential + kinetic(psi_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn map_values() {
        let f = HarmonicFamily::new(Target::Sphere, 0.0).unwrap();
        assert_eq!(harmonic_map_value(&f, 5.0).unwrap(), 0.0);
        let f = HarmonicFamily::new(Target::Sphere, 1.0).unwrap();
        assert_relative_eq!(f.endpoint, PI / 2.0, epsilon = 1e-15);
        assert_relative_eq!(f.value(50.0), PI / 2.0, epsilon = 1e-15);
        assert_relative_eq!(f.value(3f64.ln()), 2.0 * 0.5f64.atan(), epsilon = 1e-14);
        assert_relative_eq!(2.0 * 0.5f64.atan(), 0.92730, epsilon = 1e-5);
    }

    #[test]
    fn energies() {
        assert_eq!(HarmonicFamily::new(Target::Sphere, 0.0).unwrap().energy, 0.0);
        assert_relative_eq!(HarmonicFamily::new(Target::Sphere, 1.0).unwrap().energy, 1.0);
        assert_relative_eq!(HarmonicFamily::new(Target::HyperbolicPlane, 0.5).unwrap().energy, 2.0 / 3.0);
        assert!(matches!(HarmonicFamily::new(Target::HyperbolicPlane, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn potential_examples() {
        for lam in [0.3, 1.0, 7.0] {
            assert_relative_eq!(potential_value(PotentialKind::VLambda, lam, 1e-9).unwrap(), -2.0 * lam * lam, max_relative = 1e-12);
        }
        for r in [0.1, 1.0, 4.0, 20.0] {
            assert_relative_eq!(potential_value(PotentialKind::VLambda, 1.0, r).unwrap(), -2.0 / r.cosh().powi(2), max_relative = 1e-13);
        }
        assert_eq!(potential_value(PotentialKind::VEuclidean, 0.0, 0.0).unwrap(), -2.0);
        assert!(potential_value(PotentialKind::ULambda, 1.0, 1.0).is_err());
    }

    #[test]
    fn potentials_match_linearization() {
        for (target, kind, lam) in [(Target::Sphere, PotentialKind::VLambda, 2.5), (Target::HyperbolicPlane, PotentialKind::ULambda, 0.7)] {
            let f = HarmonicFamily::new(target, lam).unwrap();
            for r in [0.05, 0.8, 3.0, 9.0] {
                let q = f.value(r);
                let lin = match target {
                    Target::Sphere => (2.0 * q).cos() - 1.0,
                    Target::HyperbolicPlane => (2.0 * q).cosh() - 1.0,
                } / r.sinh().powi(2);
                assert_relative_eq!(potential_value(kind, lam, r).unwrap(), lin, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn explicit_examples() {
        let v = explicit_solution_value(ExplicitSolutionKind::EuclideanResonance, 0.0, 2.0).unwrap();
        assert_relative_eq!(v, 2f64.sqrt(), epsilon = 1e-15);
        let z = explicit_solution_value(ExplicitSolutionKind::ZeroModeOrigin, 0.0, 1.3).unwrap();
        assert_relative_eq!(z, 0.65f64.tanh() * 1.3f64.sinh().sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn zeta_inf_tail_amplitude() {
        for lam in [0.5, 2.0, 10.0] {
            let r = 30.0;
            let z = explicit_solution_value(ExplicitSolutionKind::ZeroModeInfinity, lam, r).unwrap();
            assert_relative_eq!(z * (0.5 * r).exp(), zeta_inf_amplitude(lam), max_relative = 1e-6);
        }
    }

    #[test]
    fn nonlinearity_zero_and_saturation() {
        assert_eq!(nonlinearity_value(Target::Sphere, 1.0, 1.0, 0.0).unwrap(), (0.0, 0.0));
        assert!(matches!(nonlinearity_value(Target::Sphere, 1.0, 10.0, 1.0), Err(Error::Saturation { .. })));
    }

    #[test]
    fn energy_inverse_g() {
        assert_relative_eq!(Target::Sphere.big_g_inv(1.0), PI / 2.0, epsilon = 1e-14);
        assert_relative_eq!(Target::HyperbolicPlane.big_g_inv(Target::HyperbolicPlane.big_g(1.7)), 1.7, epsilon = 1e-13);
    }
}
