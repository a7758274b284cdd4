//! Half-line and H^4 forms of the linearized operators, the rescaled and
//! renormalized operators, and the 2d <-> 4d norm transfer.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{potential_unchecked, tail_coefficient, PotentialKind, Target};
use crate::numerics::{fd, inv_sinh2_minus_inv_r2};
use crate::profile::RadialProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MetricTerm {
    /// 3/(4 sinh^2 r) + 1/4
    HalfLine,
    /// -d_rr - 3 coth r d_r - 2 (acts on functions on H^4)
    HyperbolicFour,
    /// 3/(4 rho^2)
    EuclideanHalfLine,
    /// 3/(4 lambda^2 sinh^2(rho/lambda)) + 1/(4 lambda^2)
    Rescaled(f64),
}

#[derive(Clone)]
pub enum Potential {
    Zero,
    /// V_lambda or U_lambda at parameter lambda, or V_euc.
    Family(PotentialKind, f64),
    /// lambda^{-2} V_lambda(rho / lambda)
    RescaledFamily(f64),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Zero => write!(f, "Zero"),
            Potential::Family(k, l) => write!(f, "Family({k:?}, {l})"),
            Potential::RescaledFamily(l) => write!(f, "RescaledFamily({l})"),
            Potential::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Potential {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Family(k, l) => potential_unchecked(*k, *l, r),
            Potential::RescaledFamily(l) => potential_unchecked(PotentialKind::VLambda, *l, r / l) / (l * l),
            Potential::Custom(f) => f(r),
        }
    }
}

/// `-d_rr + metric(r) + potential(r) + shift` (half-line kinds), or the H^4
/// form `-d_rr - 3 coth r d_r - 2 + potential + shift`.
#[derive(Debug, Clone)]
pub struct OperatorSpec {
    pub metric_term: MetricTerm,
    pub potential: Potential,
    pub shift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    /// L_0 on the half-line.
    Free,
    /// L_{V_lambda}.
    Attractive,
    /// L_{U_lambda}.
    Repulsive,
    /// K = -d_rr + 3/(4 sinh^2 r).
    Comparison,
    /// L_E = -d_rr + 3/(4 rho^2) + V_euc.
    Euclidean,
    /// The rescaled operator in rho = lambda r.
    Rescaled,
    /// H_0 on H^4.
    HyperbolicFree,
    /// H_{V_lambda} on H^4.
    HyperbolicAttractive,
}

impl OperatorKind {
    /// Operator governing perturbations of the family map for this target.
    pub fn for_target(target: Target) -> Self {
        match target {
            Target::Sphere => OperatorKind::Attractive,
            Target::HyperbolicPlane => OperatorKind::Repulsive,
        }
    }
}

/// Builds the operator of `kind` at `lambda`, shifted so that applying it
/// gives `L phi - mu_sq phi`.
pub fn assemble(kind: OperatorKind, lambda: f64, mu_sq: f64) -> Result<OperatorSpec> {
    use OperatorKind::*;
    let needs_lambda = matches!(kind, Attractive | Repulsive | Rescaled | HyperbolicAttractive);
    if needs_lambda {
        let target = if kind == Repulsive { Target::HyperbolicPlane } else { Target::Sphere };
        target.check_lambda(lambda)?;
        if kind == Rescaled && lambda <= 0.0 {
            return Err(Error::Domain("rescaling needs lambda > 0".into()));
        }
    }
    let (metric_term, potential, base) = match kind {
        Free => (MetricTerm::HalfLine, Potential::Zero, 0.0),
        Attractive => (MetricTerm::HalfLine, Potential::Family(PotentialKind::VLambda, lambda), 0.0),
        Repulsive => (MetricTerm::HalfLine, Potential::Family(PotentialKind::ULambda, lambda), 0.0),
        Comparison => (MetricTerm::HalfLine, Potential::Zero, -0.25),
        Euclidean => (MetricTerm::EuclideanHalfLine, Potential::Family(PotentialKind::VEuclidean, 0.0), 0.0),
        Rescaled => (MetricTerm::Rescaled(lambda), Potential::RescaledFamily(lambda), 0.0),
        HyperbolicFree => (MetricTerm::HyperbolicFour, Potential::Zero, 0.0),
        HyperbolicAttractive => (MetricTerm::HyperbolicFour, Potential::Family(PotentialKind::VLambda, lambda), 0.0),
    };
    Ok(OperatorSpec { metric_term, potential, shift: base - mu_sq })
}

impl OperatorSpec {
    pub fn with_potential(metric_term: MetricTerm, potential: Potential) -> Self {
        Self { metric_term, potential, shift: 0.0 }
    }

    /// Same operator with `mu_sq` subtracted.
    pub fn shifted(&self, mu_sq: f64) -> Self {
        Self { shift: self.shift - mu_sq, ..self.clone() }
    }

    /// The unitarily equivalent half-line form (conjugation by sinh^{3/2} r).
    pub fn half_line(&self) -> Self {
        match self.metric_term {
            MetricTerm::HyperbolicFour => Self { metric_term: MetricTerm::HalfLine, ..self.clone() },
            _ => self.clone(),
        }
    }

    fn metric(&self, r: f64) -> f64 {
        match self.metric_term {
            MetricTerm::HalfLine => 0.75 / r.sinh().powi(2) + 0.25,
            MetricTerm::HyperbolicFour => -2.0,
            MetricTerm::EuclideanHalfLine => 0.75 / (r * r),
            MetricTerm::Rescaled(l) => 0.75 / (l * (r / l).sinh()).powi(2) + 0.25 / (l * l),
        }
    }

    /// Zeroth-order coefficient q(r), so that the operator is -d_rr + q
    /// (plus -3 coth r d_r for the H^4 form).
    pub fn q(&self, r: f64) -> f64 {
        self.metric(r) + self.potential.eval(r) + self.shift
    }

    /// lim_{r -> 0} (q(r) - 3/(4 r^2)) for half-line kinds.
    pub fn origin_offset(&self) -> f64 {
        // the -1/4 (or -1/(4 lambda^2)) from the sinh expansion cancels the constant term
        self.potential.eval(0.0) + self.shift
    }

    /// lim_{r -> inf} q(r).
    pub fn q_infinity(&self) -> f64 {
        let base = match self.metric_term {
            MetricTerm::HalfLine => 0.25,
            MetricTerm::HyperbolicFour => -2.0,
            MetricTerm::EuclideanHalfLine => 0.0,
            MetricTerm::Rescaled(l) => 0.25 / (l * l),
        };
        base + self.shift
    }

    /// Coefficient kappa in q(r) - q(inf) ~ kappa e^{-2r} (half-line form).
    pub fn tail_kappa(&self) -> Option<f64> {
        if self.metric_term != MetricTerm::HalfLine {
            return None;
        }
        match &self.potential {
            Potential::Zero => Some(3.0),
            Potential::Family(k, l) if *k != PotentialKind::VEuclidean => Some(tail_coefficient(*k, *l)),
            _ => None,
        }
    }

    /// (L f)(r) for a closure, by Richardson-extrapolated centered differences.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64, r: f64) -> f64 {
        let h = 0.05 * r.min(1.0);
        let d2 = fd::d2_richardson(&f, r, h);
        let mut out = -d2 + self.q(r) * f(r);
        if self.metric_term == MetricTerm::HyperbolicFour {
            out -= 3.0 / r.tanh() * fd::d1_richardson(&f, r, h);
        }
        out
    }

    /// Residual profile `L phi` on the profile's own grid (5-point stencils).
    pub fn apply(&self, phi: &RadialProfile) -> Result<RadialProfile> {
        if phi.len() < 5 {
            return Err(Error::Precondition("need at least five samples".into()));
        }
        let (d1, d2) = fd::derivatives_on_grid(&phi.grid, &phi.values);
        let values = (0..phi.len())
            .map(|i| {
                let r = phi.grid[i];
                let mut v = -d2[i] + self.q(r) * phi.values[i];
                if self.metric_term == MetricTerm::HyperbolicFour {
                    v -= 3.0 / r.tanh() * d1[i];
                }
                v
            })
            .collect();
        RadialProfile::new(phi.grid.clone(), values, phi.origin_order - 2.0)
    }
}

/// The renormalized potential W_{lambda, mu_bar} in rho = lambda r.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenormalizedPotential {
    pub lambda: f64,
    pub mu_bar_sq: f64,
}

impl RenormalizedPotential {
    pub fn new(lambda: f64, mu_bar_sq: f64) -> Result<Self> {
        if lambda <= 0.0 || !(mu_bar_sq > 0.0 && mu_bar_sq <= 0.25) {
            return Err(Error::Domain(format!("need lambda > 0 and mu_bar^2 in (0, 1/4], got ({lambda}, {mu_bar_sq})")));
        }
        Ok(Self { lambda, mu_bar_sq })
    }

    pub fn eval(&self, rho: f64) -> f64 {
        renormalized_potential(self.lambda, self.mu_bar_sq, rho)
    }
}

pub fn renormalized_potential(lambda: f64, mu_bar_sq: f64, rho: f64) -> f64 {
    let l2 = lambda * lambda;
    let x = rho / lambda;
    0.75 / l2 * inv_sinh2_minus_inv_r2(x) + (0.25 - mu_bar_sq) / l2
        + potential_unchecked(PotentialKind::VLambda, lambda, x) / l2
        - potential_unchecked(PotentialKind::VEuclidean, 0.0, rho)
}

/// Squared energy-space norm of (psi_0, psi_1).
pub fn norm_2d_sq(psi0: &RadialProfile, psi1: &RadialProfile) -> f64 {
    let a = psi0.integrate(|r, v, d| {
        let s = r.sinh();
        (d * d + v * v / (s * s)) * s
    });
    a + psi1.integrate(|r, v, _| v * v * r.sinh())
}

/// Squared H^1 x L^2(H^4) norm: int (u_r^2 + v^2) sinh^3 r dr.
pub fn norm_4d_sq(u0: &RadialProfile, u1: &RadialProfile) -> f64 {
    u0.integrate(|r, _, d| d * d * r.sinh().powi(3)) + u1.integrate(|r, v, _| v * v * r.sinh().powi(3))
}

/// (psi, phi) = (sinh r u, sinh r v). Requires psi to vanish at both ends.
pub fn transfer(psi0: &RadialProfile, psi1: &RadialProfile) -> Result<(RadialProfile, RadialProfile)> {
    let scale = psi0.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tail = psi0.values.last().unwrap().abs();
    let (g, v) = (&psi0.grid, &psi0.values);
    // linear extrapolation to r = 0
    let at_origin = if v.len() > 1 { v[0] - g[0] * (v[1] - v[0]) / (g[1] - g[0]) } else { v[0] };
    if scale > 0.0 && (tail >= 1e-6 * scale || at_origin.abs() >= 1e-2 * scale) {
        return Err(Error::Precondition("psi_0 must vanish at 0 and at R_max".into()));
    }
    Ok((divide_by_sinh(psi0), divide_by_sinh(psi1)))
}

fn divide_by_sinh(p: &RadialProfile) -> RadialProfile {
    let d = p.derivative();
    let mut values = Vec::with_capacity(p.len());
    let mut derivs = Vec::with_capacity(p.len());
    for i in 0..p.len() {
        let r = p.grid[i];
        let (s, c) = (r.sinh(), r.cosh());
        values.push(p.values[i] / s);
        derivs.push((d[i] * s - p.values[i] * c) / (s * s));
    }
    RadialProfile {
        grid: p.grid.clone(),
        values,
        derivatives: Some(derivs),
        origin_order: p.origin_order - 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{explicit_solution_value, ExplicitSolutionKind};

    #[test]
    fn comparison_identity() {
        let k = assemble(OperatorKind::Comparison, 0.0, 0.0).unwrap();
        for r in [0.05, 0.3, 1.0, 2.5, 6.0] {
            let f = |x: f64| x.tanh().powf(1.5);
            let lhs = k.apply_fn(f, r);
            let rhs = 15.0 / (4.0 * r.cosh().powi(2)) * f(r);
            assert!((lhs - rhs).abs() < 1e-9, "r = {r}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn zeta0_is_a_zero_mode() {
        let op = assemble(OperatorKind::Attractive, 2.0, 0.0).unwrap();
        for r in [0.01, 0.1, 1.0, 5.0, 15.0] {
            let f = |x: f64| explicit_solution_value(ExplicitSolutionKind::ZeroModeOrigin, 2.0, x).unwrap();
            assert!(op.apply_fn(f, r).abs() < 1e-7);
        }
    }

    #[test]
    fn free_operator_on_leading_power() {
        // residual of r^{3/2} at threshold is (3/(4 sinh^2) - 3/(4 r^2)) r^{3/2} ~ -r^{3/2}/4
        let op = assemble(OperatorKind::Free, 0.0, 0.25).unwrap();
        for r in [1e-3, 1e-2] {
            let res = op.apply_fn(|x: f64| x.powf(1.5), r);
            assert!((res / r.powf(1.5) + 0.25).abs() < 1e-3);
        }
    }

    #[test]
    fn renormalized_potential_vanishes_as_lambda_grows() {
        let w: Vec<f64> = [10.0, 100.0, 1000.0].iter().map(|l| renormalized_potential(*l, 0.25, 1.5).abs()).collect();
        assert!(w[0] > w[1] && w[1] > w[2] && w[2] < 1e-5);
    }
}
