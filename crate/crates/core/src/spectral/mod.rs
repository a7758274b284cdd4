//! Regular and Jost solutions of `L phi = mu^2 phi`, Wronskian bisection for
//! gap eigenvalues, threshold fits and the transition scan in lambda.

mod oracle;
mod renorm;

pub use oracle::{matrix_oracle, OracleConfig, OracleResult};
pub use renorm::{renormalized_ratio, threshold_jost};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::linear_fit;
use crate::numerics::ode::{integrate, StepControl};
use crate::operators::{assemble, MetricTerm, OperatorKind, OperatorSpec};
use crate::profile::RadialProfile;

/// sqrt(15/8): below this lambda the attractive operator has no gap eigenvalue.
pub const LAMBDA_COMPARISON: f64 = 1.369_306_393_762_915_3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingConfig {
    pub r_start: f64,
    pub r_max: f64,
    pub integrator_tolerance: f64,
    pub series_order: usize,
    /// Radius where regular and Jost solutions are matched.
    pub match_radius: f64,
    /// Distance kept from both ends of the gap when bisecting.
    pub bracket_margin: f64,
    /// Resonance flag threshold: |b| < tol_b |a| / r_max.
    pub tol_b: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            r_start: 1e-6,
            r_max: 40.0,
            integrator_tolerance: 1e-10,
            series_order: 2,
            match_radius: 1.0,
            bracket_margin: 1e-4,
            tol_b: 1e-3,
        }
    }
}

impl ShootingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_start > 0.0 && self.r_start < 1e-2) {
            return Err(Error::Config(format!("r_start = {} must lie in (0, 1e-2)", self.r_start)));
        }
        if self.r_max <= 10.0 {
            return Err(Error::Config(format!("r_max = {} must exceed 10", self.r_max)));
        }
        if !(self.integrator_tolerance > 1e-14 && self.integrator_tolerance < 1e-6) {
            return Err(Error::Config(format!(
                "integrator tolerance {} must lie in (1e-14, 1e-6)",
                self.integrator_tolerance
            )));
        }
        if !(self.match_radius > self.r_start && self.match_radius < self.r_max) {
            return Err(Error::Config("match radius must lie inside (r_start, r_max)".into()));
        }
        if !(self.bracket_margin > 0.0 && self.bracket_margin < 0.05) {
            return Err(Error::Config("bracket margin must lie in (0, 0.05)".into()));
        }
        Ok(())
    }

    fn control(&self, h_max: f64) -> StepControl {
        StepControl {
            rtol: self.integrator_tolerance,
            atol: 1e-300,
            h_init: Some(0.05 * self.r_start),
            h_max,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    WronskianBisection,
    OscillationCount,
    MatrixOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub mu_sq: f64,
    pub eigenfunction: RadialProfile,
    pub wronskian_residual: f64,
    pub oscillation_count: usize,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFit {
    pub a_coeff: f64,
    pub b_coeff: f64,
    pub fit_window: (f64, f64),
    pub fit_residual: f64,
    pub resonance: bool,
}

impl ThresholdFit {
    /// True when the tail a + b r has its zero beyond the fit window.
    pub fn zero_beyond_window(&self) -> bool {
        let end = self.a_coeff + self.b_coeff * self.fit_window.1;
        self.b_coeff != 0.0 && end.signum() != self.b_coeff.signum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GapOutcome {
    Eigenvalue(SpectralResult),
    NoEigenvalue { threshold: ThresholdFit, oscillation_count: usize },
}

impl GapOutcome {
    pub fn mu_sq(&self) -> Option<f64> {
        match self {
            GapOutcome::Eigenvalue(r) => Some(r.mu_sq),
            GapOutcome::NoEigenvalue { .. } => None,
        }
    }
}

fn half_line(op: &OperatorSpec) -> Result<OperatorSpec> {
    let h = op.half_line();
    if h.metric_term == MetricTerm::HyperbolicFour {
        return Err(Error::Precondition("operator must be in half-line form".into()));
    }
    Ok(h)
}

/// Samples of an ODE solution: (r, phi, phi').
#[derive(Debug, Clone, Default)]
pub(crate) struct Trace {
    pub r: Vec<f64>,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
}

impl Trace {
    fn push(&mut self, r: f64, y: &[f64; 2]) {
        self.r.push(r);
        self.y.push(y[0]);
        self.dy.push(y[1]);
    }

    fn into_profile(mut self, origin_order: f64) -> Result<RadialProfile> {
        if self.r.len() > 1 && self.r[0] > self.r[1] {
            self.r.reverse();
            self.y.reverse();
            self.dy.reverse();
        }
        RadialProfile::new(self.r, self.y, origin_order)?.with_derivatives(self.dy)
    }
}

/// Integrates the regular solution from r_start to `r_to`.
pub(crate) fn regular_state(
    op: &OperatorSpec,
    mu_sq: f64,
    r_to: f64,
    cfg: &ShootingConfig,
    h_max: f64,
    mut trace: Option<&mut Trace>,
) -> Result<[f64; 2]> {
    let r0 = cfg.r_start;
    let c2 = (op.origin_offset() - mu_sq) / 8.0;
    let y0 = [r0.powf(1.5) * (1.0 + c2 * r0 * r0), r0.sqrt() * (1.5 + 3.5 * c2 * r0 * r0)];
    integrate(
        |r, y: &[f64; 2]| [y[1], (op.q(r) - mu_sq) * y[0]],
        r0,
        y0,
        r_to,
        &cfg.control(h_max),
        |r, y, _| {
            if let Some(t) = trace.as_deref_mut() {
                t.push(r, y);
            }
        },
    )
}

fn oscillatory_h_max(op: &OperatorSpec, mu_sq: f64) -> f64 {
    let k2 = mu_sq - op.q_infinity();
    if k2 > 0.0 {
        (0.1 / k2.sqrt()).min(0.25)
    } else {
        0.25
    }
}

/// The solution ~ r^{3/2} at the origin, integrated to r_max.
pub fn regular_solution(op: &OperatorSpec, mu_sq: f64, cfg: &ShootingConfig) -> Result<RadialProfile> {
    cfg.validate()?;
    let op = half_line(op)?;
    if mu_sq > op.q_infinity() + 1e-15 {
        return Err(Error::Domain(format!("mu^2 = {mu_sq} lies above the threshold (real branch only)")));
    }
    regular_profile(&op, mu_sq, cfg.r_max, cfg)
}

pub(crate) fn regular_profile(op: &OperatorSpec, mu_sq: f64, r_to: f64, cfg: &ShootingConfig) -> Result<RadialProfile> {
    let mut t = Trace::default();
    regular_state(op, mu_sq, r_to, cfg, oscillatory_h_max(op, mu_sq), Some(&mut t))?;
    t.into_profile(1.5)
}

/// Initial data e^{-m r}(1 + c e^{-2r}) at r_max, for m >= 0.
fn jost_initial(op: &OperatorSpec, mu_sq: f64, cfg: &ShootingConfig) -> Result<[f64; 2]> {
    let m2 = op.q_infinity() - mu_sq;
    if m2 < 0.0 {
        return Err(Error::Domain(format!("mu^2 = {mu_sq} is not in the gap")));
    }
    let m = m2.sqrt();
    let big_r = cfg.r_max;
    let kappa = op.tail_kappa();
    let c = kappa.map_or(0.0, |k| k / (4.0 * m + 4.0));
    let correction = c * (-2.0 * big_r).exp();
    let residual_tail = (op.q(big_r) - op.q_infinity()).abs();
    if correction.abs() > 1e-8 || (kappa.is_none() && residual_tail > 1e-8) {
        return Err(Error::Truncation(format!(
            "asymptotic correction {:.2e} at r_max = {big_r}",
            correction.abs().max(residual_tail)
        )));
    }
    let e = (-m * big_r).exp();
    let e2 = (-2.0 * big_r).exp();
    Ok([e * (1.0 + c * e2), e * (-m - c * (m + 2.0) * e2)])
}

pub(crate) fn jost_state(
    op: &OperatorSpec,
    mu_sq: f64,
    r_to: f64,
    cfg: &ShootingConfig,
    mut trace: Option<&mut Trace>,
) -> Result<[f64; 2]> {
    let y0 = jost_initial(op, mu_sq, cfg)?;
    let ctl = StepControl { h_init: Some(0.01), ..cfg.control(0.25) };
    integrate(
        |r, y: &[f64; 2]| [y[1], (op.q(r) - mu_sq) * y[0]],
        cfg.r_max,
        y0,
        r_to,
        &ctl,
        |r, y, _| {
            if let Some(t) = trace.as_deref_mut() {
                t.push(r, y);
            }
        },
    )
}

/// The solution ~ e^{-m r} at infinity, m = sqrt(1/4 - mu^2), integrated inward to r_start.
pub fn jost_solution_decaying(op: &OperatorSpec, mu_sq: f64, cfg: &ShootingConfig) -> Result<RadialProfile> {
    cfg.validate()?;
    let op = half_line(op)?;
    let top = op.q_infinity();
    if !(mu_sq > 0.0 && mu_sq < top) {
        return Err(Error::Domain(format!("mu^2 = {mu_sq} must lie strictly inside (0, {top})")));
    }
    let mut t = Trace::default();
    jost_state(&op, mu_sq, cfg.r_start.max(1e-3), cfg, Some(&mut t))?;
    t.into_profile(-0.5)
}

/// Normalized Wronskian of regular and Jost solutions at the match radius.
pub fn wronskian(op: &OperatorSpec, mu_sq: f64, cfg: &ShootingConfig) -> Result<f64> {
    let op = half_line(op)?;
    let rm = cfg.match_radius;
    let p = regular_state(&op, mu_sq, rm, cfg, 0.25, None)?;
    let j = jost_state(&op, mu_sq, rm, cfg, None)?;
    let w = p[0] * j[1] - p[1] * j[0];
    Ok(w / ((p[0] * j[1]).abs() + (p[1] * j[0]).abs()))
}

/// Unnormalized W[phi_reg, psi_jost](r) at each radius (constant in exact arithmetic).
pub fn wronskian_at(op: &OperatorSpec, mu_sq: f64, radii: &[f64], cfg: &ShootingConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let op = half_line(op)?;
    radii
        .iter()
        .map(|&r| {
            if !(r > cfg.r_start && r < cfg.r_max) {
                return Err(Error::Domain(format!("radius {r} outside ({}, {})", cfg.r_start, cfg.r_max)));
            }
            let p = regular_state(&op, mu_sq, r, cfg, 0.25, None)?;
            let j = jost_state(&op, mu_sq, r, cfg, None)?;
            Ok(p[0] * j[1] - p[1] * j[0])
        })
        .collect()
}

/// Least-squares `a + b r` over [r_max/2, r_max] of a threshold regular solution.
pub fn threshold_fit(profile: &RadialProfile, cfg: &ShootingConfig) -> Result<ThresholdFit> {
    let r_hi = profile.r_max();
    if r_hi < 25.0 {
        return Err(Error::Precondition(format!("threshold fit needs r_max >= 25, got {r_hi}")));
    }
    let r_lo = 0.5 * r_hi;
    let (xs, ys): (Vec<f64>, Vec<f64>) = profile
        .grid
        .iter()
        .zip(&profile.values)
        .filter(|(r, _)| **r >= r_lo)
        .map(|(r, v)| (*r, *v))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::Precondition("too few samples in the fit window".into()));
    }
    let (a, b, res) = linear_fit(&xs, &ys);
    let limit = 1e-6 * a.abs().max((b * r_hi).abs());
    if res >= limit {
        return Err(Error::InconclusiveFit { residual: res, limit });
    }
    Ok(ThresholdFit {
        a_coeff: a,
        b_coeff: b,
        fit_window: (r_lo, r_hi),
        fit_residual: res,
        resonance: b.abs() < cfg.tol_b * a.abs() / r_hi,
    })
}

/// Threshold fit with automatic doubling of r_max until the residual criterion passes.
pub fn threshold_analysis(op: &OperatorSpec, cfg: &ShootingConfig) -> Result<(ThresholdFit, usize)> {
    let op = half_line(op)?;
    let mut c = *cfg;
    c.r_max = c.r_max.max(25.0);
    for _ in 0..4 {
        let p = regular_profile(&op, op.q_infinity(), c.r_max, &c)?;
        match threshold_fit(&p, &c) {
            Ok(fit) => {
                let count = p.sign_changes() + usize::from(fit.zero_beyond_window());
                return Ok((fit, count));
            }
            Err(Error::InconclusiveFit { .. }) => c.r_max *= 2.0,
            Err(e) => return Err(e),
        }
    }
    Err(Error::InconclusiveFit { residual: f64::NAN, limit: f64::NAN })
}

/// Number of sign changes of the regular solution on (r_start, r_max).
pub fn oscillation_count(op: &OperatorSpec, mu_sq: f64, cfg: &ShootingConfig) -> Result<usize> {
    Ok(regular_solution(op, mu_sq, cfg)?.sign_changes())
}

/// Eigenfunction glued from regular and Jost pieces, unit L^2 norm, positive.
fn eigenfunction(op: &OperatorSpec, mu_sq: f64, cfg: &ShootingConfig) -> Result<RadialProfile> {
    let rm = cfg.match_radius;
    let mut left = Trace::default();
    let p = regular_state(op, mu_sq, rm, cfg, 0.25, Some(&mut left))?;
    let mut right = Trace::default();
    let j = jost_state(op, mu_sq, rm, cfg, Some(&mut right))?;
    let scale = p[0] / j[0];
    let mut t = left;
    for i in (0..right.r.len()).rev().skip(1) {
        t.r.push(right.r[i]);
        t.y.push(scale * right.y[i]);
        t.dy.push(scale * right.dy[i]);
    }
    let mut prof = t.into_profile(1.5)?;
    let norm = prof.l2_norm_sq().sqrt();
    let sign = if prof.values.iter().cloned().fold(0.0, |a: f64, b| if b.abs() > a.abs() { b } else { a }) < 0.0 {
        -1.0
    } else {
        1.0
    };
    prof.scale(sign / norm);
    Ok(prof)
}

/// The gap eigenvalue of `op` in (0, 1/4), if any.
pub fn gap_eigenvalue(op: &OperatorSpec, cfg: &ShootingConfig) -> Result<GapOutcome> {
    cfg.validate()?;
    let op = half_line(op)?;
    let top = op.q_infinity();
    let lo = cfg.bracket_margin;
    let hi = top - cfg.bracket_margin;
    let n_hi = regular_profile(&op, hi, cfg.r_max, cfg)?.sign_changes();
    if n_hi == 0 {
        let (threshold, _) = threshold_analysis(&op, cfg)?;
        return Ok(GapOutcome::NoEigenvalue { threshold, oscillation_count: 0 });
    }
    if n_hi > 1 {
        return Err(Error::Multiplicity(format!("{n_hi} sign changes at mu^2 = {hi}")));
    }
    let n_lo = regular_profile(&op, lo, cfg.r_max, cfg)?.sign_changes();
    if n_lo != 0 {
        return Err(Error::Multiplicity(format!("{n_lo} sign changes already at mu^2 = {lo}")));
    }
    let (mut a, mut b) = (lo, hi);
    let wa = wronskian(&op, a, cfg)?;
    let wb = wronskian(&op, b, cfg)?;
    if wa.signum() == wb.signum() {
        return Err(Error::Bracketing { lo, hi });
    }
    let sa = wa.signum();
    while b - a > 1e-15 * b.max(1e-3) {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if wronskian(&op, m, cfg)?.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    let wa = wronskian(&op, a, cfg)?;
    let wb = wronskian(&op, b, cfg)?;
    let (mu_sq, residual) = if wa.abs() <= wb.abs() { (a, wa.abs()) } else { (b, wb.abs()) };
    let eigenfunction = eigenfunction(&op, mu_sq, cfg)?;
    Ok(GapOutcome::Eigenvalue(SpectralResult {
        mu_sq,
        oscillation_count: eigenfunction.sign_changes(),
        eigenfunction,
        wronskian_residual: residual,
        method: Method::WronskianBisection,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub lambda: f64,
    pub a_coeff: f64,
    pub b_coeff: f64,
    pub oscillation_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceScan {
    pub points: Vec<ScanPoint>,
    pub lambda_sup_estimate: f64,
    pub bracket: (f64, f64),
    /// Where the threshold oscillation count jumps 0 -> 1, bracketed separately.
    pub oscillation_jump: Option<(f64, f64)>,
    /// Set when the two transition indicators disagree by more than 1e-3.
    pub discrepancy: bool,
}

/// Threshold data (a, b, count) at one lambda.
pub fn scan_point(kind: OperatorKind, lambda: f64, cfg: &ShootingConfig) -> Result<ScanPoint> {
    let op = assemble(kind, lambda, 0.0)?;
    let (fit, count) = threshold_analysis(&op, cfg)?;
    Ok(ScanPoint { lambda, a_coeff: fit.a_coeff, b_coeff: fit.b_coeff, oscillation_count: count })
}

fn bisect_lambda(
    mut lo: f64,
    mut hi: f64,
    width: f64,
    mut side: impl FnMut(f64) -> Result<bool>,
) -> Result<(f64, f64)> {
    while hi - lo > width {
        let m = 0.5 * (lo + hi);
        if side(m)? {
            hi = m;
        } else {
            lo = m;
        }
    }
    Ok((lo, hi))
}

/// Scans [lambda_lo, lambda_hi] for the first zero of the threshold coefficient b(lambda).
pub fn resonance_scan(kind: OperatorKind, lambda_lo: f64, lambda_hi: f64, cfg: &ShootingConfig) -> Result<ResonanceScan> {
    cfg.validate()?;
    if !(lambda_lo < lambda_hi) {
        return Err(Error::Domain(format!("empty range [{lambda_lo}, {lambda_hi}]")));
    }
    let n = ((lambda_hi - lambda_lo) / 0.05).ceil().max(4.0) as usize;
    let lambdas: Vec<f64> = (0..=n).map(|i| lambda_lo + (lambda_hi - lambda_lo) * i as f64 / n as f64).collect();
    let points: Vec<ScanPoint> = lambdas
        .par_iter()
        .map(|&l| scan_point(kind, l, cfg))
        .collect::<Result<_>>()?;

    let b0 = points[0].b_coeff.signum();
    let Some(k) = points.iter().position(|p| p.b_coeff.signum() != b0) else {
        return Err(Error::Range { lo: lambda_lo, hi: lambda_hi });
    };
    let bracket = bisect_lambda(points[k - 1].lambda, points[k].lambda, 1e-4, |l| {
        Ok(scan_point(kind, l, cfg)?.b_coeff.signum() != b0)
    })?;
    let lambda_sup_estimate = 0.5 * (bracket.0 + bracket.1);
    if kind == OperatorKind::Attractive && lambda_sup_estimate < LAMBDA_COMPARISON - 1e-4 {
        return Err(Error::Contradiction(format!(
            "transition at {lambda_sup_estimate} lies below sqrt(15/8)"
        )));
    }

    let c0 = points[0].oscillation_count;
    let oscillation_jump = match points.iter().position(|p| p.oscillation_count != c0) {
        Some(j) => Some(bisect_lambda(points[j - 1].lambda, points[j].lambda, 1e-4, |l| {
            Ok(scan_point(kind, l, cfg)?.oscillation_count != c0)
        })?),
        None => None,
    };
    let discrepancy = oscillation_jump.map_or(true, |(a, b)| (0.5 * (a + b) - lambda_sup_estimate).abs() > 1e-3);
    Ok(ResonanceScan { points, lambda_sup_estimate, bracket, oscillation_jump, discrepancy })
}

/// Gap eigenvalue of the operator of `kind` for each lambda (order preserved).
pub fn eigencurve(kind: OperatorKind, lambdas: &[f64], cfg: &ShootingConfig) -> Result<Vec<(f64, Option<f64>)>> {
    lambdas
        .par_iter()
        .map(|&l| {
            let op = assemble(kind, l, 0.0)?;
            Ok((l, gap_eigenvalue(&op, cfg)?.mu_sq()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let mut c = ShootingConfig::default();
        assert!(c.validate().is_ok());
        c.r_start = 0.1;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn free_jost_decay_rate() {
        let op = assemble(OperatorKind::Free, 0.0, 0.0).unwrap();
        let j = jost_solution_decaying(&op, 0.2, &ShootingConfig::default()).unwrap();
        let i = j.grid.partition_point(|&r| r < 20.0);
        let d = j.derivatives.as_ref().unwrap()[i];
        let v = j.values[i];
        assert!((d / v + 0.05f64.sqrt()).abs() < 1e-6, "{}", d / v);
    }

    #[test]
    fn exact_linear_threshold_fit() {
        let g: Vec<f64> = (1..=300).map(|i| i as f64 * 0.1).collect();
        let p = RadialProfile::from_fn(g, 1.0, |r| 2.0 - 3.0 * r).unwrap();
        let f = threshold_fit(&p, &ShootingConfig::default()).unwrap();
        assert!((f.a_coeff - 2.0).abs() < 1e-12 && (f.b_coeff + 3.0).abs() < 1e-12);
    }
}
