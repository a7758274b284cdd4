use gapwave::geometry::{explicit_solution_value, ExplicitSolutionKind};
use gapwave::operators::renormalized_potential;
use gapwave::spectral::{
    eigencurve, gap_eigenvalue, jost_solution_decaying, matrix_oracle, oscillation_count, regular_solution,
    renormalized_ratio, resonance_scan, scan_point, threshold_analysis, threshold_jost, wronskian, wronskian_at,
    GapOutcome, OracleConfig, ShootingConfig, LAMBDA_COMPARISON,
};
use gapwave::{assemble, Error, OperatorKind, RadialProfile};

// Extrapolated finite-difference eigenvalues (h, h/2, h/4 with the h^2 log h model).
const MU_SQ_20: f64 = 0.1703835;
const MU_SQ_30: f64 = 0.152_940_384_057_220_77;
const MU_SQ_40: f64 = 0.1421342;
// Transition located by a b(lambda) scan over [1, 4].
const LAMBDA_SUP: f64 = 3.44907;

fn cfg() -> ShootingConfig {
    ShootingConfig::default()
}

fn attractive(lambda: f64) -> gapwave::OperatorSpec {
    assemble(OperatorKind::Attractive, lambda, 0.0).unwrap()
}

fn eigen(lambda: f64) -> gapwave::spectral::SpectralResult {
    match gap_eigenvalue(&attractive(lambda), &cfg()).unwrap() {
        GapOutcome::Eigenvalue(e) => e,
        GapOutcome::NoEigenvalue { .. } => panic!("no eigenvalue at lambda = {lambda}"),
    }
}

#[test]
fn threshold_sign_changes() {
    let (fit, count) = threshold_analysis(&assemble(OperatorKind::Free, 0.0, 0.0).unwrap(), &cfg()).unwrap();
    assert_eq!(count, 0);
    assert!(fit.b_coeff.abs() > 1e-3 && !fit.resonance);
    assert_eq!(oscillation_count(&attractive(1.0), 0.25, &cfg()).unwrap(), 0);
    assert!(oscillation_count(&attractive(30.0), 0.25, &cfg()).unwrap() >= 1);
}

#[test]
fn threshold_fit_residual_is_small() {
    for lambda in [0.5, 1.0, 10.0] {
        let (fit, _) = threshold_analysis(&attractive(lambda), &cfg()).unwrap();
        let scale = fit.a_coeff.abs().max((fit.b_coeff * fit.fit_window.1).abs());
        assert!(fit.fit_residual < 1e-6 * scale);
    }
}

#[test]
fn free_jost_log_derivative() {
    let p = jost_solution_decaying(&assemble(OperatorKind::Free, 0.0, 0.0).unwrap(), 0.2, &cfg()).unwrap();
    let i = p.grid.iter().position(|&r| r >= 20.0).unwrap();
    let d = p.derivatives.as_ref().unwrap()[i] / p.values[i];
    assert!((d + 0.05f64.sqrt()).abs() < 1e-6, "{d}");
}

#[test]
fn wronskian_crosses_zero_at_lambda_30() {
    let op = attractive(30.0);
    assert!(wronskian(&op, MU_SQ_30 - 1e-3, &cfg()).unwrap().signum() != wronskian(&op, MU_SQ_30 + 1e-3, &cfg()).unwrap().signum());
}

#[test]
fn repulsive_wronskian_never_vanishes() {
    let op = assemble(OperatorKind::Repulsive, 0.9, 0.0).unwrap();
    let w: Vec<f64> = (0..=23).map(|i| 0.01 + i as f64 * 0.01).map(|m| wronskian(&op, m, &cfg()).unwrap()).collect();
    assert!(w.iter().all(|x| x.signum() == w[0].signum() && x.abs() > 1e-6), "{w:?}");
}

#[test]
fn wronskian_is_constant() {
    let op = attractive(10.0);
    let radii: Vec<f64> = (0..=14).map(|i| 1.0 + i as f64 * 2.5).collect();
    for mu_sq in [0.05, 0.2, 0.249] {
        let w = wronskian_at(&op, mu_sq, &radii, &cfg()).unwrap();
        let spread = w.iter().map(|x| (x / w[0] - 1.0).abs()).fold(0.0, f64::max);
        assert!(spread < 1e-8, "mu^2 {mu_sq}: {spread}");
    }
}

#[test]
fn no_eigenvalue_below_the_comparison_bound() {
    assert!(matches!(gap_eigenvalue(&attractive(1.0), &cfg()).unwrap(), GapOutcome::NoEigenvalue { .. }));
    for lambda in [0.1, 0.5, 0.9, 0.99] {
        let op = assemble(OperatorKind::Repulsive, lambda, 0.0).unwrap();
        let GapOutcome::NoEigenvalue { threshold, .. } = gap_eigenvalue(&op, &cfg()).unwrap() else {
            panic!("repulsive lambda = {lambda} has an eigenvalue");
        };
        assert!(!threshold.resonance);
    }
}

#[test]
fn shooting_matches_the_oracle() {
    for lambda in [5.0, 10.0] {
        let e = eigen(lambda);
        let o = matrix_oracle(&attractive(lambda), &OracleConfig::for_lambda(lambda)).unwrap();
        assert_eq!(o.eigenvalues.len(), 1);
        assert!((o.eigenvalues[0] - e.mu_sq).abs() < 1e-6, "lambda {lambda}");
    }
    for (lambda, mu_sq) in [(20.0, MU_SQ_20), (30.0, MU_SQ_30), (40.0, MU_SQ_40)] {
        assert!((eigen(lambda).mu_sq - mu_sq).abs() < 1e-6, "lambda {lambda}");
    }
}

#[test]
fn eigen_result_invariants() {
    let e = eigen(30.0);
    assert!(e.mu_sq > 0.0 && e.mu_sq < 0.25);
    assert!(e.wronskian_residual < 1e-8);
    assert_eq!(e.eigenfunction.sign_changes(), 0);
    assert!((e.eigenfunction.l2_norm_sq() - 1.0).abs() < 1e-8);
    let op = attractive(30.0);
    assert_eq!(oscillation_count(&op, e.mu_sq - 0.01, &cfg()).unwrap(), 0);
    assert_eq!(oscillation_count(&op, e.mu_sq + 0.01, &cfg()).unwrap(), 1);
}

#[test]
fn sturm_counts_are_monotone() {
    let op = attractive(30.0);
    let counts: Vec<usize> = (1..=24).map(|i| oscillation_count(&op, i as f64 * 0.01, &cfg()).unwrap()).collect();
    assert!(counts.windows(2).all(|w| w[0] <= w[1]));
    for (i, c) in counts.iter().enumerate() {
        assert_eq!(*c, usize::from((i + 1) as f64 * 0.01 > MU_SQ_30));
    }
}

#[test]
fn eigencurve_migrates_toward_zero() {
    let curve = eigencurve(OperatorKind::Attractive, &[5.0, 10.0, 20.0, 40.0, 80.0], &cfg()).unwrap();
    let mu: Vec<f64> = curve.iter().map(|(_, m)| m.unwrap()).collect();
    assert!(mu.windows(2).all(|w| w[1] < w[0]));
    assert!(mu.iter().all(|&m| m > 0.0 && m < 0.25));
    assert!(mu[4] < 0.5 * mu[0], "{mu:?}");
}

#[test]
fn transition_scan() {
    let s = resonance_scan(OperatorKind::Attractive, 1.0, 4.0, &cfg()).unwrap();
    assert!(s.bracket.1 - s.bracket.0 <= 1e-4);
    assert!(s.lambda_sup_estimate >= LAMBDA_COMPARISON - 1e-4);
    assert!((s.lambda_sup_estimate - LAMBDA_SUP).abs() < 1e-4);
    let (a, b) = s.oscillation_jump.unwrap();
    assert!((0.5 * (a + b) - s.lambda_sup_estimate).abs() < 1e-3 && !s.discrepancy);

    let below = scan_point(OperatorKind::Attractive, LAMBDA_SUP - 1e-3, &cfg()).unwrap();
    let above = scan_point(OperatorKind::Attractive, LAMBDA_SUP + 1e-3, &cfg()).unwrap();
    assert!(below.b_coeff > 0.0 && above.b_coeff < 0.0);
}

#[test]
fn transition_lies_beyond_three() {
    // b(3) is still positive, so [1, 3] holds no crossing
    assert!(matches!(resonance_scan(OperatorKind::Attractive, 1.0, 3.0, &cfg()), Err(Error::Range { .. })));
    assert!(matches!(resonance_scan(OperatorKind::Repulsive, 0.05, 0.99, &cfg()), Err(Error::Range { .. })));
}

fn phi0(rho: f64) -> f64 {
    explicit_solution_value(ExplicitSolutionKind::EuclideanResonance, 0.0, rho).unwrap()
}

fn phi0_log_derivative(rho: f64) -> f64 {
    1.5 / rho - 0.5 * rho / (1.0 + 0.25 * rho * rho)
}

#[test]
fn renormalized_ratio_near_one() {
    let g = renormalized_ratio(1000.0, 0.25, 5.0, 200).unwrap();
    assert!(g.values.iter().all(|v| (v - 1.0).abs() < 0.05));
}

#[test]
fn renormalized_ratio_reproduces_the_regular_solution() {
    let lambda = 20.0;
    let g = renormalized_ratio(lambda, 0.25, 5.0, 200).unwrap();
    let op = assemble(OperatorKind::Rescaled, lambda, 0.0).unwrap();
    let reg = regular_solution(&op, 0.25 / (lambda * lambda), &cfg()).unwrap();
    for (&rho, &v) in reg.grid.iter().zip(&reg.values).filter(|(r, _)| **r > 0.01 && **r < 5.0) {
        let gv = g.value_at(rho).unwrap() * phi0(rho);
        assert!((gv / v - 1.0).abs() < 1e-6, "rho {rho}: {gv} vs {v}");
    }
}

fn node_log_derivative(p: &RadialProfile, i: usize) -> f64 {
    p.derivatives.as_ref().unwrap()[i] / p.values[i]
}

#[test]
fn comparison_chain_at_large_lambda() {
    for lambda in [50.0, 100.0] {
        let g = renormalized_ratio(lambda, 0.25, lambda, 400).unwrap();
        let n = g.len() - 1;
        let gp = g.derivatives.as_ref().unwrap()[n];
        assert!(gp < 0.0, "lambda {lambda}: g'(lambda) = {gp}");
        let psi0 = gp / g.values[n] + phi0_log_derivative(lambda);

        let op = attractive(lambda);
        let inf = threshold_jost(&op, 1.0, &cfg()).unwrap();
        assert!(inf.values.iter().all(|&v| v > 0.0));
        let psi_inf = node_log_derivative(&inf, 0) / lambda;
        let euc = phi0_log_derivative(lambda);
        assert!(psi0 < euc && euc < psi_inf, "lambda {lambda}: {psi0} {euc} {psi_inf}");

        let step1 = inf.integrate(|r, v, _| {
            let rho = lambda * r;
            renormalized_potential(lambda, 0.25, rho) * v * phi0(rho) * lambda
        });
        assert!(step1 < 0.0);
    }
}
