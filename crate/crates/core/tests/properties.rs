use gapwave::geometry::{
    explicit_solution_value, harmonic_residual, nonlinearity_value, potential_value, profile_energy,
    ExplicitSolutionKind, PotentialKind,
};
use gapwave::numerics::fd::d1_richardson;
use gapwave::profile::graded_grid;
use gapwave::weyl::free_spectral_density;
use gapwave::{HarmonicFamily, RadialProfile, Target};
use proptest::prelude::*;
use std::f64::consts::PI;

fn target_and_lambda() -> impl Strategy<Value = (Target, f64)> {
    prop_oneof![
        (0.05..20.0_f64).prop_map(|l| (Target::Sphere, l)),
        (0.05..0.95_f64).prop_map(|l| (Target::HyperbolicPlane, l)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maps_are_bounded_and_monotone((t, l) in target_and_lambda(), r in 1e-3..15.0_f64, dr in 1e-3..1.0_f64) {
        let f = HarmonicFamily::new(t, l).unwrap();
        let (a, b) = (f.value(r), f.value(r + dr));
        prop_assert!(0.0 < a && a <= b && b <= f.endpoint);
    }

    #[test]
    fn maps_solve_the_harmonic_map_equation((t, l) in target_and_lambda(), r in 1e-3..20.0_f64) {
        let f = HarmonicFamily::new(t, l).unwrap();
        prop_assert!(harmonic_residual(&f, r).abs() < 1e-8 * (1.0 + l * l));
    }

    #[test]
    fn potential_signs(l in 0.01..0.99_f64, r in 0.0..30.0_f64) {
        let v = potential_value(PotentialKind::VLambda, l, r).unwrap();
        let u = potential_value(PotentialKind::ULambda, l, r).unwrap();
        prop_assert!(v < 0.0 && v >= -2.0 * l * l);
        prop_assert!(u > 0.0);
    }

    #[test]
    fn nonlinearity_matches_the_remainder((t, l) in target_and_lambda(), r in 0.2..4.0_f64, x in -0.8..0.8_f64) {
        let s = r.sinh();
        let q = HarmonicFamily::new(t, l).unwrap().value(r);
        let d = match t {
            Target::Sphere => (2.0 * q + 2.0 * x).sin() - (2.0 * q).sin() - 2.0 * x * (2.0 * q).cos(),
            Target::HyperbolicPlane => (2.0 * q + 2.0 * x).sinh() - (2.0 * q).sinh() - 2.0 * x * (2.0 * q).cosh(),
        };
        let direct = -d / (2.0 * s.powi(3));
        let (f, g) = nonlinearity_value(t, l, r, x / s).unwrap();
        prop_assert!((f + g - direct).abs() <= 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn zero_mode_wronskian(l in 0.1..30.0_f64, r in 0.05..10.0_f64) {
        let z0 = |x: f64| explicit_solution_value(ExplicitSolutionKind::ZeroModeOrigin, l, x).unwrap();
        let zi = |x: f64| explicit_solution_value(ExplicitSolutionKind::ZeroModeInfinity, l, x).unwrap();
        let h = 0.05 * r.min(1.0);
        let w = z0(r) * d1_richardson(zi, r, h) - d1_richardson(z0, r, h) * zi(r);
        prop_assert!((w + 1.0).abs() < 1e-7, "W = {}", w);
    }

    #[test]
    fn c_function_closed_form(xi in 1e-4..500.0_f64) {
        let c = free_spectral_density(xi).unwrap();
        let closed = PI / 16.0 * xi * (0.25 + xi * xi) * (PI * xi).tanh();
        prop_assert!((c / closed - 1.0).abs() < 1e-10);
        prop_assert!(c <= xi * xi * (1.0 + xi));
    }

    #[test]
    fn energy_inverse_round_trip(psi in 0.0..3.1_f64) {
        prop_assert!((Target::Sphere.big_g_inv(Target::Sphere.big_g(psi)) - psi).abs() < 1e-9);
        let h = Target::HyperbolicPlane;
        prop_assert!((h.big_g_inv(h.big_g(psi)) - psi).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn family_maps_minimize_energy(
        (t, l) in target_and_lambda(),
        a in prop_oneof![-0.3..-0.01_f64, 0.01..0.3_f64],
        c in 0.5..5.0_f64,
        w in 0.3..2.0_f64,
    ) {
        let f = HarmonicFamily::new(t, l).unwrap();
        let grid = graded_grid(1e-4, 1.05, 0.01, 25.0);
        let e_q = profile_energy(t, &f.profile(&grid), None);
        let p = RadialProfile::from_fn(grid, 1.0, |r| f.value(r) + a * r * r / (1.0 + r * r) * (-((r - c) / w).powi(2)).exp()).unwrap();
        prop_assert!(profile_energy(t, &p, None) > e_q);
    }
}
