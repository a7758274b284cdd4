use approx::assert_relative_eq;
use gapwave::geometry::{
    bogomolnyi_decomposition, explicit_solution_value, family_energy, harmonic_map_value, harmonic_residual,
    nonlinearity_value, potential_value, profile_energy, ExplicitSolutionKind, PotentialKind,
};
use gapwave::numerics::fd::d1_richardson;
use gapwave::profile::graded_grid;
use gapwave::{Error, HarmonicFamily, RadialProfile, Target};
use std::f64::consts::{FRAC_PI_2, PI};

fn fam(t: Target, l: f64) -> HarmonicFamily {
    HarmonicFamily::new(t, l).unwrap()
}

#[test]
fn map_values() {
    assert_eq!(harmonic_map_value(&fam(Target::Sphere, 0.0), 5.0).unwrap(), 0.0);
    assert_relative_eq!(fam(Target::Sphere, 1.0).value(60.0), FRAC_PI_2, epsilon = 1e-14);
    assert_relative_eq!(fam(Target::Sphere, 1.0).value(3f64.ln()), 2.0 * 0.5f64.atan(), epsilon = 1e-14);
    assert_relative_eq!(2.0 * 0.5f64.atan(), 0.92730, epsilon = 1e-5);
    assert!(matches!(HarmonicFamily::new(Target::HyperbolicPlane, 1.0), Err(Error::Domain(_))));
}

#[test]
fn maps_are_monotone_and_below_endpoint() {
    for f in [fam(Target::Sphere, 3.0), fam(Target::HyperbolicPlane, 0.95)] {
        let mut prev = 0.0;
        for i in 1..400 {
            let r = i as f64 * 0.1;
            let v = f.value(r);
            assert!(v >= prev && v <= f.endpoint);
            // tanh(r/2) rounds to 1 beyond r ~ 37
            assert!(r > 20.0 || v < f.endpoint);
            prev = v;
        }
    }
}

#[test]
fn energies() {
    assert_eq!(family_energy(&fam(Target::Sphere, 0.0)), 0.0);
    assert_relative_eq!(family_energy(&fam(Target::Sphere, 1.0)), 1.0, epsilon = 1e-15);
    assert_relative_eq!(family_energy(&fam(Target::HyperbolicPlane, 0.5)), 2.0 / 3.0, epsilon = 1e-15);
}

#[test]
fn sphere_energy_increases_to_two() {
    let mut prev = 0.0;
    for l in [0.5, 1.0, 2.0, 10.0, 100.0, 1e4] {
        let e = family_energy(&fam(Target::Sphere, l));
        assert!(e > prev && e < 2.0);
        prev = e;
    }
    assert!(2.0 - prev < 1e-7);
}

#[test]
fn residual_and_quadrature_energy() {
    let grid = graded_grid(1e-4, 1.05, 0.01, 30.0);
    for (t, l) in [(Target::Sphere, 0.25), (Target::Sphere, 4.0), (Target::HyperbolicPlane, 0.9)] {
        let f = fam(t, l);
        for r in [1e-3, 0.01, 0.5, 2.0, 20.0] {
            assert!(harmonic_residual(&f, r).abs() < 1e-8);
        }
        assert_relative_eq!(profile_energy(t, &f.profile(&grid), None), f.energy, epsilon = 1e-6);
    }
}

#[test]
fn potential_examples() {
    for l in [0.3, 1.0, 7.0] {
        assert_relative_eq!(potential_value(PotentialKind::VLambda, l, 1e-9).unwrap(), -2.0 * l * l, max_relative = 1e-12);
    }
    for r in [0.1, 1.0, 4.0, 12.0] {
        let v = potential_value(PotentialKind::VLambda, 1.0, r).unwrap();
        assert_relative_eq!(v, -2.0 / r.cosh().powi(2), max_relative = 1e-12);
    }
    assert_eq!(potential_value(PotentialKind::VEuclidean, 0.0, 0.0).unwrap(), -2.0);
}

#[test]
fn explicit_solutions() {
    let e = explicit_solution_value(ExplicitSolutionKind::EuclideanResonance, 0.0, 2.0).unwrap();
    assert_relative_eq!(e, 2f64.sqrt(), epsilon = 1e-14);
    for r in [0.2, 1.0, 3.0] {
        let z = explicit_solution_value(ExplicitSolutionKind::ZeroModeOrigin, 0.0, r).unwrap();
        assert_relative_eq!(z, (r / 2.0).tanh() * r.sinh().sqrt(), max_relative = 1e-14);
    }
    let z0 = |r: f64| explicit_solution_value(ExplicitSolutionKind::ZeroModeOrigin, 2.0, r).unwrap();
    let zi = |r: f64| explicit_solution_value(ExplicitSolutionKind::ZeroModeInfinity, 2.0, r).unwrap();
    for r in [0.05_f64, 0.5, 1.0, 4.0, 10.0] {
        let h = 0.05 * r.min(1.0);
        let w = z0(r) * d1_richardson(zi, r, h) - d1_richardson(z0, r, h) * zi(r);
        assert!((w + 1.0).abs() < 1e-8, "r = {r}: W = {w}");
    }
}

// psi = Q + sinh(r) u in the wave-map equation, minus its linear part.
fn direct_remainder(t: Target, l: f64, r: f64, u: f64) -> f64 {
    let q = fam(t, l).value(r);
    let s = r.sinh();
    let x = s * u;
    let d = match t {
        Target::Sphere => (2.0 * q + 2.0 * x).sin() - (2.0 * q).sin() - 2.0 * x * (2.0 * q).cos(),
        Target::HyperbolicPlane => (2.0 * q + 2.0 * x).sinh() - (2.0 * q).sinh() - 2.0 * x * (2.0 * q).cosh(),
    };
    -d / (2.0 * s.powi(3))
}

#[test]
fn nonlinearity_is_the_full_remainder() {
    for (t, l) in [(Target::Sphere, 0.7), (Target::Sphere, 3.0), (Target::HyperbolicPlane, 0.5)] {
        for r in [0.3, 1.0, 2.5] {
            for x in [0.05, -0.2, 0.6] {
                let u = x / f64::sinh(r);
                let (f, g) = nonlinearity_value(t, l, r, u).unwrap();
                let direct = direct_remainder(t, l, r, u);
                assert!((f + g - direct).abs() < 1e-10 * direct.abs().max(1.0), "{t:?} {l} {r} {u}");
            }
        }
    }
    assert_eq!(nonlinearity_value(Target::Sphere, 1.0, 1.0, 0.0).unwrap(), (0.0, 0.0));
}

#[test]
fn cubic_part_bound() {
    let f = fam(Target::HyperbolicPlane, 0.5);
    // G ~ -(2/3) cosh(2P) u^3 for small sinh(r) u
    let k = 2.0 / 3.0 * (2.0 * f.endpoint).cosh() * 1.01;
    let u = 1e-3;
    let (_, g) = nonlinearity_value(Target::HyperbolicPlane, 0.5, 2.0, u).unwrap();
    assert!(g.abs() <= k * 1e-9, "{g}");
    assert!(matches!(nonlinearity_value(Target::Sphere, 1.0, 20.0, 1.0), Err(Error::Saturation { .. })));
}

#[test]
fn bogomolnyi_split() {
    let grid = graded_grid(1e-4, 1.05, 0.01, 20.0);
    let f = fam(Target::Sphere, 1.0);
    let b = bogomolnyi_decomposition(Target::Sphere, &f.profile(&grid), None).unwrap();
    assert!(b.quadratic_defect <= 1e-8);
    assert_relative_eq!(b.topological, 1.0, epsilon = 1e-6);

    let zero = RadialProfile::from_fn(grid.clone(), 1.0, |_| 0.0).unwrap();
    let b = bogomolnyi_decomposition(Target::Sphere, &zero, None).unwrap();
    assert_eq!((b.kinetic, b.quadratic_defect, b.topological), (0.0, 0.0, 0.0));

    let bumped = RadialProfile::from_fn(grid, 1.0, |r| f.value(r) + 0.1 * r * r / (1.0 + r * r) * (-(r - 2.0_f64).powi(2)).exp()).unwrap();
    let b = bogomolnyi_decomposition(Target::Sphere, &bumped, None).unwrap();
    assert!(b.quadratic_defect > 0.0);
    assert!(profile_energy(Target::Sphere, &bumped, None) > 1.0);
}

#[test]
fn l_infinity_inverse_at_the_endpoint() {
    // G(pi/2) = 1 = E(Q_1) for the sphere
    assert_relative_eq!(Target::Sphere.big_g_inv(1.0), FRAC_PI_2, epsilon = 1e-12);
    assert!(Target::Sphere.big_g_inv(2.0) <= PI);
}
