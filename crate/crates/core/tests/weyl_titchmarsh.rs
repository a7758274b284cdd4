use std::f64::consts::PI;
use std::sync::Arc;

use approx::assert_relative_eq;
use gapwave::numerics::{log_grid, loglog_slope};
use gapwave::operators::{MetricTerm, OperatorSpec, Potential};
use gapwave::spectral::{regular_solution, ShootingConfig};
use gapwave::weyl::{
    euclidean_reference_m, free_plancherel_density, free_spectral_density, oscillatory_jost, plancherel_check,
    regular_solution_xi, spectral_density, spherical_function, Transform,
};
use gapwave::{assemble, Error, OperatorKind, RadialProfile};

// b(lambda) changes sign here; the threshold is resonant
const LAMBDA_SUP: f64 = 3.44907;

fn cfg() -> ShootingConfig {
    ShootingConfig { r_max: 20.0, ..Default::default() }
}

fn omega(op: &OperatorSpec, xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|&x| spectral_density(op, x, &cfg()).unwrap().omega).collect()
}

#[test]
fn free_density_slopes() {
    let small = log_grid(1e-3, 1e-2, 16);
    let large = log_grid(1e2, 1e3, 16);
    let c = |xs: &[f64]| xs.iter().map(|&x| free_spectral_density(x).unwrap()).collect::<Vec<_>>();
    let (cs, cl) = (c(&small), c(&large));
    assert!((loglog_slope(&small, &cs) - 2.0).abs() < 0.05);
    assert!((loglog_slope(&large, &cl) - 3.0).abs() < 0.05);
    assert!(cs.iter().chain(&cl).all(|&v| v > 0.0));
    for &x in small.iter().chain(&large) {
        assert!(free_spectral_density(x).unwrap() <= x * x * (1.0 + x));
    }
    assert!(matches!(free_spectral_density(0.0), Err(Error::Domain(_))));
}

#[test]
fn spherical_function_is_an_eigenfunction() {
    for xi in [0.3, 1.0, 3.0] {
        let op = assemble(OperatorKind::Free, 0.0, 0.25 + xi * xi).unwrap();
        for i in 0..=10 {
            let r = 0.1 + 0.49 * i as f64;
            let res = op.apply_fn(|x| spherical_function(xi, x).unwrap(), r);
            assert!(res.abs() < 1e-6, "xi {xi}, r {r}: {res}");
        }
    }
}

#[test]
fn spherical_function_near_the_origin() {
    for xi in [0.5, 2.0] {
        let q: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|&r: &f64| spherical_function(xi, r).unwrap() / r.powf(1.5)).collect();
        assert!((q[2] - q[1]).abs() < 0.1 * (q[1] - q[0]).abs() + 1e-12);
        assert_relative_eq!(q[2], 1.0, epsilon = 1e-6);
    }
    let ratio: Vec<f64> = (0..=20)
        .map(|i| 0.1 + i as f64 * 0.495)
        .map(|r| spherical_function(0.0, r).unwrap() / (1.0 + r))
        .collect();
    assert!(ratio.iter().all(|&q| q > 0.0 && q < 2.0), "{ratio:?}");
}

#[test]
fn free_local_energy_weight_is_bounded() {
    let mut sup = 0.0_f64;
    for xi in log_grid(1e-2, 30.0, 8) {
        let w = (xi * xi + 0.25).sqrt() / xi * free_plancherel_density(xi).unwrap();
        for r in log_grid(0.05, 10.0, 8) {
            let p = spherical_function(xi, r).unwrap();
            sup = sup.max(p * p / (1.0 + r).powi(2) * w);
        }
    }
    assert!(sup.is_finite() && sup < 10.0, "{sup}");
}

#[test]
fn pure_oscillation_is_exact() {
    let op = OperatorSpec::with_potential(MetricTerm::EuclideanHalfLine, Potential::Custom(Arc::new(|r| -0.75 / (r * r))));
    let xi = 1.7;
    let j = oscillatory_jost(&op, xi, 0.5, &cfg()).unwrap();
    for (i, &r) in j.profile_real.grid.iter().enumerate() {
        assert!((j.profile_real.values[i] - (r * xi).cos()).abs() < 1e-8);
        assert!((j.profile_imag.values[i] - (r * xi).sin()).abs() < 1e-8);
    }
}

#[test]
fn perturbed_jost_modulus_and_wronskian() {
    let op = assemble(OperatorKind::Attractive, 1.0, 0.0).unwrap();
    let c = ShootingConfig { r_max: 40.0, ..Default::default() };
    let j = oscillatory_jost(&op, 1.0, 0.2, &c).unwrap();
    for k in 0..=50 {
        let m = j.modulus_at(15.0 + k as f64 * 0.5).unwrap();
        assert!((0.99..=1.01).contains(&m), "{m}");
    }
    for i in (0..j.profile_real.len()).step_by(7) {
        let w = j.self_wronskian(i);
        assert!(w.re.abs() < 1e-8 && (w.im / -2.0 - 1.0).abs() < 1e-8, "{w}");
    }
    let short = ShootingConfig { r_max: 12.0, ..Default::default() };
    assert!(matches!(oscillatory_jost(&op, 1.0, 0.2, &short), Err(Error::Truncation(_))));
}

#[test]
fn measure_slopes() {
    let small = log_grid(1e-3, 1e-2, 16);
    let large = log_grid(30.0, 300.0, 16);
    for (kind, lambda) in [(OperatorKind::Attractive, 1.0), (OperatorKind::Repulsive, 0.7)] {
        let op = assemble(kind, lambda, 0.0).unwrap();
        let (a, b) = (omega(&op, &small), omega(&op, &large));
        assert!(a.iter().chain(&b).all(|&w| w > 0.0));
        assert!((loglog_slope(&small, &a) - 2.0).abs() < 0.1, "{kind:?}");
        assert!((loglog_slope(&large, &b) - 3.0).abs() < 0.1, "{kind:?}");
    }
}

#[test]
fn euclidean_reference() {
    assert_relative_eq!(euclidean_reference_m(2.0).im, PI, epsilon = 1e-14);
    let xi = 3.0;
    assert_relative_eq!(2.0 * xi * euclidean_reference_m(xi).im, PI / 2.0 * xi.powi(3), max_relative = 1e-14);

    let op = assemble(OperatorKind::Attractive, 1.0, 0.0).unwrap();
    let ratios: Vec<f64> = log_grid(50.0, 500.0, 4)
        .iter()
        .map(|&x| spectral_density(&op, x, &cfg()).unwrap().omega / (2.0 * x * euclidean_reference_m(x).im))
        .collect();
    assert!(ratios.iter().all(|&q| (0.5..=2.0).contains(&q)), "{ratios:?}");
    let spread = ratios.iter().fold(0.0_f64, |m, q| m.max((q / ratios[0] - 1.0).abs()));
    assert!(spread < 1e-2);
}

#[test]
fn regular_solution_is_stable_as_xi_vanishes() {
    let op = assemble(OperatorKind::Attractive, 1.0, 0.0).unwrap();
    let base = regular_solution(&op, 0.25, &ShootingConfig::default()).unwrap();
    let mut prev = f64::INFINITY;
    for xi in [1e-1_f64, 1e-2, 1e-3] {
        let reach = xi.powf(-1.0 / 3.0);
        let p = regular_solution_xi(&op, xi, reach, &cfg()).unwrap();
        let dev = p
            .grid
            .iter()
            .zip(&p.values)
            .map(|(&r, &v)| (v - base.value_at(r).unwrap()).abs() / (1.0 + r))
            .fold(0.0, f64::max);
        assert!(dev < 0.2 * prev, "xi {xi}: {dev}");
        prev = dev;
    }
}

#[test]
fn near_resonance_steepens_the_small_xi_density() {
    let op = assemble(OperatorKind::Attractive, LAMBDA_SUP, 0.0).unwrap();
    let small = log_grid(1e-3, 1e-2, 16);
    let a: Vec<f64> = small.iter().map(|&x| spectral_density(&op, x, &cfg()).unwrap().a_abs_sq).collect();
    assert!(a.windows(2).all(|w| w[1] < w[0]));
    let slope = loglog_slope(&small, &omega(&op, &small));
    assert!(slope < 1.9, "{slope}");
}

#[test]
fn plancherel_identities() {
    let grid: Vec<f64> = (1..=300).map(|i| i as f64 * 0.02).collect();
    let f = RadialProfile::from_fn(grid.clone(), 0.0, |r| (-(r - 3.0_f64).powi(2) / 0.5).exp()).unwrap();
    let xi: Vec<f64> = (0..=240).map(|i| 0.005 + i as f64 * 0.05).collect();
    let v = Transform::Perturbed(assemble(OperatorKind::Attractive, 1.0, 0.0).unwrap());
    for t in [&v, &Transform::Free] {
        let rep = plancherel_check(t, &f, &xi, &cfg()).unwrap();
        assert!(rep.relative_gap < 0.05);
        assert_relative_eq!(rep.l2_norm_sq, (PI / 2.0).sqrt() * 0.5f64.sqrt(), max_relative = 1e-6);
    }
    let zero = RadialProfile::from_fn(grid, 0.0, |_| 0.0).unwrap();
    let rep = plancherel_check(&v, &zero, &xi, &cfg()).unwrap();
    assert_eq!((rep.l2_norm_sq, rep.transform_norm_sq, rep.relative_gap), (0.0, 0.0, 0.0));
    let coarse = [0.5, 1.0, 1.5];
    assert!(matches!(plancherel_check(&v, &f, &coarse, &cfg()), Err(Error::Resolution { .. })));
}
