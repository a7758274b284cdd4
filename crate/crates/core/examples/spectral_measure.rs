//! omega(xi) for L_V and L_U against the free density: xi^2 at small xi,
//! xi^3 at large xi.

use gapwave::numerics::{log_grid, loglog_slope};
use gapwave::spectral::ShootingConfig;
use gapwave::weyl::{euclidean_reference_m, free_sample, spectral_density};
use gapwave::{assemble, OperatorKind};

fn main() -> gapwave::Result<()> {
    let cfg = ShootingConfig { r_max: 20.0, ..Default::default() };
    let small = log_grid(1e-3, 1e-2, 16);
    let large = log_grid(30.0, 300.0, 16);
    for (name, kind, lambda) in [("V_1", OperatorKind::Attractive, 1.0), ("U_0.7", OperatorKind::Repulsive, 0.7)] {
        let op = assemble(kind, lambda, 0.0)?;
        let om = |xs: &[f64]| -> gapwave::Result<Vec<f64>> {
            xs.iter().map(|&x| Ok(spectral_density(&op, x, &cfg)?.omega)).collect()
        };
        let (a, b) = (om(&small)?, om(&large)?);
        println!("{name:>6}: slope {:.4} on [1e-3, 1e-2], {:.4} on [30, 300]", loglog_slope(&small, &a), loglog_slope(&large, &b));
        for xi in [50.0, 500.0] {
            let ratio = spectral_density(&op, xi, &cfg)?.omega / (2.0 * xi * euclidean_reference_m(xi).im);
            println!("        omega / omega_E at xi = {xi}: {ratio:.6}");
        }
    }
    let c = |xs: &[f64]| xs.iter().map(|&x| free_sample(x).map(|s| s.omega)).collect::<gapwave::Result<Vec<_>>>();
    println!("  free: slope {:.4} / {:.4}", loglog_slope(&small, &c(&small)?), loglog_slope(&large, &c(&large)?));
    Ok(())
}
