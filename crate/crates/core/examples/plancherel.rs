//! ||f||^2 recovered from the distorted Fourier transform, with and without
//! the potential.

use gapwave::spectral::ShootingConfig;
use gapwave::weyl::{plancherel_check, Transform};
use gapwave::{assemble, OperatorKind, RadialProfile};

fn main() -> gapwave::Result<()> {
    let cfg = ShootingConfig { r_max: 20.0, ..Default::default() };
    let grid: Vec<f64> = (1..=300).map(|i| i as f64 * 0.02).collect();
    let f = RadialProfile::from_fn(grid, 0.0, |r| (-(r - 3.0_f64).powi(2) / 0.5).exp())?;
    let xi: Vec<f64> = (0..=240).map(|i| 0.005 + i as f64 * 0.05).collect();
    for (name, t) in [
        ("free (spherical functions)", Transform::Free),
        ("L_V, lambda = 1", Transform::Perturbed(assemble(OperatorKind::Attractive, 1.0, 0.0)?)),
        ("L_U, lambda = 0.7", Transform::Perturbed(assemble(OperatorKind::Repulsive, 0.7, 0.0)?)),
    ] {
        let r = plancherel_check(&t, &f, &xi, &cfg)?;
        println!("{name:>28}: ||f||^2 = {:.8}, transform {:.8}, gap {:.1e}", r.l2_norm_sq, r.transform_norm_sq, r.relative_gap);
    }
    Ok(())
}
