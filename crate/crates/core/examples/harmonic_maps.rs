//! The two harmonic map families, their energies, and the Bogomolnyi split.

use gapwave::evolve::{linf_energy_bound_check, WaveState};
use gapwave::geometry::{bogomolnyi_decomposition, harmonic_residual, profile_energy};
use gapwave::profile::graded_grid;
use gapwave::{HarmonicFamily, Target};

fn main() -> gapwave::Result<()> {
    let grid = graded_grid(1e-4, 1.05, 0.01, 30.0);
    println!("{:>16} {:>6} {:>10} {:>12} {:>12} {:>10}", "target", "lambda", "endpoint", "2l^2/(1±l^2)", "quadrature", "residual");
    for (target, lambdas) in [(Target::Sphere, [0.25, 1.0, 4.0]), (Target::HyperbolicPlane, [0.25, 0.5, 0.9])] {
        for lambda in lambdas {
            let fam = HarmonicFamily::new(target, lambda)?;
            let e = profile_energy(target, &fam.profile(&grid), None);
            let res = [1e-3, 0.1, 1.0, 5.0, 20.0].iter().map(|&r| harmonic_residual(&fam, r).abs()).fold(0.0, f64::max);
            println!(
                "{:>16} {lambda:>6} {:>10.6} {:>12.8} {:>12.8} {res:>10.1e}",
                format!("{target:?}"),
                fam.endpoint,
                fam.energy,
                e
            );
        }
    }

    let fam = HarmonicFamily::new(Target::Sphere, 1.0)?;
    let q = fam.profile(&grid);
    let b = bogomolnyi_decomposition(fam.target, &q, None)?;
    println!("\nQ_1: kinetic {:.1e}, defect {:.1e}, topological {:.10}", b.kinetic, b.quadratic_defect, b.topological);

    let state = WaveState::stationary(fam, &grid)?;
    let (sup, bound) = linf_energy_bound_check(&state)?;
    println!("sup |Q_1| = {sup:.10}, G^-1(E) = {bound:.10}");
    Ok(())
}
