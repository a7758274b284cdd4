//! Seeding the gap eigenfunction at lambda = 30: the projection oscillates at mu_lambda.

use gapwave::evolve::{internal_mode_experiment, EvolverConfig};
use gapwave::spectral::{gap_eigenvalue, GapOutcome, ShootingConfig};
use gapwave::{assemble, OperatorKind};

fn main() -> gapwave::Result<()> {
    let lambda = 30.0;
    let op = assemble(OperatorKind::Attractive, lambda, 0.0)?;
    let GapOutcome::Eigenvalue(eigen) = gap_eigenvalue(&op, &ShootingConfig::default())? else {
        return Err(gapwave::Error::Precondition("no eigenvalue".into()));
    };
    // refined core for the potential well of width ~1/lambda
    let cfg = EvolverConfig { r_max: 40.0, h_min: Some(0.002), ..Default::default() };
    let m = internal_mode_experiment(lambda, &eigen, 1e-3, 100.0, &cfg)?;
    for (t, a) in m.amplitude_series.iter().step_by(400) {
        println!("{t:>7.2} {a:+.6e}");
    }
    println!("mu = {:.6}, measured {:.6} ({:+.2}%), snr {:.1e}",
        m.expected_frequency,
        m.measured_frequency,
        100.0 * (m.measured_frequency / m.expected_frequency - 1.0),
        m.snr
    );
    Ok(())
}
