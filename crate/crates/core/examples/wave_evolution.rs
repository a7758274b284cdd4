//! A small bump on Q_1 disperses: the energy near the origin collapses and the
//! scattering norm stops growing.

use gapwave::evolve::{evolve, Evolver, EvolverConfig, WaveState};
use gapwave::{HarmonicFamily, Target};

fn bump(r: f64) -> f64 {
    r * r / (1.0 + r * r) * (-(r - 2.0_f64).powi(2) / 0.5).exp()
}

fn main() -> gapwave::Result<()> {
    let fam = HarmonicFamily::new(Target::Sphere, 1.0)?;
    let cfg = EvolverConfig::default();
    let nodes = cfg.nodes();
    let dt = cfg.time_step();

    let unit = WaveState::perturbed(fam, &nodes[1..], bump, |_| 0.0)?;
    let k = 1e-2 / Evolver::new(&unit, dt, &cfg, None)?.h0_distance();
    let init = WaveState::perturbed(fam, &nodes[1..], |r| k * bump(r), |_| 0.0)?;

    let run = evolve(&init, 60.0, dt, &cfg, None)?;
    println!("{:>6} {:>14} {:>12} {:>12}", "t", "energy", "local", "S-norm");
    for (s, d) in run.frames.iter().step_by(5) {
        println!("{:>6.1} {:>14.10} {:>12.3e} {:>12.6e}", s.t, d.energy, d.local_energy, d.s_norm_partial);
    }
    Ok(())
}
