//! Near the origin, rescaled by rho = lambda r, L_V approaches the Euclidean
//! operator whose threshold resonance is rho^{3/2} / (1 + rho^2/4).

use gapwave::geometry::{explicit_solution_value, ExplicitSolutionKind};
use gapwave::operators::renormalized_potential;
use gapwave::spectral::renormalized_ratio;

fn main() -> gapwave::Result<()> {
    for lambda in [10.0, 100.0, 1000.0] {
        let w = [0.5, 1.5, 4.0].map(|rho| renormalized_potential(lambda, 0.25, rho));
        println!("lambda {lambda:>6}: W(0.5, 1.5, 4) = {:+.3e} {:+.3e} {:+.3e}", w[0], w[1], w[2]);
    }
    let g = renormalized_ratio(100.0, 0.2, 5.0, 200)?;
    for rho in [0.5, 1.0, 2.0, 5.0] {
        let phi0 = explicit_solution_value(ExplicitSolutionKind::EuclideanResonance, 0.0, rho)?;
        println!("rho {rho}: phi_0 = {phi0:.6}, g = {:.9}", g.value_at(rho).unwrap());
    }
    Ok(())
}
