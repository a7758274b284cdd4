//! mu^2_lambda on a log grid in lambda: the eigenvalue appears past the
//! transition and drifts toward 0 as lambda grows.

use gapwave::numerics::log_grid;
use gapwave::spectral::{eigencurve, ShootingConfig};
use gapwave::OperatorKind;

fn main() -> gapwave::Result<()> {
    let lambdas = log_grid(2.0, 160.0, 6);
    for (l, mu_sq) in eigencurve(OperatorKind::Attractive, &lambdas, &ShootingConfig::default())? {
        match mu_sq {
            Some(m) => println!("{l:>9.3}  {m:.9}  {}", "#".repeat((m * 200.0) as usize)),
            None => println!("{l:>9.3}  none"),
        }
    }
    Ok(())
}
