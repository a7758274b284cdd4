//! Where the threshold resonance of L_V appears: b(lambda) changes sign and
//! the threshold oscillation count jumps.

use gapwave::spectral::{resonance_scan, ShootingConfig, LAMBDA_COMPARISON};
use gapwave::OperatorKind;

fn main() -> gapwave::Result<()> {
    let s = resonance_scan(OperatorKind::Attractive, 1.0, 4.0, &ShootingConfig::default())?;
    for p in s.points.iter().step_by(4) {
        println!("lambda {:.2}  b {:+.5}  count {}", p.lambda, p.b_coeff, p.oscillation_count);
    }
    println!("\nb changes sign in [{:.5}, {:.5}]", s.bracket.0, s.bracket.1);
    if let Some((a, b)) = s.oscillation_jump {
        println!("oscillation count jumps in [{a:.5}, {b:.5}]");
    }
    println!("comparison bound sqrt(15/8) = {LAMBDA_COMPARISON:.5}, discrepancy flag {}", s.discrepancy);
    Ok(())
}
