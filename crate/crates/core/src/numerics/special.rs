use num_complex::Complex64;
use std::f64::consts::PI;

const G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Gamma(z) for complex z (Lanczos, g = 7), with reflection for Re z < 1/2.
/// The imaginary part is only defined modulo 2 pi.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let pi = Complex64::new(PI, 0.0);
        return pi.ln() - ln_sin(pi * z) - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// ln sin(w), without overflow for large |Im w|.
fn ln_sin(w: Complex64) -> Complex64 {
    let i = Complex64::i();
    let half = Complex64::new(0.5f64.ln(), 0.0);
    if w.im > 20.0 {
        -i * w + half + i * std::f64::consts::FRAC_PI_2 + (1.0 - (2.0 * i * w).exp()).ln()
    } else if w.im < -20.0 {
        i * w + half - i * std::f64::consts::FRAC_PI_2 + (1.0 - (-2.0 * i * w).exp()).ln()
    } else {
        w.sin().ln()
    }
}
