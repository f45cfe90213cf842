//! Complex log-gamma and digamma via upward recurrence and Stirling series.

use num_complex::Complex64;
use std::f64::consts::PI;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_78;

/// Shift threshold: the asymptotic series is used once `Re z` exceeds this.
const SHIFT: f64 = 16.0;

/// `B_{2k} / (2k (2k-1))`
const STIRLING: [f64; 9] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
];

/// `B_{2k} / (2k)`
const DIGAMMA_ASYM: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Logarithm of the gamma function on the branch continuous in the upper and
/// lower half-planes separately. Returns `inf` at the poles.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if is_pole(z) {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < SHIFT {
        shift += z.ln();
        z += 1.0;
    }
    let zinv = z.inv();
    let zinv2 = zinv * zinv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = zinv;
    for c in STIRLING {
        series += p * c;
        p *= zinv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series - shift
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// `ln Gamma(x)` for real `x > 0`.
pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0)).re
}

/// Digamma function `psi = Gamma' / Gamma`.
pub fn digamma(z: Complex64) -> Complex64 {
    if is_pole(z) {
        return Complex64::new(f64::NAN, f64::NAN);
    }
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < SHIFT {
        shift += z.inv();
        z += 1.0;
    }
    let zinv = z.inv();
    let zinv2 = zinv * zinv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = zinv2;
    for c in DIGAMMA_ASYM {
        series += p * c;
        p *= zinv2;
    }
    z.ln() - zinv * 0.5 - series - shift
}

pub fn digamma_real(x: f64) -> f64 {
    digamma(Complex64::new(x, 0.0)).re
}

/// `pi cot(pi z)`, stable for large `|Im z|`.
pub fn pi_cot_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im > 0.0 {
        let q = (i * 2.0 * PI * z).exp();
        i * PI * (q + 1.0) / (q - 1.0)
    } else {
        let q = (-i * 2.0 * PI * z).exp();
        i * PI * (1.0 + q) / (1.0 - q)
    }
}
