//! Barnes G-function.

use num_complex::Complex64;

use super::gamma::ln_gamma;

/// `zeta'(-1) = 1/12 - ln A` with Glaisher's constant `A`.
const ZETA_PRIME_MINUS_ONE: f64 = -0.165_421_143_700_450_929_21;
const LN_2PI: f64 = 1.837_877_066_409_345_483_56;

/// `B_{2k+2} / (4 k (k+1))`, `k = 1..`
const ASYM: [f64; 7] = [
    -1.0 / 240.0,
    1.0 / 1008.0,
    -1.0 / 1440.0,
    1.0 / 1056.0,
    -691.0 / 327600.0,
    1.0 / 144.0,
    -3617.0 / 114240.0,
];

const SHIFT: f64 = 16.0;

/// Order of the zero of `G` at `z`: `n + 1` at `z = -n`, otherwise zero.
pub fn barnes_g_zero_order(z: Complex64) -> u32 {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        (1.0 - z.re) as u32
    } else {
        0
    }
}

/// `ln G(z)`; equals `-inf` at the zeros `z = 0, -1, -2, ...`.
pub fn ln_barnes_g(z: Complex64) -> Complex64 {
    if barnes_g_zero_order(z) > 0 {
        return Complex64::new(f64::NEG_INFINITY, 0.0);
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < SHIFT {
        shift += ln_gamma(w);
        w += 1.0;
    }
    // ln G(1 + u) with u = w - 1
    let u = w - 1.0;
    let lu = u.ln();
    let uinv2 = (u * u).inv();
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = uinv2;
    for c in ASYM {
        series += p * c;
        p *= uinv2;
    }
    let main = u * u * 0.5 * lu - u * u * 0.75 + u * (0.5 * LN_2PI) - lu / 12.0
        + ZETA_PRIME_MINUS_ONE
        + series;
    main - shift
}

pub fn barnes_g(z: Complex64) -> Complex64 {
    if barnes_g_zero_order(z) > 0 {
        return Complex64::new(0.0, 0.0);
    }
    ln_barnes_g(z).exp()
}
