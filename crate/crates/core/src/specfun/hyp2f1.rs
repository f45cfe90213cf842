//! Gauss hypergeometric function: power series inside the unit disc and the
//! Euler integral as an independent evaluation route.

use num_complex::Complex64;

use super::gamma::ln_gamma;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_breaks, QuadOptions};

const MAX_TERMS: usize = 200_000;

fn is_nonpositive_integer(c: Complex64) -> bool {
    c.im == 0.0 && c.re <= 0.0 && c.re == c.re.round()
}

/// `2F1(a, b; c; z)` by its power series, for `|z| < 1 - 1e-6`.
///
/// Terms are summed until the remaining tail, bounded by a geometric series
/// with the current term ratio, falls below `1e-16` relative.
pub fn hyp2f1(a: Complex64, b: Complex64, c: Complex64, z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(c) {
        return Err(Error::Domain(format!("2F1: c = {c} is a pole")));
    }
    if z.norm() >= 1.0 - 1e-6 {
        return Err(Error::Domain(format!(
            "2F1 series does not converge at |z| = {}; use the integral representation",
            z.norm()
        )));
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let ratio = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0));
        term *= ratio * z;
        sum += term;
        if term.norm() == 0.0 {
            return Ok(sum);
        }
        let r = ratio.norm() * z.norm();
        if n > 2 && r < 1.0 {
            // ratios decrease towards |z| for large n once past the parameters
            let tail = term.norm() * r / (1.0 - r);
            if tail <= 1e-16 * sum.norm() && nf > (a.norm() + b.norm()) {
                return Ok(sum);
            }
        }
    }
    Err(Error::Numerical("2F1 series: term budget exhausted".into()))
}

/// `int_0^1 t^(p-1) (1-t)^(q-1) phi(t) dt` for `Re p, Re q > 0` and smooth
/// `phi`, with power substitutions at both endpoints that make the integrand
/// several times differentiable.
pub fn beta_weighted_integral<F: FnMut(f64) -> Complex64>(
    p: Complex64,
    q: Complex64,
    mut phi: F,
    opts: QuadOptions,
) -> Result<Complex64> {
    if !(p.re > 0.0 && q.re > 0.0) {
        return Err(Error::Domain(format!(
            "Euler integral diverges: exponents {p}, {q} need positive real part"
        )));
    }
    let order = |e: f64| ((4.0 / e).ceil()).max(1.0);
    let mp = order(p.re);
    let mq = order(q.re);
    // [0, 1/2]: t = v^mp, dt = mp v^(mp-1) dv
    let v_max = 0.5f64.powf(1.0 / mp);
    let mut left = |v: f64| {
        if v <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let t = v.powf(mp);
        let lv = v.ln();
        // t^(p-1) dt = mp v^(mp p - 1) dv
        let w = ((p * mp - 1.0) * lv).exp() * mp;
        w * Complex64::new(1.0 - t, 0.0).powc(q - 1.0) * phi(t)
    };
    let l = integrate_breaks(&mut left, &[0.0, 0.5 * v_max, v_max], opts)?;
    let u_max = 0.5f64.powf(1.0 / mq);
    let mut right = |u: f64| {
        if u <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let s = u.powf(mq);
        let t = 1.0 - s;
        let lu = u.ln();
        let w = ((q * mq - 1.0) * lu).exp() * mq;
        w * Complex64::new(t, 0.0).powc(p - 1.0) * phi(t)
    };
    let r = integrate_breaks(&mut right, &[0.0, 0.5 * u_max, u_max], opts)?;
    Ok(l.value + r.value)
}

/// `2F1(a, b; c; z)` for real `z < 1` from the Euler integral, valid for
/// `Re c > Re b > 0`.
pub fn hyp2f1_euler(a: Complex64, b: Complex64, c: Complex64, z: f64) -> Result<Complex64> {
    let opts = QuadOptions::with_tol(1e-15, 1e-13);
    let int = beta_weighted_integral(b, c - b, |t| Complex64::new(1.0 - z * t, 0.0).powc(-a), opts)?;
    let pref = (ln_gamma(c) - ln_gamma(b) - ln_gamma(c - b)).exp();
    Ok(pref * int)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn at_zero() {
        let v = hyp2f1(c(0.3, 1.0), c(2.0, 0.0), c(1.5, -0.2), c(0.0, 0.0)).unwrap();
        assert_eq!(v, c(1.0, 0.0));
    }

    #[test]
    fn logarithm_identity() {
        let v = hyp2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!((v.re - 2.0 * 2f64.ln()).abs() < 1e-14);
        assert!(v.im.abs() < 1e-16);
    }

    #[test]
    fn polynomial_case() {
        // F(-2, b; c; z) = 1 - 2bz/c + b(b+1)z^2/(c(c+1))
        let (b, cc, z) = (c(0.7, 0.2), c(1.3, 0.0), c(0.4, 0.1));
        let v = hyp2f1(c(-2.0, 0.0), b, cc, z).unwrap();
        let exact = 1.0 - b * z * 2.0 / cc + b * (b + 1.0) * z * z / (cc * (cc + 1.0));
        assert!((v - exact).norm() < 1e-15);
    }

    #[test]
    fn reference_values() {
        // mpmath.hyp2f1(1j, 1+1j, 1+2j, 0.3)
        let v = hyp2f1(c(0.0, 1.0), c(1.0, 1.0), c(1.0, 2.0), c(0.3, 0.0)).unwrap();
        assert!((v - c(1.0526291543807646, 0.21898709726036692)).norm() < 1e-13);
    }

    #[test]
    fn euler_matches_series() {
        let (a, b, cc) = (c(0.5, 1.0), c(1.2, -0.3), c(2.5, 0.3));
        for z in [0.1, 0.3, 0.7] {
            let s = hyp2f1(a, b, cc, c(z, 0.0)).unwrap();
            let e = hyp2f1_euler(a, b, cc, z).unwrap();
            assert!((s - e).norm() < 1e-11 * s.norm(), "z={z}: {s} vs {e}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(hyp2f1(c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0), c(0.1, 0.0)).is_err());
        assert!(hyp2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.9999999, 0.0)).is_err());
    }
}
