//! The Green's kernel `H(sigma; rho)` of the weight-one Dirac operator and
//! the free Green's function assembled from it.
//!
//! `H1` sits on the diagonal and `H2` off the diagonal (`H3 = H2`, `H4 = H1`):
//!
//! ```text
//! H1 = -(rho/4pi) s^(-1/2-i rho) G(i rho) G(1+i rho)/G(1+2i rho) F(i rho, 1+i rho; 1+2i rho; 1/s)
//! H2 = -(i/4pi) s^(-1-i rho) (s-1)^(1/2) G(1+i rho)^2/G(1+2i rho) F(1+i rho, 1+i rho; 1+2i rho; 1/s)
//! ```
//!
//! For `s >= 2` the series in `1/s` is summed directly. Closer to the
//! diagonal both hypergeometric functions are degenerate (`c = a + b` and
//! `c = a + b - 1`), and the logarithmic expansions around `z = 1` are used;
//! in them the gamma prefactors cancel exactly.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::{digamma, ln_gamma, EULER_GAMMA};
use super::hyp2f1::{beta_weighted_integral, hyp2f1};
use crate::error::{Error, Result};
use crate::moebius::{pair_products, sigma_minus_one};
use crate::quadrature::QuadOptions;

/// Switch point between the expansion at `sigma = 1` and the series in `1/sigma`.
const SWITCH: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Hypergeometric,
    Integral,
}

/// The two independent components `(H1, H2)` at `sigma = 1 + sm1`.
///
/// Passing `sigma - 1` rather than `sigma` keeps full relative precision for
/// nearly coincident points.
pub fn h_kernel_sm1(sm1: f64, rho: Complex64) -> Result<[Complex64; 2]> {
    if !(sm1 > 0.0) {
        return Err(Error::Domain(format!("H(sigma) needs sigma > 1, got 1 + {sm1:e}")));
    }
    let s = 1.0 + sm1;
    if s >= SWITCH {
        far(s, sm1, rho)
    } else {
        near(s, sm1, rho)
    }
}

/// `(H1, H2)` at `sigma` in the requested representation.
pub fn h_kernel(sigma: f64, rho: Complex64, repr: Representation) -> Result<[Complex64; 2]> {
    match repr {
        Representation::Hypergeometric => h_kernel_sm1(sigma - 1.0, rho),
        Representation::Integral => h_kernel_integral(sigma, rho),
    }
}

fn far(s: f64, sm1: f64, rho: Complex64) -> Result<[Complex64; 2]> {
    let i = Complex64::i();
    let irho = i * rho;
    let one = Complex64::new(1.0, 0.0);
    let x = Complex64::new(1.0 / s, 0.0);
    let ls = s.ln();
    let lg1 = ln_gamma(one + irho);
    let lg2 = ln_gamma(one + irho * 2.0);
    // rho Gamma(i rho) = -i Gamma(1 + i rho)
    let f1 = hyp2f1(irho, one + irho, one + irho * 2.0, x)?;
    let h1 = i / (4.0 * PI) * ((-0.5 - irho) * ls + lg1 * 2.0 - lg2).exp() * f1;
    let f2 = hyp2f1(one + irho, one + irho, one + irho * 2.0, x)?;
    let h2 = -i / (4.0 * PI) * sm1.sqrt() * ((-1.0 - irho) * ls + lg1 * 2.0 - lg2).exp() * f2;
    Ok([h1, h2])
}

fn near(s: f64, sm1: f64, rho: Complex64) -> Result<[Complex64; 2]> {
    let i = Complex64::i();
    let a = i * rho; // H1 uses a, b = a + 1; H2 uses a + 1 twice
    let w = sm1 / s; // 1 - 1/sigma
    let lw = w.ln();
    let ls = s.ln();

    // H1: sum_n (a)_n (a+1)_n / n!^2 [2psi(n+1) - psi(a+n) - psi(a+n+1) - ln w] w^n,
    // with the n = 0 pole of rho psi(a) split off as i/(4pi)
    let mut psi_n1 = Complex64::new(-EULER_GAMMA, 0.0); // psi(n+1)
    let mut psi_a1 = digamma(a + 1.0); // psi(a+n+1)
    let mut psi_a = psi_a1; // psi(a+n) except at n = 0, see above
    let mut coef = Complex64::new(1.0, 0.0);
    let mut wn = 1.0;
    let mut sum1 = Complex64::new(0.0, 0.0);
    let mut n = 0usize;
    loop {
        let term = coef * wn * (psi_n1 * 2.0 - psi_a - psi_a1 - lw);
        sum1 += term;
        if n > 4 && term.norm() < 1e-17 * sum1.norm().max(1e-300) {
            break;
        }
        if n > 2000 {
            return Err(Error::Numerical("H1 expansion at sigma=1 did not converge".into()));
        }
        let nf = n as f64;
        coef *= (a + nf) * (a + nf + 1.0) / ((nf + 1.0) * (nf + 1.0));
        wn *= w;
        psi_n1 += 1.0 / (nf + 1.0);
        psi_a = psi_a1; // psi(a + n + 1)
        psi_a1 += (a + nf + 1.0).inv();
        n += 1;
    }
    let pref1 = ((-0.5 - a) * ls).exp();
    let h1 = pref1 * (i / (4.0 * PI) - rho / (4.0 * PI) * sum1);

    // H2: w^-1 - rho^2 sum_n (a+1)_n^2/(n!(n+1)!) w^n [ln w - psi(n+1) - psi(n+2) + 2 psi(a+1+n)]
    let ap = a + 1.0;
    let mut psi_n1 = -EULER_GAMMA;
    let mut psi_n2 = 1.0 - EULER_GAMMA;
    let mut psi_ap = digamma(ap);
    let mut coef = Complex64::new(1.0, 0.0);
    let mut wn = 1.0;
    let mut sum2 = Complex64::new(0.0, 0.0);
    let mut n = 0usize;
    loop {
        let term = coef * wn * (psi_ap * 2.0 + (lw - psi_n1 - psi_n2));
        sum2 += term;
        if n > 4 && term.norm() < 1e-17 * sum2.norm().max(1e-300) {
            break;
        }
        if n > 2000 {
            return Err(Error::Numerical("H2 expansion at sigma=1 did not converge".into()));
        }
        let nf = n as f64;
        coef *= (ap + nf) * (ap + nf) / ((nf + 1.0) * (nf + 2.0));
        wn *= w;
        psi_n1 += 1.0 / (nf + 1.0);
        psi_n2 += 1.0 / (nf + 2.0);
        psi_ap += (ap + nf).inv();
        n += 1;
    }
    let bracket = Complex64::new(1.0 / w, 0.0) - rho * rho * sum2;
    let h2 = -i / (4.0 * PI) * sm1.sqrt() * ((-1.0 - a) * ls).exp() * bracket;
    Ok([h1, h2])
}

/// `(H1, H2)` from the Euler integrals
/// `H1 = -(rho/4pi) s^(-1/2) int_0^1 t^(i rho) (1-t)^(i rho - 1) (s-t)^(-i rho) dt` and
/// `H2 = (rho/4pi) (s-1)^(1/2) int_0^1 t^(i rho) (1-t)^(i rho - 1) (s-t)^(-1-i rho) dt`,
/// which converge for `Im rho < 0`.
pub fn h_kernel_integral(sigma: f64, rho: Complex64) -> Result<[Complex64; 2]> {
    if !(sigma > 1.0) {
        return Err(Error::Domain(format!("H(sigma) needs sigma > 1, got {sigma}")));
    }
    if !(rho.im < 0.0) {
        return Err(Error::Domain(format!(
            "Euler integral for H diverges unless Im rho < 0 (rho = {rho})"
        )));
    }
    let i = Complex64::i();
    let irho = i * rho;
    let opts = QuadOptions::with_tol(1e-16, 1e-13);
    let p = irho + 1.0;
    let q = irho;
    let i1 = beta_weighted_integral(p, q, |t| Complex64::new(sigma - t, 0.0).powc(-irho), opts)?;
    let i2 =
        beta_weighted_integral(p, q, |t| Complex64::new(sigma - t, 0.0).powc(-irho - 1.0), opts)?;
    let h1 = -rho / (4.0 * PI) * sigma.powf(-0.5) * i1;
    let h2 = rho / (4.0 * PI) * (sigma - 1.0).sqrt() * i2;
    Ok([h1, h2])
}

/// Residuals of the first-order system satisfied by `H`:
///
/// ```text
/// rho H2 + i D H1 = 0,
/// rho H1 + i D H2 + i H2 / (2 sqrt(s(s-1))) = 0,
/// D = sqrt(s(s-1)) d/ds + (1/2) sqrt((s-1)/s),
/// ```
///
/// with the `s`-derivatives taken by fourth-order central differences of
/// step `step`. Returns the larger of the two residual moduli.
pub fn greenh_residual(sigma: f64, rho: Complex64, step: f64) -> Result<f64> {
    greenh_residual_with(sigma, rho, step, |s| h_kernel_sm1(s - 1.0, rho))
}

/// As [`greenh_residual`] for an arbitrary kernel evaluator.
pub fn greenh_residual_with<F>(sigma: f64, rho: Complex64, step: f64, h: F) -> Result<f64>
where
    F: Fn(f64) -> Result<[Complex64; 2]>,
{
    if sigma - 2.0 * step <= 1.0 {
        return Err(Error::Domain("stencil reaches sigma <= 1".into()));
    }
    let i = Complex64::i();
    let hm2 = h(sigma - 2.0 * step)?;
    let hm1 = h(sigma - step)?;
    let h0 = h(sigma)?;
    let hp1 = h(sigma + step)?;
    let hp2 = h(sigma + 2.0 * step)?;
    let d = |k: usize| (hm2[k] - hp2[k] + (hp1[k] - hm1[k]) * 8.0) / (12.0 * step);
    let q = (sigma * (sigma - 1.0)).sqrt();
    let c = 0.5 * ((sigma - 1.0) / sigma).sqrt();
    let dh1 = d(0) * q + h0[0] * c;
    let dh2 = d(1) * q + h0[1] * c;
    let r1 = rho * h0[1] + i * dh1;
    let r2 = rho * h0[0] + i * dh2 + i * h0[1] / (2.0 * q);
    Ok(r1.norm().max(r2.norm()))
}

/// Free Green's function `G(z1, z2) = A(z1, z2) H(sigma) B(z1, z2)`.
pub fn green_free(z1: Complex64, z2: Complex64, rho: Complex64) -> Result<[[Complex64; 2]; 2]> {
    let [p11, p12, p21, p22] = pair_products(z1, z2)?;
    let [h1, h2] = h_kernel_sm1(sigma_minus_one(z1, z2), rho)?;
    Ok([[p11 * h1, p12 * h2], [p21 * h2, p22 * h1]])
}
