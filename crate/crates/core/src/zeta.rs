//! Selberg zeta function `Z(s) = prod_p prod_(k>=0) (1 - chi(gamma_p) e^(-l_p (k+s)))`,
//! its log-derivative, the regularised resolvent identity and the product
//! representation over the spectrum.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fuchsian::LengthSpectrum;
use crate::specfun::{digamma, ln_barnes_g};
use crate::testfn::TestFunction;
use crate::traceformula::{geometric_term, identity_term, GrowthFit};

pub const DEFAULT_MARGIN: f64 = 0.05;
/// The k-sum stops once `e^(-l (k + Re s))` falls below this.
const K_CUTOFF: f64 = 1e-18;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZetaEvaluation {
    pub s: [f64; 2],
    pub log_z: [f64; 2],
    pub tail: f64,
    pub group_fingerprint: String,
}

impl ZetaEvaluation {
    pub fn log_value(&self) -> Complex64 {
        Complex64::new(self.log_z[0], self.log_z[1])
    }
}

fn check_domain(s: Complex64, margin: f64) -> Result<()> {
    if !(s.re > 1.0 + margin) {
        return Err(Error::Domain(format!("Euler product needs Re s > {}, got s = {s}", 1.0 + margin)));
    }
    Ok(())
}

/// Growth model of the chi-signed primitive class counts.
pub fn primitive_growth(spectrum: &LengthSpectrum) -> Option<GrowthFit> {
    let samples: Vec<(f64, f64)> = spectrum
        .classes
        .iter()
        .filter(|c| c.power == 1)
        .map(|c| (c.primitive_length, c.multiplicity as f64 * c.chi_value as f64))
        .collect();
    GrowthFit::fit(&samples, spectrum.cutoff)
}

fn primitive_tail<F: Fn(f64) -> f64>(spectrum: &LengthSpectrum, weight: F) -> Result<f64> {
    match primitive_growth(spectrum) {
        Some(g) => g.tail(spectrum.cutoff, weight),
        None => Ok(0.0),
    }
}

/// `ln Z(s)` over the primitive classes of `spectrum`, `Re s > 1 + margin`.
pub fn log_zeta_euler_with(s: Complex64, spectrum: &LengthSpectrum, margin: f64) -> Result<ZetaEvaluation> {
    check_domain(s, margin)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for c in spectrum.classes.iter().filter(|c| c.power == 1) {
        let (l, chi) = (c.primitive_length, c.chi_value as f64);
        let mut part = Complex64::new(0.0, 0.0);
        let mut k = 0.0;
        while (-l * (k + s.re)).exp() >= K_CUTOFF {
            part += (1.0 - chi * (-l * (k + s)).exp()).ln();
            k += 1.0;
        }
        acc += part * c.multiplicity as f64;
    }
    let sr = s.re;
    let tail = primitive_tail(spectrum, |u| (-u * sr).exp() / ((1.0 - (-u * sr).exp()) * (1.0 - (-u).exp())))?;
    Ok(ZetaEvaluation {
        s: [s.re, s.im],
        log_z: [acc.re, acc.im],
        tail,
        group_fingerprint: spectrum.group_fingerprint.clone(),
    })
}

pub fn log_zeta_euler(s: Complex64, spectrum: &LengthSpectrum) -> Result<ZetaEvaluation> {
    log_zeta_euler_with(s, spectrum, DEFAULT_MARGIN)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogDerivative {
    pub value: [f64; 2],
    pub tail: f64,
}

impl LogDerivative {
    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.value[0], self.value[1])
    }
}

/// `Z'/Z(s) = sum_p sum_k chi l e^(-l(k+s)) / (1 - chi e^(-l(k+s)))`.
pub fn zeta_log_deriv(s: Complex64, spectrum: &LengthSpectrum) -> Result<LogDerivative> {
    check_domain(s, DEFAULT_MARGIN)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for c in spectrum.classes.iter().filter(|c| c.power == 1) {
        let (l, chi) = (c.primitive_length, c.chi_value as f64);
        let mut part = Complex64::new(0.0, 0.0);
        let mut k = 0.0;
        while (-l * (k + s.re)).exp() >= K_CUTOFF {
            let q = chi * (-l * (k + s)).exp();
            part += q * l / (1.0 - q);
            k += 1.0;
        }
        acc += part * c.multiplicity as f64;
    }
    let sr = s.re;
    let tail = primitive_tail(spectrum, |u| u * (-u * sr).exp() / ((1.0 - (-u * sr).exp()) * (1.0 - (-u).exp())))?;
    Ok(LogDerivative { value: [acc.re, acc.im], tail })
}

/// Both halves of the regularised resolvent identity with residuals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolventReport {
    pub s: f64,
    pub sigma: f64,
    pub geometric_term: f64,
    pub zeta_side: f64,
    pub geometric_residual: f64,
    pub identity_term: f64,
    pub digamma_side: f64,
    pub identity_residual: f64,
    pub tail: f64,
}

/// Compares `geometric_term` with `Z'/Z(s)/(2s-1) - Z'/Z(sigma)/(2 sigma-1)`
/// and `identity_term` with its digamma closed form.
pub fn resolvent_consistency(s: f64, sigma: f64, spectrum: &LengthSpectrum, area: f64) -> Result<ResolventReport> {
    let h = TestFunction::resolvent(s, sigma)?;
    let geo = geometric_term(&h, spectrum, None)?;
    let ds = zeta_log_deriv(Complex64::new(s, 0.0), spectrum)?;
    let dsig = zeta_log_deriv(Complex64::new(sigma, 0.0), spectrum)?;
    let zeta_side = ds.value[0] / (2.0 * s - 1.0) - dsig.value[0] / (2.0 * sigma - 1.0);
    let id = identity_term(&h, area)?;
    let psi = |x: f64| digamma(Complex64::new(x, 0.0)).re;
    let digamma_side = -(area / (2.0 * PI)) * (psi(s - 0.5) - psi(sigma - 0.5))
        + (area / (4.0 * PI)) * (1.0 / (sigma - 0.5) - 1.0 / (s - 0.5));
    Ok(ResolventReport {
        s,
        sigma,
        geometric_term: geo.value,
        zeta_side,
        geometric_residual: (geo.value - zeta_side).abs(),
        identity_term: id,
        digamma_side,
        identity_residual: (id - digamma_side).abs(),
        tail: geo.tail_bound,
    })
}

/// Constants of the product representation. None has a default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ProductConstants {
    /// Half the number of zero modes.
    pub n: Option<u32>,
    pub gamma_d: Option<f64>,
    /// `Z^(2N)(1/2) / (2N)!`.
    pub leading: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProductValue {
    pub value: [f64; 2],
    pub log_value: [f64; 2],
    /// Bound on the omitted eigenvalue factors beyond the list.
    pub tail: f64,
}

impl ProductValue {
    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.value[0], self.value[1])
    }
}

/// `ln Z(s)` from the product over the eigenvalues `rho_m`, `m >= start`
/// (the zero modes occupy `m < N`; `start` defaults to `N`).
pub fn zeta_product_rep(
    s: Complex64,
    eigenvalues: &[f64],
    start: Option<usize>,
    constants: &ProductConstants,
    area: f64,
) -> Result<ProductValue> {
    let missing: Vec<&str> = [
        ("N", constants.n.is_none()),
        ("gamma_d", constants.gamma_d.is_none()),
        ("leading", constants.leading.is_none()),
    ]
    .iter()
    .filter(|m| m.1)
    .map(|m| m.0)
    .collect();
    if !missing.is_empty() {
        return Err(Error::Config(format!("product representation needs constants: {}", missing.join(", "))));
    }
    let (n, gamma_d, leading) = (constants.n.unwrap(), constants.gamma_d.unwrap(), constants.leading.unwrap());
    if !(area > 0.0) {
        return Err(Error::Domain(format!("area must be positive, got {area}")));
    }
    let start = start.unwrap_or(n as usize);
    let rhos = eigenvalues.get(start..).unwrap_or(&[]);
    if let Some(r) = rhos.iter().find(|r| !(r.abs() > 0.0 && r.is_finite())) {
        return Err(Error::Config(format!("eigenvalue {r} in the product range must be non-zero")));
    }
    let w = s - 0.5;
    let a = area / (2.0 * PI);
    let mut ln = Complex64::new(leading, 0.0).ln() + 2.0 * n as f64 * w.ln() + w * w * gamma_d + w * a;
    ln += a * (-w * (2.0 * PI).ln() + (s * s - 0.25) + 2.0 * ln_barnes_g(s + 0.5));
    let w2 = w * w;
    for r in rhos {
        let q = w2 / (r * r);
        ln += (1.0 + q).ln() - q;
    }
    let r_max = rhos.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let tail = if r_max > 0.0 { area * w.norm().powi(4) / (8.0 * PI * r_max * r_max) } else { f64::INFINITY };
    let v = ln.exp();
    Ok(ProductValue { value: [v.re, v.im], log_value: [ln.re, ln.im], tail })
}

/// Slope of `ln |f|` against `ln |s - s0|` between two radii on the ray
/// `s0 + r e^(i theta)`: the order of a zero (negative for a pole).
pub fn measured_order<F: FnMut(Complex64) -> Result<Complex64>>(mut log_f: F, s0: Complex64, theta: f64) -> Result<f64> {
    let dir = Complex64::from_polar(1.0, theta);
    let (r1, r2) = (1e-4, 1e-6);
    let a = log_f(s0 + dir * r1)?.re;
    let b = log_f(s0 + dir * r2)?.re;
    Ok((a - b) / (r1.ln() - r2.ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::{GeodesicClass, Method, Word};

    fn single(l: f64, chi: i8) -> LengthSpectrum {
        LengthSpectrum {
            cutoff: l + 0.5,
            method: Method::Pruned,
            classes: vec![GeodesicClass {
                primitive_length: l,
                power: 1,
                chi_value: chi,
                multiplicity: 1,
                representative: Word::new(vec![(0, 1)]),
            }],
            group_fingerprint: "single".into(),
        }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn consts(n: u32) -> ProductConstants {
        ProductConstants { n: Some(n), gamma_d: Some(0.3), leading: Some(1.7) }
    }

    #[test]
    fn empty_spectrum_is_one() {
        let s = LengthSpectrum { cutoff: 5.0, method: Method::Pruned, classes: vec![], group_fingerprint: "e".into() };
        let z = log_zeta_euler(c(2.0, 0.5), &s).unwrap();
        assert_eq!(z.log_z, [0.0, 0.0]);
        assert_eq!(zeta_log_deriv(c(2.0, 0.0), &s).unwrap().value, [0.0, 0.0]);
    }

    #[test]
    fn single_class_direct() {
        let s = single(2.0, -1);
        let z = log_zeta_euler(c(2.0, 0.0), &s).unwrap();
        let direct: f64 = (0..40).map(|k| (1.0 + (-2.0 * (k as f64 + 2.0)).exp()).ln()).sum();
        assert!((z.log_z[0] - direct).abs() < 1e-16, "{} {}", z.log_z[0], direct);
        assert_eq!(z.log_z[1], 0.0);
        // closed geometric series of the log-derivative
        let d = zeta_log_deriv(c(2.0, 0.0), &s).unwrap();
        let series: f64 = (1..80).map(|n| (-1f64).powi(n) * 2.0 * (-4.0 * n as f64).exp() / (1.0 - (-2.0 * n as f64).exp())).sum();
        assert!((d.value[0] - series).abs() < 1e-16);
    }

    #[test]
    fn log_derivative_matches_finite_differences() {
        let mut s = single(1.3, 1);
        s.classes.push(GeodesicClass { primitive_length: 2.1, power: 1, chi_value: -1, multiplicity: 3, representative: Word::empty() });
        s.classes.push(GeodesicClass { primitive_length: 1.3, power: 2, chi_value: 1, multiplicity: 1, representative: Word::empty() });
        for z in [c(1.5, 0.0), c(2.0, 1.0), c(3.2, -4.0)] {
            let h = 1e-5;
            let f = |x: Complex64| log_zeta_euler(x, &s).unwrap().log_value();
            let fd = (f(z + h) - f(z - h)) / (2.0 * h);
            let d = zeta_log_deriv(z, &s).unwrap().complex();
            assert!((fd - d).norm() < 1e-8, "{z}: {fd} vs {d}");
        }
    }

    #[test]
    fn hermitian_symmetry() {
        let s = single(1.7, -1);
        let a = log_zeta_euler(c(1.8, 2.5), &s).unwrap().log_value();
        let b = log_zeta_euler(c(1.8, -2.5), &s).unwrap().log_value();
        assert!((a - b.conj()).norm() < 1e-12);
    }

    #[test]
    fn domain_enforced() {
        let s = single(2.0, 1);
        assert!(matches!(log_zeta_euler(c(1.02, 0.0), &s), Err(Error::Domain(_))));
        assert!(log_zeta_euler_with(c(1.02, 0.0), &s, 0.0).is_ok());
        assert!(matches!(zeta_log_deriv(c(0.5, 0.0), &s), Err(Error::Domain(_))));
    }

    #[test]
    fn equal_parameters_give_zero() {
        let s = single(2.0, -1);
        // resolvent(s, s) is the zero function
        let r = resolvent_consistency(2.0, 2.0, &s, 4.0 * PI).unwrap();
        assert!(r.geometric_term.abs() < 1e-15 && r.zeta_side.abs() < 1e-15);
        assert!(r.identity_term.abs() < 1e-12 && r.digamma_side.abs() < 1e-15);
    }

    #[test]
    fn resolvent_identity_on_single_class() {
        let s = single(1.5, -1);
        let r = resolvent_consistency(1.8, 2.6, &s, 4.0 * PI).unwrap();
        // one primitive class, all powers below the cutoff: only n = 1 enters the geometric side
        assert!(r.identity_residual < 1e-8, "{r:?}");
        let full = resolvent_consistency(1.8, 2.6, &with_powers(1.5, -1, 60.0), 4.0 * PI).unwrap();
        assert!(full.geometric_residual < 1e-14, "{full:?}");
    }

    fn with_powers(l: f64, chi: i8, cutoff: f64) -> LengthSpectrum {
        let classes = (1..)
            .take_while(|&n| n as f64 * l <= cutoff)
            .map(|n: u32| GeodesicClass {
                primitive_length: l,
                power: n,
                chi_value: chi.pow(n),
                multiplicity: 1,
                representative: Word::empty(),
            })
            .collect();
        LengthSpectrum { cutoff, method: Method::Pruned, classes, group_fingerprint: "p".into() }
    }

    #[test]
    fn product_needs_constants() {
        let e = zeta_product_rep(c(1.0, 0.0), &[1.0], None, &ProductConstants::default(), 4.0 * PI);
        match e {
            Err(Error::Config(m)) => assert!(m.contains("N") && m.contains("gamma_d") && m.contains("leading")),
            other => panic!("{other:?}"),
        }
        let zero = zeta_product_rep(c(1.0, 0.0), &[0.0, 0.0, 1.0], Some(1), &consts(1), 4.0 * PI);
        assert!(matches!(zero, Err(Error::Config(_))));
    }

    #[test]
    fn planted_zero_is_exact() {
        let rhos = [0.0, 1.3, 2.05, 2.9];
        let k = consts(1);
        let at = zeta_product_rep(c(0.5, 2.05), &rhos, None, &k, 4.0 * PI).unwrap().complex();
        let off = zeta_product_rep(c(0.5, 2.15), &rhos, None, &k, 4.0 * PI).unwrap().complex();
        assert!(at.norm() < 1e-6 * off.norm(), "{at} {off}");
        assert!(off.norm() > 0.0);
    }

    #[test]
    fn order_at_half_is_two_n() {
        for n in [0u32, 1, 2] {
            let mut rhos = vec![0.0; n as usize];
            rhos.extend([1.1, 2.3]);
            let k = consts(n);
            let ord = measured_order(
                |s| zeta_product_rep(s, &rhos, None, &k, 4.0 * PI).map(|v| c(v.log_value[0], v.log_value[1])),
                c(0.5, 0.0),
                0.3,
            )
            .unwrap();
            assert!((ord - 2.0 * n as f64).abs() < 1e-3, "N={n}: {ord}");
        }
    }

    #[test]
    fn trivial_zero_order_from_barnes_factor() {
        // order 2(n+1) A/2pi at s = -1/2 - n from G^2(s+1/2)
        let k = consts(1);
        let rhos = [0.0, 1.1, 2.3];
        for n in 0..3 {
            let ord = measured_order(
                |s| zeta_product_rep(s, &rhos, None, &k, 4.0 * PI).map(|v| c(v.log_value[0], v.log_value[1])),
                c(-0.5 - n as f64, 0.0),
                0.7,
            )
            .unwrap();
            assert!((ord - 4.0 * (n as f64 + 1.0)).abs() < 1e-3, "n={n}: {ord}");
        }
    }

    #[test]
    fn barnes_factor_at_three_halves() {
        // G(2) = 1: the bracket reduces to (2 pi)^-1 e^2
        let k = ProductConstants { n: Some(0), gamma_d: Some(0.0), leading: Some(1.0) };
        let v = zeta_product_rep(c(1.5, 0.0), &[], None, &k, 2.0 * PI).unwrap();
        let expect = 1.0 + (-(2.0 * PI).ln() + 2.0);
        assert!((v.log_value[0] - expect).abs() < 1e-12, "{v:?}");
        assert_eq!(v.tail, f64::INFINITY);
    }

    #[test]
    fn product_tail_shrinks_with_list() {
        let k = consts(0);
        let short: Vec<f64> = (1..50).map(|j| (j as f64).sqrt()).collect();
        let long: Vec<f64> = (1..5000).map(|j| (j as f64).sqrt()).collect();
        let a = zeta_product_rep(c(0.7, 0.4), &short, None, &k, 4.0 * PI).unwrap();
        let b = zeta_product_rep(c(0.7, 0.4), &long, None, &k, 4.0 * PI).unwrap();
        assert!(b.tail < a.tail / 50.0);
        let d = (c(a.log_value[0], a.log_value[1]) - c(b.log_value[0], b.log_value[1])).norm();
        assert!(d < 2.0 * a.tail, "{d} vs {}", a.tail);
    }
}
