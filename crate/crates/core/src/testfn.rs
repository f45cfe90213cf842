//! Admissible test functions `h(rho)`, their Fourier transforms
//! `g(u) = (1/2pi) int h(rho) e^{-i rho u} d rho`, and the contour functional
//! `Lambda(rho)`.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_breaks, integrate_to_infinity, QuadOptions};

/// `e^{-x}` drops below `1e-18` beyond this `x`.
const NEGLIGIBLE_EXPONENT: f64 = 42.0;
/// Distance kept from the nearest pole when certifying the strip.
const POLE_MARGIN: f64 = 1e-3;
/// Strip half-width reported for entire families.
const ENTIRE_BETA: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TestFunction {
    /// `e^{-t rho^2}`
    Gaussian { t: f64 },
    /// `e^{-(rho-a)^2/eps^2} + e^{-(rho+a)^2/eps^2}`
    PeakedPair { a: f64, eps: f64 },
    /// `1/(rho^2 + (s-1/2)^2) - 1/(rho^2 + (sigma-1/2)^2)`
    ResolventDifference { s: f64, sigma: f64 },
}

impl TestFunction {
    pub fn gaussian(t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Admissibility(format!("gaussian width t must be positive, got {t}")));
        }
        Ok(TestFunction::Gaussian { t })
    }

    pub fn peaked_pair(a: f64, eps: f64) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite()) || !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Admissibility(format!(
                "peaked pair needs a >= 0 and eps > 0, got a = {a}, eps = {eps}"
            )));
        }
        Ok(TestFunction::PeakedPair { a, eps })
    }

    pub fn resolvent(s: f64, sigma: f64) -> Result<Self> {
        if !(s > 1.0 && sigma > 1.0 && s.is_finite() && sigma.is_finite()) {
            return Err(Error::Admissibility(format!(
                "resolvent difference needs s, sigma > 1, got s = {s}, sigma = {sigma}"
            )));
        }
        Ok(TestFunction::ResolventDifference { s, sigma })
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestFunction::Gaussian { .. } => "gaussian",
            TestFunction::PeakedPair { .. } => "peaked_pair",
            TestFunction::ResolventDifference { .. } => "resolvent_difference",
        }
    }

    pub fn eval(&self, rho: Complex64) -> Complex64 {
        match *self {
            TestFunction::Gaussian { t } => (-t * rho * rho).exp(),
            TestFunction::PeakedPair { a, eps } => {
                let e2 = eps * eps;
                (-(rho - a) * (rho - a) / e2).exp() + (-(rho + a) * (rho + a) / e2).exp()
            }
            TestFunction::ResolventDifference { s, sigma } => {
                let (p, q) = (s - 0.5, sigma - 0.5);
                (rho * rho + p * p).inv() - (rho * rho + q * q).inv()
            }
        }
    }

    pub fn eval_real(&self, r: f64) -> f64 {
        match *self {
            TestFunction::Gaussian { t } => (-t * r * r).exp(),
            TestFunction::PeakedPair { a, eps } => {
                let e2 = eps * eps;
                (-(r - a) * (r - a) / e2).exp() + (-(r + a) * (r + a) / e2).exp()
            }
            TestFunction::ResolventDifference { s, sigma } => {
                let (p, q) = (s - 0.5, sigma - 0.5);
                1.0 / (r * r + p * p) - 1.0 / (r * r + q * q)
            }
        }
    }

    /// Closed-form Fourier transform `g(u)`.
    pub fn g(&self, u: f64) -> f64 {
        match *self {
            TestFunction::Gaussian { t } => (-u * u / (4.0 * t)).exp() / (2.0 * (PI * t).sqrt()),
            TestFunction::PeakedPair { a, eps } => {
                eps / (2.0 * PI.sqrt()) * (-eps * eps * u * u / 4.0).exp() * 2.0 * (a * u).cos()
            }
            TestFunction::ResolventDifference { s, sigma } => {
                let u = u.abs();
                (-(s - 0.5) * u).exp() / (2.0 * s - 1.0) - (-(sigma - 0.5) * u).exp() / (2.0 * sigma - 1.0)
            }
        }
    }

    /// Upper bound for `|g|` on `[u, inf)`.
    pub fn g_envelope(&self, u: f64) -> f64 {
        let u = u.abs();
        match *self {
            TestFunction::Gaussian { .. } => self.g(u).abs(),
            TestFunction::PeakedPair { eps, .. } => eps / PI.sqrt() * (-eps * eps * u * u / 4.0).exp(),
            TestFunction::ResolventDifference { s, sigma } => {
                (-(s - 0.5) * u).exp() / (2.0 * s - 1.0) + (-(sigma - 0.5) * u).exp() / (2.0 * sigma - 1.0)
            }
        }
    }

    /// Half-width of the strip `|Im rho| <= beta` on which `h` is certified
    /// analytic.
    pub fn beta(&self) -> f64 {
        match *self {
            TestFunction::Gaussian { .. } | TestFunction::PeakedPair { .. } => ENTIRE_BETA,
            TestFunction::ResolventDifference { s, sigma } => s.min(sigma) - 0.5 - POLE_MARGIN,
        }
    }

    /// Panel boundaries on `[0, end]` resolving the features of `h`, and
    /// whether a tail beyond `end` must be integrated.
    pub fn half_line_panels(&self) -> (Vec<f64>, bool) {
        match *self {
            TestFunction::Gaussian { t } => {
                let w = (NEGLIGIBLE_EXPONENT / t).sqrt();
                (vec![0.0, 0.25 * w, 0.5 * w, w], false)
            }
            TestFunction::PeakedPair { a, eps } => {
                let reach = NEGLIGIBLE_EXPONENT.sqrt() * eps;
                let mut b = vec![0.0];
                for k in [-1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0] {
                    let x = a + k * reach;
                    if x > 0.0 {
                        b.push(x);
                    }
                }
                b.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
                (b, false)
            }
            TestFunction::ResolventDifference { s, sigma } => {
                let m = (s.max(sigma) - 0.5).max(1.0);
                (vec![0.0, 0.5 * m, m, 4.0 * m], true)
            }
        }
    }

    /// `int_0^inf f(x) dx` for integrands carrying `h(x)` as a factor.
    pub fn integrate_half_line<F: FnMut(f64) -> Complex64>(&self, f: F, opts: QuadOptions) -> Result<Complex64> {
        self.integrate_half_line_split(f, &[], opts)
    }

    /// As [`integrate_half_line`](Self::integrate_half_line) with extra panel
    /// boundaries.
    pub fn integrate_half_line_split<F: FnMut(f64) -> Complex64>(
        &self,
        mut f: F,
        extra: &[f64],
        opts: QuadOptions,
    ) -> Result<Complex64> {
        let (mut panels, tail) = self.half_line_panels();
        let end = *panels.last().unwrap();
        panels.extend(extra.iter().copied().filter(|&x| x > 0.0 && x < end));
        panels.sort_by(f64::total_cmp);
        panels.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
        let mut v = integrate_breaks(&mut f, &panels, opts)?.value;
        if tail {
            v += integrate_to_infinity(&mut f, *panels.last().unwrap(), opts)?.value;
        }
        Ok(v)
    }
}

/// Result of [`validate_admissible`].
#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub family: String,
    pub beta: f64,
    pub delta: f64,
    pub decay_constant: f64,
    pub max_evenness_residual: f64,
}

/// Checks evenness and the strip decay `|h(x+iy)| <= C (1+|x|)^{-2-delta}`
/// on `|y| <= beta` by sampling.
pub fn validate_admissible_with<F: Fn(Complex64) -> Complex64>(
    h: F,
    beta: f64,
    delta: f64,
    family: &str,
) -> Result<AdmissibilityReport> {
    if beta < 0.5 {
        return Err(Error::Admissibility(format!(
            "strip half-width {beta} is below 1/2: analyticity clause fails"
        )));
    }
    let xs: Vec<f64> = (0..=60).map(|i| (0.25 * i as f64).exp2() - 1.0).collect();
    let ys = [-beta, -0.5 * beta, 0.0, 0.5 * beta, beta];
    let mut even = 0.0f64;
    let mut weighted = Vec::with_capacity(xs.len());
    for &x in &xs {
        let mut w = 0.0f64;
        for &y in &ys {
            let z = Complex64::new(x, y);
            let v = h(z);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Admissibility(format!("h is not finite at {z}: analyticity clause fails")));
            }
            even = even.max((v - h(-z)).norm() / v.norm().max(1e-300).max(1e-12));
            w = w.max(v.norm() * (1.0 + x).powf(2.0 + delta));
        }
        weighted.push(w);
    }
    if even > 1e-10 {
        return Err(Error::Admissibility(format!(
            "evenness clause fails: |h(rho) - h(-rho)| / |h| reaches {even:.3e}"
        )));
    }
    let c = weighted.iter().cloned().fold(0.0f64, f64::max);
    let n = weighted.len();
    // the weighted modulus must not grow over the last decade of samples
    let tail = weighted[n - 8..].iter().cloned().fold(0.0f64, f64::max);
    let mid = weighted[n - 16..n - 8].iter().cloned().fold(0.0f64, f64::max);
    if tail > mid * 1.01 && tail > 1e-300 {
        return Err(Error::Admissibility(format!(
            "decay clause fails: |h|(1+|x|)^(2+{delta}) grows at large x ({mid:.3e} -> {tail:.3e})"
        )));
    }
    Ok(AdmissibilityReport {
        family: family.to_string(),
        beta,
        delta,
        decay_constant: c,
        max_evenness_residual: even,
    })
}

pub fn validate_admissible(h: &TestFunction) -> Result<AdmissibilityReport> {
    validate_admissible_with(|z| h.eval(z), h.beta(), 1.0, h.name())
}

/// `Lambda(rho) = (1/(pi i)) int_{Im rho' = -beta} h(rho') / (rho' - rho) d rho'`,
/// normalised so that `Lambda(rho) + Lambda(-rho) = 2 h(rho)`.
pub fn hs_eigenvalue(h: &TestFunction, rho: f64, beta: f64) -> Result<Complex64> {
    if !(beta > 0.0 && beta <= h.beta() + 1e-12) {
        return Err(Error::Domain(format!(
            "contour Im = -{beta} lies outside the certified strip (beta = {})",
            h.beta()
        )));
    }
    let opts = QuadOptions::with_tol(1e-15, 1e-13);
    let f = |x: f64| {
        let mut s = Complex64::new(0.0, 0.0);
        for xx in [x, -x] {
            let z = Complex64::new(xx, -beta);
            s += h.eval(z) / (z - rho);
        }
        s
    };
    // smooth on the contour; an extra panel boundary near rho helps when beta is small
    let (mut panels, tail) = h.half_line_panels();
    let r = rho.abs();
    if r > 0.0 && r < *panels.last().unwrap() {
        panels.push(r);
        panels.sort_by(f64::total_cmp);
    }
    let mut g = f;
    let mut v = integrate_breaks(&mut g, &panels, opts)?.value;
    if tail {
        v += integrate_to_infinity(&mut g, *panels.last().unwrap(), opts)?.value;
    }
    Ok(v / Complex64::new(0.0, PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_real;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn families() -> Vec<TestFunction> {
        vec![
            TestFunction::gaussian(1.0).unwrap(),
            TestFunction::gaussian(0.3).unwrap(),
            TestFunction::peaked_pair(2.2, 0.1).unwrap(),
            TestFunction::peaked_pair(0.0, 0.5).unwrap(),
            TestFunction::resolvent(2.0, 3.0).unwrap(),
            TestFunction::resolvent(1.8, 2.6).unwrap(),
        ]
    }

    /// `(1/2pi) int h(rho) cos(rho u) d rho` by quadrature.
    fn g_quad(h: &TestFunction, u: f64) -> f64 {
        let opts = QuadOptions::with_tol(1e-13, 1e-13);
        let f = |x: f64| Complex64::new(h.eval_real(x) * (x * u).cos(), 0.0);
        if let TestFunction::ResolventDifference { .. } = h {
            // oscillatory x^-4 tail: finite panels, remainder below 4/(3 X^3)
            let breaks: Vec<f64> = (0..=1000).map(|k| 10.0 * k as f64).collect();
            let mut f = f;
            return integrate_breaks(&mut f, &breaks, QuadOptions::with_tol(1e-12, 1e-12)).unwrap().value.re / PI;
        }
        h.integrate_half_line(f, opts).unwrap().re / PI
    }

    #[test]
    fn closed_form_g_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for h in families() {
            for _ in 0..20 {
                let u: f64 = rng.gen_range(0.0..6.0);
                let (a, b) = (h.g(u), g_quad(&h, u));
                assert!((a - b).abs() < 1e-10, "{h:?} u={u}: {a} vs {b}");
                assert_eq!(h.g(u), h.g(-u));
            }
        }
    }

    #[test]
    fn g_at_zero() {
        let g = TestFunction::gaussian(1.0).unwrap().g(0.0);
        assert!((g - 0.28209479177387814).abs() < 1e-15);
        let h = TestFunction::resolvent(2.0, 3.0).unwrap();
        // 1/(2s-1) - 1/(2 sigma-1) = 1/3 - 1/5
        assert!((h.g(0.0) - 2.0 / 15.0).abs() < 1e-15);
        assert!((g_quad(&h, 0.0) - 2.0 / 15.0).abs() < 1e-12);
        let (q, _) = integrate_real(|x| (-x * x).exp(), -10.0, 10.0, QuadOptions::default()).unwrap();
        assert!((g - q / (2.0 * PI)).abs() < 1e-13);
    }

    #[test]
    fn resolvent_definition_consistency() {
        let h = TestFunction::resolvent(2.0, 3.0).unwrap();
        for r in [0.0, 0.3, 1.7, 12.0] {
            let direct = 1.0 / (r * r + 2.25) - 1.0 / (r * r + 6.25);
            assert!((h.eval_real(r) - direct).abs() < 1e-14);
            assert!((h.eval(Complex64::new(r, 0.0)).re - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn admissibility() {
        for h in families() {
            validate_admissible(&h).unwrap();
        }
        let r = validate_admissible(&TestFunction::resolvent(2.0, 3.0).unwrap()).unwrap();
        assert!(r.beta < 1.5 && r.beta > 1.49);
        // odd perturbation
        let h = TestFunction::gaussian(1.0).unwrap();
        let err = validate_admissible_with(|z| h.eval(z) + z * (-z * z).exp(), 1.0, 1.0, "perturbed")
            .unwrap_err()
            .to_string();
        assert!(err.contains("evenness"), "{err}");
        // slow decay
        let err = validate_admissible_with(|z| (z * z + 4.0).inv(), 1.0, 1.0, "lorentzian")
            .unwrap_err()
            .to_string();
        assert!(err.contains("decay"), "{err}");
        // pole inside the strip
        let err = validate_admissible_with(|z| (z * z + 0.25).inv(), 1.0, 0.0, "narrow")
            .unwrap_err()
            .to_string();
        assert!(err.contains("finite") || err.contains("decay"), "{err}");
    }

    #[test]
    fn lambda_symmetry() {
        for h in [TestFunction::gaussian(1.0).unwrap(), TestFunction::resolvent(2.0, 3.0).unwrap()] {
            let beta = h.beta().min(0.9);
            for rho in [0.0, 0.7, 2.0] {
                let l1 = hs_eigenvalue(&h, rho, beta).unwrap();
                let l2 = hs_eigenvalue(&h, -rho, beta).unwrap();
                let two_h = 2.0 * h.eval_real(rho);
                assert!((l1 + l2 - two_h).norm() < 1e-9, "{h:?} rho={rho}: {}", l1 + l2);
            }
            let l0 = hs_eigenvalue(&h, 0.0, beta).unwrap();
            assert!((l0 - h.eval_real(0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn lambda_contour_independence() {
        let h = TestFunction::gaussian(1.0).unwrap();
        let a = hs_eigenvalue(&h, 1.0, 0.6).unwrap();
        let b = hs_eigenvalue(&h, 1.0, 0.9).unwrap();
        assert!((a - b).norm() < 1e-9);
        assert!(hs_eigenvalue(&TestFunction::resolvent(2.0, 3.0).unwrap(), 1.0, 1.6).is_err());
    }
}
