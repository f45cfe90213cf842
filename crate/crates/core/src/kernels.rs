//! Point-pair invariants built from test functions, their automorphic
//! Poincare sums, and the two local trace ingredients: the diagonal trace and
//! the hyperbolic orbital integral.
//!
//! For a test function `h` the profile is
//!
//! ```text
//! Phi(sigma) = (1/pi) int H(sigma; rho) h(rho) d rho,   rho = x - i eps,
//! ```
//!
//! which is purely imaginary; [`PointPairKernel`] stores `Psi = -i Phi`, so
//! `K = -i A Phi B = A Psi B`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fuchsian::{walk_ball, DirichletDomain, MultiplierSystem, SurfacePresentation, DEFAULT_BUDGET};
use crate::moebius::{apply, distance, factor_j, pair_products, sigma_minus_one, Mat2};
use crate::quadrature::{integrate_breaks, integrate_real, QuadOptions};
use crate::specfun::{green_free, h_kernel_sm1};
use crate::testfn::TestFunction;

pub type Matrix2 = [[Complex64; 2]; 2];

/// Default distance of the shifted contour below the real axis.
pub const DEFAULT_SHIFT: f64 = 0.1;

const CHEB_DEGREE: usize = 24;
/// Profile magnitude below which the kernel is treated as zero.
const NEGLIGIBLE: f64 = 1e-17;
const MAX_TABLE_DISTANCE: f64 = 40.0;

fn zero() -> Matrix2 {
    [[Complex64::new(0.0, 0.0); 2]; 2]
}

fn assemble(p: [Complex64; 4], v: [Complex64; 2]) -> Matrix2 {
    [[p[0] * v[0], p[1] * v[1]], [p[2] * v[1], p[3] * v[0]]]
}

/// Power-law envelope `|Psi_i(sigma)| <= coefficient * sigma^exponent`
/// fitted on `sigma in [2, 100]`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub coefficient: f64,
}

impl DecayFit {
    pub fn bound(&self, sigma: f64) -> f64 {
        self.coefficient * sigma.powf(self.exponent)
    }
}

struct ChebPanel {
    a: f64,
    b: f64,
    coef: [Vec<f64>; 2],
}

impl ChebPanel {
    fn eval(&self, x: f64) -> [f64; 2] {
        let t = (2.0 * x - self.a - self.b) / (self.b - self.a);
        self.coef.each_ref().map(|c| {
            let (mut b1, mut b2) = (0.0, 0.0);
            for &ck in c.iter().skip(1).rev() {
                let b0 = 2.0 * t * b1 - b2 + ck;
                b2 = b1;
                b1 = b0;
            }
            t * b1 - b2 + c[0]
        })
    }
}

/// Piecewise Chebyshev interpolant of `(Psi1, sinh(d/2) Psi2)` in the
/// distance `d`, on `[d_min, d_max]`.
struct ProfileTable {
    panels: Vec<ChebPanel>,
    d_min: f64,
    d_max: f64,
}

impl ProfileTable {
    fn build(k: &PointPairKernel) -> Result<ProfileTable> {
        let mut edges = vec![];
        let mut x = 1.0;
        for _ in 0..10 {
            edges.push(x);
            x *= 0.5;
        }
        edges.reverse();
        let d_max = k.negligible_distance()?;
        let mut x = 1.5;
        while x < d_max + 0.5 {
            edges.push(x);
            x += 0.5;
        }
        let n = CHEB_DEGREE;
        let mut panels = Vec::with_capacity(edges.len());
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mut vals = [vec![0.0; n], vec![0.0; n]];
            for j in 0..n {
                let t = (PI * (j as f64 + 0.5) / n as f64).cos();
                let d = 0.5 * (a + b) + 0.5 * (b - a) * t;
                let s = (0.5 * d).sinh();
                let [p1, p2] = k.profile(s * s)?;
                vals[0][j] = p1;
                vals[1][j] = p2 * s;
            }
            let coef = vals.each_ref().map(|v| {
                (0..n)
                    .map(|m| {
                        let c: f64 = (0..n)
                            .map(|j| v[j] * (PI * m as f64 * (j as f64 + 0.5) / n as f64).cos())
                            .sum();
                        c * if m == 0 { 1.0 } else { 2.0 } / n as f64
                    })
                    .collect()
            });
            panels.push(ChebPanel { a, b, coef });
        }
        Ok(ProfileTable { d_min: edges[0], d_max: *edges.last().unwrap(), panels })
    }

    fn eval(&self, d: f64) -> Option<[f64; 2]> {
        if d < self.d_min {
            return None;
        }
        if d > self.d_max {
            return Some([0.0, 0.0]);
        }
        let i = self.panels.partition_point(|p| p.b < d).min(self.panels.len() - 1);
        let [p1, q2] = self.panels[i].eval(d);
        Some([p1, q2 / (0.5 * d).sinh()])
    }
}

/// Point-pair invariant `K(z1, z2) = A(z1, z2) Psi(sigma) B(z1, z2)` of a
/// test function.
pub struct PointPairKernel {
    h: TestFunction,
    shift: f64,
    opts: QuadOptions,
    memo: RwLock<HashMap<u64, [f64; 2]>>,
    decay: OnceLock<DecayFit>,
    table: OnceLock<ProfileTable>,
}

impl std::fmt::Debug for PointPairKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PointPairKernel").field("h", &self.h).field("shift", &self.shift).finish()
    }
}

pub fn build_point_pair(h: TestFunction) -> Result<PointPairKernel> {
    PointPairKernel::with_shift(h, DEFAULT_SHIFT)
}

impl PointPairKernel {
    pub fn with_shift(h: TestFunction, shift: f64) -> Result<PointPairKernel> {
        if !(shift > 0.0 && shift < h.beta()) {
            return Err(Error::Domain(format!(
                "contour shift {shift} must lie in (0, {}) for {}",
                h.beta(),
                h.name()
            )));
        }
        Ok(PointPairKernel {
            h,
            shift,
            opts: QuadOptions::with_tol(1e-14, 1e-11),
            memo: RwLock::new(HashMap::new()),
            decay: OnceLock::new(),
            table: OnceLock::new(),
        })
    }

    pub fn with_options(mut self, opts: QuadOptions) -> Self {
        self.opts = opts;
        self
    }

    pub fn test_function(&self) -> &TestFunction {
        &self.h
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// `Phi(1 + sm1)`, without caching.
    ///
    /// For the resolvent difference the contour closes in the lower
    /// half-plane on the poles of `h`, giving
    /// `Phi = H(-i a)/a - H(-i b)/b` with `a = s - 1/2`, `b = sigma - 1/2`.
    /// Other families are integrated along the shifted contour.
    pub fn phi(&self, sm1: f64) -> Result<[Complex64; 2]> {
        if let TestFunction::ResolventDifference { s, sigma } = self.h {
            let (a, b) = (s - 0.5, sigma - 0.5);
            let ha = h_kernel_sm1(sm1, Complex64::new(0.0, -a))?;
            let hb = h_kernel_sm1(sm1, Complex64::new(0.0, -b))?;
            return Ok([ha[0] / a - hb[0] / b, ha[1] / a - hb[1] / b]);
        }
        self.phi_contour(sm1)
    }

    /// `Phi(1 + sm1)` by quadrature along the shifted contour.
    pub fn phi_contour(&self, sm1: f64) -> Result<[Complex64; 2]> {
        let eps = self.shift;
        let mut err = None;
        let f = |x: f64| {
            // rho and -conj(rho) both lie on the contour
            let mut acc = [Complex64::new(0.0, 0.0); 2];
            for rho in [Complex64::new(x, -eps), Complex64::new(-x, -eps)] {
                match h_kernel_sm1(sm1, rho) {
                    Ok(hk) => {
                        let w = self.h.eval(rho);
                        acc[0] += hk[0] * w;
                        acc[1] += hk[1] * w;
                    }
                    Err(e) => err = Some(e),
                }
            }
            acc
        };
        let mut out = [Complex64::new(0.0, 0.0); 2];
        let f = std::cell::RefCell::new(f);
        for (c, o) in out.iter_mut().enumerate() {
            let v = self.h.integrate_half_line(|x| (f.borrow_mut())(x)[c], self.opts)?;
            *o = v / PI;
        }
        if let Some(e) = err {
            return Err(e);
        }
        Ok(out)
    }

    /// `Psi = -i Phi` at `sigma = 1 + sm1`, memoised.
    pub fn profile(&self, sm1: f64) -> Result<[f64; 2]> {
        let key = sm1.to_bits();
        if let Some(v) = self.memo.read().unwrap().get(&key) {
            return Ok(*v);
        }
        let [p1, p2] = self.phi(sm1)?;
        let i = Complex64::i();
        let v = [(-i * p1).re, (-i * p2).re];
        self.memo.write().unwrap().insert(key, v);
        Ok(v)
    }

    /// Profile at distance `d` from the interpolation table (built on first
    /// use), falling back to quadrature close to the diagonal.
    pub fn profile_at_distance(&self, d: f64) -> Result<[f64; 2]> {
        let table = match self.table.get() {
            Some(t) => t,
            None => {
                let t = ProfileTable::build(self)?;
                self.table.get_or_init(|| t)
            }
        };
        match table.eval(d) {
            Some(v) => Ok(v),
            None => {
                let s = (0.5 * d).sinh();
                self.profile(s * s)
            }
        }
    }

    /// Fitted power-law decay of the profile on `sigma in [2, 100]`.
    pub fn decay_fit(&self) -> Result<DecayFit> {
        if let Some(d) = self.decay.get() {
            return Ok(*d);
        }
        let n = 24;
        let mut pts = Vec::with_capacity(n);
        for j in 0..n {
            let s = 2.0 * 50f64.powf(j as f64 / (n - 1) as f64);
            let [a, b] = self.profile(s - 1.0)?;
            pts.push((s.ln(), a.abs().max(b.abs())));
        }
        // running maximum from the right turns the oscillating profile into a
        // non-increasing envelope
        for j in (0..n - 1).rev() {
            pts[j].1 = pts[j].1.max(pts[j + 1].1);
        }
        let pts: Vec<(f64, f64)> =
            pts.into_iter().map(|(x, y)| (x, y.max(NEGLIGIBLE).ln())).collect();
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let exponent = sxy / sxx;
        let coefficient = pts.iter().map(|p| (p.1 - exponent * p.0).exp()).fold(0.0, f64::max);
        let fit = DecayFit { exponent, coefficient };
        Ok(*self.decay.get_or_init(|| fit))
    }

    /// Distance beyond which the profile stays below the negligible level,
    /// located by scanning the computed profile.
    fn negligible_distance(&self) -> Result<f64> {
        let mut last_big = 0.0;
        let mut d = 1.0;
        while d <= MAX_TABLE_DISTANCE {
            let s = (0.5 * d).sinh();
            let [a, b] = self.profile(s * s)?;
            if a.abs().max(b.abs()) > NEGLIGIBLE {
                last_big = d;
            } else if d > last_big + 3.0 {
                break;
            }
            d += 0.5;
        }
        Ok((last_big + 1.0).min(MAX_TABLE_DISTANCE))
    }

    /// Largest profile magnitude on `[d, d_max]` sampled from the table, an
    /// envelope for the truncation tail of Poincare sums.
    fn envelope_beyond(&self, d: f64) -> Result<f64> {
        let mut m: f64 = 0.0;
        let mut x = d;
        while x <= MAX_TABLE_DISTANCE {
            let [a, b] = self.profile_at_distance(x)?;
            m = m.max(a.abs()).max(b.abs());
            x += 0.05;
        }
        Ok(m)
    }
}

/// `K(z1, z2)`; the points must be distinct.
pub fn kernel_eval(k: &PointPairKernel, z1: Complex64, z2: Complex64) -> Result<Matrix2> {
    let p = pair_products(z1, z2)?;
    let [a, b] = k.profile(sigma_minus_one(z1, z2))?;
    Ok(assemble(p, [Complex64::new(a, 0.0), Complex64::new(b, 0.0)]))
}

/// `K(z1, z2)` with the profile taken from the interpolation table.
pub fn kernel_eval_tabulated(k: &PointPairKernel, z1: Complex64, z2: Complex64) -> Result<Matrix2> {
    let p = pair_products(z1, z2)?;
    let [a, b] = k.profile_at_distance(distance(z1, z2))?;
    Ok(assemble(p, [Complex64::new(a, 0.0), Complex64::new(b, 0.0)]))
}

/// `rho coth(pi rho)`, with the removable value `1/pi` at zero.
fn rho_coth(r: f64) -> f64 {
    if r < 1e-4 {
        1.0 / PI + PI * r * r / 3.0
    } else if r < 1.0 {
        r / (PI * r).tanh()
    } else {
        // coth(x) = 1 + 2 sum_n e^{-2nx}
        let q = (-2.0 * PI * r).exp();
        let mut s = 0.0;
        let mut qn = q;
        while qn > 1e-18 {
            s += qn;
            qn *= q;
        }
        r * (1.0 + 2.0 * s)
    }
}

/// `tr K(z, z) = (1/2pi) int rho h(rho) coth(pi rho) d rho`.
pub fn kernel_diagonal_trace(h: &TestFunction) -> Result<f64> {
    let opts = QuadOptions::with_tol(1e-15, 1e-13);
    let v = h.integrate_half_line_split(|r| Complex64::new(rho_coth(r) * h.eval_real(r), 0.0), &[1.0], opts)?;
    Ok(v.re / PI)
}

/// Both sides of the orbital-integral identity for `gamma^n`,
/// `gamma = diag(e^(l/2), e^(-l/2))`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OrbitalIntegral {
    pub quadrature: f64,
    pub closed_form: f64,
    /// Bound on the part of the strip cut off at `|x/y| > truncation`.
    pub truncation_tail: f64,
    pub truncation: f64,
    pub evaluations: usize,
}

/// `int_1^(e^l) int_R tr K(z, gamma^n z) dx dy/y^2` by adaptive product
/// quadrature, next to the closed form `l g(nl) / sinh(nl/2)`.
pub fn orbital_integral(k: &PointPairKernel, l: f64, n: u32) -> Result<OrbitalIntegral> {
    if !(l > 0.0) || n == 0 {
        return Err(Error::Domain(format!("orbital integral needs l > 0 and n >= 1, got l={l}, n={n}")));
    }
    let big_l = n as f64 * l;
    let closed_form = l * k.h.g(big_l) / (0.5 * big_l).sinh();
    // sigma(z, e^L z) = kappa u^2 + sigma0 with u = x/y
    let el = big_l.exp();
    let kappa = (el - 1.0).powi(2) / (4.0 * el);
    let sigma0 = (0.5 * big_l).cosh().powi(2);
    let fit = k.decay_fit()?;
    if fit.exponent >= -0.5 {
        return Err(Error::Numerical(format!(
            "kernel decay exponent {:.3} too slow to truncate the strip",
            fit.exponent
        )));
    }
    // tail of 2 * 2 * l * int_U^inf C (kappa u^2)^p du below 1e-12
    let p = fit.exponent;
    let tail_at = |u: f64| 4.0 * l * fit.coefficient * kappa.powf(p) * u.powf(2.0 * p + 1.0) / (-2.0 * p - 1.0);
    let mut u_max = ((sigma0 - 1.0).max(1.0) / kappa).sqrt();
    while tail_at(u_max) > 1e-12 && u_max < 1e8 {
        u_max *= 1.25;
    }
    let truncation_tail = tail_at(u_max);
    let opts = QuadOptions::with_tol(1e-12, 1e-10);
    let mut evaluations = 0usize;
    let mut failure = None;
    let outer = |y: f64| -> f64 {
        let xm = u_max * y;
        // resolve the kernel's scale |x| ~ y / sqrt(kappa) on both sides
        let mut pos = vec![];
        let mut w = y / kappa.sqrt();
        while w < xm {
            pos.push(w);
            w *= 4.0;
        }
        pos.push(xm);
        let mut g: Vec<f64> = pos.iter().rev().map(|b| -b).collect();
        g.push(0.0);
        g.extend(pos);
        let mut inner = |x: f64| {
            evaluations += 1;
            let z = Complex64::new(x, y);
            let w = z * el;
            match pair_products(z, w).and_then(|pp| {
                let [a, _] = k.profile(sigma_minus_one(z, w))?;
                Ok((pp[0] + pp[3]) * a)
            }) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        };
        match integrate_breaks(&mut inner, &g, opts) {
            Ok(r) => r.value.re / (y * y),
            Err(e) => {
                failure = Some(e);
                0.0
            }
        }
    };
    let (quadrature, _) = integrate_real(outer, 1.0, l.exp(), opts)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(OrbitalIntegral { quadrature, closed_form, truncation_tail, truncation: u_max, evaluations })
}

/// Reusable data for Poincare sums over a surface group.
pub struct PoincareSeries {
    pub domain: DirichletDomain,
    pub multiplier: MultiplierSystem,
    pub area: f64,
    pub budget: u64,
}

/// A truncated Poincare sum and its estimated remainder.
#[derive(Clone, Copy, Debug)]
pub struct PoincareValue {
    pub value: Matrix2,
    pub tail: f64,
    pub terms: u64,
}

impl PoincareSeries {
    pub fn new(p: &SurfacePresentation, ms: &MultiplierSystem) -> Result<PoincareSeries> {
        if ms.weight_parity != 1 {
            return Err(Error::Config(
                "the Dirac kernels carry weights (1, -1) and need a multiplier system of odd weight".into(),
            ));
        }
        Ok(PoincareSeries {
            domain: DirichletDomain::compute(p)?,
            multiplier: ms.clone(),
            area: p.area,
            budget: DEFAULT_BUDGET,
        })
    }

    /// `(1/2) sum_{gamma in lifted group, d(z1, gamma z2) <= ball}
    /// F(z1, gamma z2) chi(gamma) J_gamma(z2)` with
    /// `J = diag(j(., 1), j(., -1))`; both lifts `+-M` are summed.
    fn sum<F>(&self, z1: Complex64, z2: Complex64, ball: f64, mut f: F) -> Result<(Matrix2, u64)>
    where
        F: FnMut(Complex64, Complex64) -> Result<Matrix2>,
    {
        let o = Complex64::i();
        let radius = ball + distance(o, z1) + distance(o, z2);
        let mut acc = zero();
        let mut terms = 0u64;
        let mut failure = None;
        walk_ball(&self.domain, radius, self.budget, |m, parity| {
            if failure.is_some() {
                return;
            }
            let w = apply(m, z2);
            if distance(z1, w) > ball {
                return;
            }
            let kv = match f(z1, w) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            };
            terms += 1;
            for negated in [false, true] {
                let lift = if negated { m.neg() } else { *m };
                let chi = self.multiplier.chi_lift(parity, negated) as f64;
                let j = [factor_j(&lift, z2, 1), factor_j(&lift, z2, -1)];
                for r in 0..2 {
                    for c in 0..2 {
                        acc[r][c] += 0.5 * chi * kv[r][c] * j[c];
                    }
                }
            }
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok((acc, terms))
    }

    /// Orbit-counting estimate `(2 pi / area) int_ball^inf env(r) sinh r dr`.
    fn tail_estimate<E: Fn(f64) -> f64>(&self, ball: f64, env: E) -> f64 {
        let mut t = 0.0;
        let dr = 0.05;
        let mut r = ball;
        while r < ball + 60.0 {
            t += env(r + 0.5 * dr) * (r + 0.5 * dr).sinh() * dr;
            r += dr;
        }
        2.0 * PI / self.area * t
    }

    /// Automorphic kernel `K_Gamma(z1, z2)`.
    pub fn kernel(&self, k: &PointPairKernel, z1: Complex64, z2: Complex64, ball: f64) -> Result<PoincareValue> {
        let (value, terms) = self.sum(z1, z2, ball, |a, b| kernel_eval_tabulated(k, a, b))?;
        let e0 = k.envelope_beyond(ball)?;
        // the envelope only decreases beyond the table, where it is negligible
        let mut samples = Vec::new();
        let mut r = ball;
        while r <= MAX_TABLE_DISTANCE {
            samples.push((r, k.envelope_beyond(r)?));
            r += 0.5;
        }
        let env = |r: f64| {
            samples.iter().rev().find(|s| s.0 <= r).map(|s| s.1).unwrap_or(e0)
        };
        // entries of A and B have modulus one
        let tail = self.tail_estimate(ball, env);
        Ok(PoincareValue { value, tail, terms })
    }

    /// Automorphic Green's function `G_Gamma(z1, z2; rho)`, `Im rho < -1/2`.
    pub fn green(&self, z1: Complex64, z2: Complex64, rho: Complex64, ball: f64) -> Result<PoincareValue> {
        if !(rho.im < -0.5) {
            return Err(Error::Domain(format!(
                "the automorphic Green's function needs Im rho < -1/2, got {rho}"
            )));
        }
        let (value, terms) = self.sum(z1, z2, ball, |a, b| green_free(a, b, rho))?;
        let alpha = 0.5 - rho.im;
        let c = green_decay_constant(rho)?;
        let tail = self.tail_estimate(ball, |r| c * rho.norm() * (-alpha * r).exp());
        Ok(PoincareValue { value, tail, terms })
    }
}

/// Constant in `|H_i(sigma(d); rho)| <= C |rho| e^(-(1/2 - Im rho) d)`, fitted
/// on `d in [3, 10]`.
pub fn green_decay_constant(rho: Complex64) -> Result<f64> {
    let alpha = 0.5 - rho.im;
    let mut c: f64 = 0.0;
    for j in 0..=28 {
        let d = 3.0 + 0.25 * j as f64;
        let s = (0.5 * d).sinh();
        let [a, b] = h_kernel_sm1(s * s, rho)?;
        c = c.max(a.norm().max(b.norm()) * (alpha * d).exp() / rho.norm());
    }
    Ok(c)
}

/// [`PoincareSeries::kernel`] for a single evaluation.
pub fn automorphic_kernel(
    k: &PointPairKernel,
    z1: Complex64,
    z2: Complex64,
    p: &SurfacePresentation,
    ms: &MultiplierSystem,
    ball: f64,
) -> Result<PoincareValue> {
    PoincareSeries::new(p, ms)?.kernel(k, z1, z2, ball)
}

/// [`PoincareSeries::green`] for a single evaluation.
pub fn green_automorphic(
    z1: Complex64,
    z2: Complex64,
    rho: Complex64,
    p: &SurfacePresentation,
    ms: &MultiplierSystem,
    ball: f64,
) -> Result<PoincareValue> {
    PoincareSeries::new(p, ms)?.green(z1, z2, rho, ball)
}

/// `J_M(z) = diag(j_M(z, 1), j_M(z, -1))`.
pub fn spinor_factor(m: &Mat2, z: Complex64) -> [Complex64; 2] {
    [factor_j(m, z, 1), factor_j(m, z, -1)]
}

/// `J1 X J2^-1` for diagonal `J1`, `J2`.
pub fn conjugate_by(j1: [Complex64; 2], x: &Matrix2, j2: [Complex64; 2]) -> Matrix2 {
    let mut out = zero();
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = j1[r] * x[r][c] / j2[c];
        }
    }
    out
}

pub fn max_entry_diff(a: &Matrix2, b: &Matrix2) -> f64 {
    let mut m: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            m = m.max((a[r][c] - b[r][c]).norm());
        }
    }
    m
}

/// `S A^dagger S` with `S = diag(1, -1)`.
pub fn chiral_adjoint(a: &Matrix2) -> Matrix2 {
    let b = adjoint(a);
    [[b[0][0], -b[0][1]], [-b[1][0], b[1][1]]]
}

pub fn adjoint(a: &Matrix2) -> Matrix2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}
