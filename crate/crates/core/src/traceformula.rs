//! Both sides of the trace formula
//! `sum_m h(rho_m) = (A/4pi) int rho h coth(pi rho) + sum_p sum_n chi l g(nl) / (2 sinh(nl/2))`,
//! eigenvalue extraction by scanning peaked test functions, and Weyl's law.

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fuchsian::LengthSpectrum;
use crate::kernels::kernel_diagonal_trace;
use crate::testfn::TestFunction;

/// Width of the length windows used to fit class growth.
const WINDOW: f64 = 1.0;
/// Fewest non-empty windows needed before a growth model is fitted.
const MIN_WINDOWS: usize = 3;
const MAX_TAIL_WINDOWS: usize = 100_000;

/// Upper model `coefficient * e^(exponent u)` for a per-unit-length density
/// of chi-signed class contributions, fitted on `[L/2, L]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    pub exponent: f64,
    pub coefficient: f64,
    pub windows: usize,
}

impl GrowthFit {
    /// Least-squares slope of `ln |W_j|` over unit windows ending at `cutoff`,
    /// floored at zero, with the coefficient raised until the model dominates
    /// every window. Signed sums fluctuate without trend, so a fitted decay is
    /// not extrapolated.
    pub fn fit(samples: &[(f64, f64)], cutoff: f64) -> Option<GrowthFit> {
        let lo = 0.5 * cutoff;
        let count = ((cutoff - lo) / WINDOW).floor() as usize;
        let mut sums = vec![0.0; count];
        for &(u, w) in samples {
            if u <= cutoff && u > cutoff - count as f64 * WINDOW {
                let j = (((cutoff - u) / WINDOW).floor() as usize).min(count - 1);
                sums[j] += w;
            }
        }
        let pts: Vec<(f64, f64)> = sums
            .iter()
            .enumerate()
            .filter(|(_, s)| s.abs() > 0.0)
            .map(|(j, s)| (cutoff - (j as f64 + 0.5) * WINDOW, (s.abs() / WINDOW).ln()))
            .collect();
        if pts.len() < MIN_WINDOWS {
            return None;
        }
        let n = pts.len() as f64;
        let mu = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let mv = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mu) * (p.1 - mv)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mu).powi(2)).sum();
        let exponent = (sxy / sxx).max(0.0);
        let ln_c = pts.iter().map(|p| p.1 - exponent * p.0).fold(f64::NEG_INFINITY, f64::max);
        Some(GrowthFit { exponent, coefficient: ln_c.exp(), windows: pts.len() })
    }

    /// Upper sum `sum_j c e^(alpha (from + j + 1)) weight(from + j)` over unit
    /// windows beyond `from`, for a non-increasing `weight`. Each window's
    /// total is bounded by the model and weighted by the sup on the window.
    pub fn tail<F: Fn(f64) -> f64>(&self, from: f64, weight: F) -> Result<f64> {
        let mut total = 0.0;
        for j in 0..MAX_TAIL_WINDOWS {
            let u = from + j as f64 * WINDOW;
            let w = weight(u);
            let term = if w == 0.0 {
                0.0
            } else {
                (self.coefficient.ln() + self.exponent * (u + WINDOW) + w.ln()).exp() * WINDOW
            };
            if !term.is_finite() {
                break;
            }
            total += term;
            if term <= 1e-18 * total || (term == 0.0 && j > 0) {
                return Ok(total);
            }
        }
        Err(Error::Truncation(format!(
            "class growth e^({:.3} u) outpaces the test function decay",
            self.exponent
        )))
    }
}

/// `(A/4pi) int_R rho h(rho) coth(pi rho) d rho`.
pub fn identity_term(h: &TestFunction, area: f64) -> Result<f64> {
    if !(area > 0.0) {
        return Err(Error::Domain(format!("area must be positive, got {area}")));
    }
    Ok(0.5 * area * kernel_diagonal_trace(h)?)
}

/// Contribution of one class record to the geometric side.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassContribution {
    pub primitive_length: f64,
    pub power: u32,
    pub chi: i8,
    pub multiplicity: u32,
    pub contribution: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometricTerm {
    pub value: f64,
    pub tail_bound: f64,
    pub growth: Option<GrowthFit>,
    pub per_class: Vec<ClassContribution>,
}

/// `l_p / (2 sinh(n l_p / 2))` times multiplicity and character.
fn class_weight(c: &crate::fuchsian::GeodesicClass) -> f64 {
    c.multiplicity as f64 * c.chi_value as f64 * c.primitive_length / (2.0 * (0.5 * c.length()).sinh())
}

/// Growth model of the chi-signed class weights of `spectrum`.
pub fn geometric_growth(spectrum: &LengthSpectrum) -> Option<GrowthFit> {
    let samples: Vec<(f64, f64)> = spectrum.classes.iter().map(|c| (c.length(), class_weight(c))).collect();
    GrowthFit::fit(&samples, spectrum.cutoff)
}

fn geometric_sum(h: &TestFunction, spectrum: &LengthSpectrum, per_class: bool) -> (f64, Vec<ClassContribution>) {
    let mut value = 0.0;
    let mut out = vec![];
    for c in &spectrum.classes {
        let v = class_weight(c) * h.g(c.length());
        value += v;
        if per_class {
            out.push(ClassContribution {
                primitive_length: c.primitive_length,
                power: c.power,
                chi: c.chi_value,
                multiplicity: c.multiplicity,
                contribution: v,
            });
        }
    }
    (value, out)
}

fn geometric_tail(h: &TestFunction, spectrum: &LengthSpectrum, growth: Option<&GrowthFit>) -> Result<f64> {
    match growth {
        Some(g) => g.tail(spectrum.cutoff, |u| h.g_envelope(u)),
        None => Ok(0.0),
    }
}

/// Double sum over the class records of `spectrum` with a bound on the classes
/// beyond its cutoff. With `tolerance`, a larger bound is a truncation error.
pub fn geometric_term(h: &TestFunction, spectrum: &LengthSpectrum, tolerance: Option<f64>) -> Result<GeometricTerm> {
    let growth = geometric_growth(spectrum);
    let (value, per_class) = geometric_sum(h, spectrum, true);
    let tail_bound = geometric_tail(h, spectrum, growth.as_ref())?;
    check_tail(tail_bound, tolerance, spectrum.cutoff)?;
    Ok(GeometricTerm { value, tail_bound, growth, per_class })
}

fn check_tail(tail: f64, tolerance: Option<f64>, cutoff: f64) -> Result<()> {
    match tolerance {
        Some(t) if tail > t => Err(Error::Truncation(format!(
            "geometric tail bound {tail:.3e} exceeds {t:.3e} at L = {cutoff}; raise L"
        ))),
        _ => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEvaluation {
    pub test_function: TestFunction,
    pub cutoff: f64,
    pub group_fingerprint: String,
    pub area: f64,
    pub identity_term: f64,
    pub geometric_term: f64,
    pub total: f64,
    pub tail_bound: f64,
    pub per_class: Vec<ClassContribution>,
}

/// Right-hand side of the trace formula, the predicted `sum_m h(rho_m)`.
pub fn trace_rhs(h: &TestFunction, spectrum: &LengthSpectrum, area: f64, tolerance: Option<f64>) -> Result<TraceEvaluation> {
    let id = identity_term(h, area)?;
    let geo = geometric_term(h, spectrum, tolerance)?;
    Ok(TraceEvaluation {
        test_function: *h,
        cutoff: spectrum.cutoff,
        group_fingerprint: spectrum.group_fingerprint.clone(),
        area,
        identity_term: id,
        geometric_term: geo.value,
        total: id + geo.value,
        tail_bound: geo.tail_bound,
        per_class: geo.per_class,
    })
}

/// One-line CSV of a trace evaluation.
pub fn trace_csv(t: &TraceEvaluation) -> String {
    format!(
        "family,cutoff,area,identity_term,geometric_term,total,tail_bound\n{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
        t.test_function.name(),
        t.cutoff,
        t.area,
        t.identity_term,
        t.geometric_term,
        t.total,
        t.tail_bound
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanOptions {
    pub rho_max: f64,
    pub eps: f64,
    pub delta_l: f64,
    /// Smallest response accepted as a peak.
    pub threshold: f64,
    /// When set, a geometric tail bound above it aborts the scan.
    pub tail_tolerance: Option<f64>,
}

impl ScanOptions {
    pub fn new(rho_max: f64, eps: f64, delta_l: f64) -> Self {
        ScanOptions { rho_max, eps, delta_l, threshold: 0.25, tail_tolerance: None }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rho_max > 0.0 && self.eps > 0.0 && self.delta_l >= 0.0) {
            return Err(Error::Config(format!(
                "scan needs rho_max > 0, eps > 0, delta_l >= 0, got {}, {}, {}",
                self.rho_max, self.eps, self.delta_l
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenvalueEstimate {
    pub rho: f64,
    pub height: f64,
    /// Shift of the peak under `L -> L + delta_l`.
    pub stability: f64,
    /// Peak area in units of a single eigenvalue's response area.
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanPoint {
    pub a: f64,
    pub response: f64,
    pub response_extended: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub options: ScanOptions,
    pub cutoff: f64,
    pub estimates: Vec<EigenvalueEstimate>,
    /// Response at `a = 0`, reported apart from the peaks.
    pub zero_response: f64,
    /// Largest geometric tail bound met on the grid at cutoff `L`.
    pub tail_bound: f64,
    pub discarded: usize,
    pub grid: Vec<ScanPoint>,
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Maximiser of `f` on `[a, b]` by golden-section search.
fn golden_max<F: FnMut(f64) -> Result<f64>>(f: &mut F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Vertex of the parabola through three equally spaced samples, clamped to
/// the bracket.
fn parabola_vertex(x: f64, step: f64, y: [f64; 3]) -> f64 {
    let den = y[0] - 2.0 * y[1] + y[2];
    if den >= 0.0 {
        return x;
    }
    x + (0.5 * step * (y[0] - y[2]) / den).clamp(-step, step)
}

fn local_maxima(v: &[f64], threshold: f64) -> Vec<usize> {
    (1..v.len().saturating_sub(1)).filter(|&i| v[i] >= threshold && v[i] > v[i - 1] && v[i] >= v[i + 1]).collect()
}

fn refine<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: &[f64], v: &[f64], i: usize, step: f64) -> Result<(f64, f64)> {
    let x0 = parabola_vertex(a[i], step, [v[i - 1], v[i], v[i + 1]]);
    let lo = (x0 - 0.5 * step).max(a[i - 1]);
    let hi = (x0 + 0.5 * step).min(a[i + 1]);
    golden_max(f, lo, hi, 1e-6 * step)
}

/// Scans an arbitrary response `a -> (R_L(a), R_{L+dL}(a))` for peaks.
/// `response(which, a)` evaluates cutoff `L` for `which == 0` and `L + dL`
/// for `which == 1`; the second value of the result is a tail bound.
pub fn scan_response<F: FnMut(usize, f64) -> Result<(f64, f64)>>(
    mut response: F,
    opts: ScanOptions,
    cutoff: f64,
) -> Result<ScanReport> {
    opts.validate()?;
    let step = 0.25 * opts.eps;
    let n = (opts.rho_max / step).ceil() as usize + 2;
    let a: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();
    let mut r0 = Vec::with_capacity(a.len());
    let mut r1 = Vec::with_capacity(a.len());
    let mut tail_bound = 0.0f64;
    for &x in &a {
        let (v, t) = response(0, x)?;
        tail_bound = tail_bound.max(t);
        r0.push(v);
        r1.push(response(1, x)?.0);
    }
    let peaks1 = local_maxima(&r1, opts.threshold);
    let mut estimates = vec![];
    let mut discarded = 0;
    for i in local_maxima(&r0, opts.threshold) {
        if a[i] > opts.rho_max {
            continue;
        }
        let (rho, height) = refine(&mut |x| response(0, x).map(|r| r.0), &a, &r0, i, step)?;
        let Some(&j) = peaks1.iter().min_by_key(|&&j| j.abs_diff(i)).filter(|&&j| j.abs_diff(i) <= 2) else {
            discarded += 1;
            continue;
        };
        let (rho1, _) = refine(&mut |x| response(1, x).map(|r| r.0), &a, &r1, j, step)?;
        let stability = (rho - rho1).abs();
        if stability > 5.0 * opts.eps {
            discarded += 1;
            continue;
        }
        // area between the flanking minima
        let (mut lo, mut hi) = (i, i);
        while lo > 0 && r0[lo - 1] < r0[lo] {
            lo -= 1;
        }
        while hi + 1 < r0.len() && r0[hi + 1] < r0[hi] {
            hi += 1;
        }
        let area: f64 = (lo..hi).map(|k| 0.5 * step * (r0[k] + r0[k + 1])).sum();
        let weight = area / (opts.eps * PI.sqrt());
        estimates.push(EigenvalueEstimate { rho: rho.max(0.0), height, stability, weight });
    }
    let grid = a
        .iter()
        .zip(r0.iter().zip(&r1))
        .map(|(&a, (&response, &response_extended))| ScanPoint { a, response, response_extended })
        .collect();
    Ok(ScanReport { options: opts, cutoff, estimates, zero_response: r0[0], tail_bound, discarded, grid })
}

/// Locates eigenvalues `rho_m >= 0` as peaks of the trace formula evaluated
/// on peaked pairs centred on a grid of `a`. `spectrum` must reach
/// `L + delta_l`; the primary evaluation uses its truncation at
/// `cutoff - delta_l`.
pub fn eigenvalue_scan(spectrum: &LengthSpectrum, area: f64, opts: ScanOptions) -> Result<ScanReport> {
    opts.validate()?;
    let l = spectrum.cutoff - opts.delta_l;
    if !(l > 0.0) {
        return Err(Error::Config(format!("delta_l {} leaves no primary cutoff", opts.delta_l)));
    }
    let spectra = [spectrum.truncated(l), spectrum.clone()];
    let growth = [geometric_growth(&spectra[0]), geometric_growth(&spectra[1])];
    let mut eval = |which: usize, a: f64| -> Result<(f64, f64)> {
        let h = TestFunction::peaked_pair(a, opts.eps)?;
        let s = &spectra[which];
        let (geo, _) = geometric_sum(&h, s, false);
        let tail = geometric_tail(&h, s, growth[which].as_ref())?;
        if which == 0 {
            check_tail(tail, opts.tail_tolerance, s.cutoff)?;
        }
        Ok((identity_term(&h, area)? + geo, tail))
    };
    scan_response(&mut eval, opts, l)
}

/// CSV of the scan grid followed by the estimate list.
pub fn scan_csv(r: &ScanReport) -> String {
    let mut s = String::from("a,response,response_extended\n");
    for p in &r.grid {
        s.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", p.a, p.response, p.response_extended));
    }
    s.push_str("\nrho,height,stability,weight\n");
    for e in &r.estimates {
        s.push_str(&format!("{:.16e},{:.16e},{:.16e},{:.16e}\n", e.rho, e.height, e.stability, e.weight));
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylReport {
    /// Least-squares `c` in `N(rho) = c rho^2` on `[rho_max/2, rho_max]`.
    pub coefficient: f64,
    pub expected: f64,
    pub relative_error: f64,
    pub max_relative_deviation: f64,
    pub count_at_max: f64,
    pub points: usize,
}

/// Compares the weighted counting function of the estimates with
/// `(A/4pi) rho^2`. Counts are taken at the estimates themselves with half of
/// their own weight.
pub fn weyl_check(estimates: &[EigenvalueEstimate], area: f64, rho_max: f64) -> WeylReport {
    let expected = area / (4.0 * PI);
    let mut sorted: Vec<&EigenvalueEstimate> = estimates.iter().collect();
    sorted.sort_by(|x, y| x.rho.total_cmp(&y.rho));
    let mut below = 0.0;
    let (mut num, mut den) = (0.0, 0.0);
    let mut max_dev = 0.0f64;
    let mut points = 0;
    for e in &sorted {
        let n = below + 0.5 * e.weight;
        below += e.weight;
        if e.rho >= 0.5 * rho_max && e.rho <= rho_max {
            let r2 = e.rho * e.rho;
            num += n * r2;
            den += r2 * r2;
            max_dev = max_dev.max((n - expected * r2).abs() / (expected * r2));
            points += 1;
        }
    }
    let coefficient = if den > 0.0 { num / den } else { 0.0 };
    let count_at_max = sorted.iter().filter(|e| e.rho <= rho_max).map(|e| e.weight).sum();
    WeylReport {
        coefficient,
        expected,
        relative_error: (coefficient - expected).abs() / expected,
        max_relative_deviation: max_dev,
        count_at_max,
        points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::{GeodesicClass, Method, Word};
    use crate::specfun::digamma;
    use num_complex::Complex64;

    fn toy(l: f64, chi: i8, cutoff: f64) -> LengthSpectrum {
        let mut classes = vec![];
        let mut n = 1;
        while n as f64 * l <= cutoff {
            classes.push(GeodesicClass {
                primitive_length: l,
                power: n,
                chi_value: chi.pow(n),
                multiplicity: 1,
                representative: Word::new(vec![(0, 1); n as usize]),
            });
            n += 1;
        }
        LengthSpectrum { cutoff, method: Method::Pruned, classes, group_fingerprint: "toy".into() }
    }

    #[test]
    fn identity_term_resolvent_closed_form() {
        let h = TestFunction::resolvent(2.0, 3.0).unwrap();
        let a = 4.0 * PI;
        let psi = |x: f64| digamma(Complex64::new(x, 0.0)).re;
        let exact = -(a / (2.0 * PI)) * (psi(1.5) - psi(2.5)) + (a / (4.0 * PI)) * (1.0 / 2.5 - 1.0 / 1.5);
        let v = identity_term(&h, a).unwrap();
        assert!((v - exact).abs() < 1e-8, "{v} vs {exact}");
        assert!((v - 1.066_666_666_666_666_7).abs() < 1e-8);
    }

    #[test]
    fn identity_term_scales_with_area() {
        let h = TestFunction::gaussian(1.0).unwrap();
        let a = identity_term(&h, 4.0 * PI).unwrap();
        let b = identity_term(&h, 8.0 * PI).unwrap();
        assert_eq!(b, 2.0 * a);
        assert!(identity_term(&h, 0.0).is_err());
    }

    #[test]
    fn toy_class_sum() {
        let h = TestFunction::gaussian(1.0).unwrap();
        let s = toy(2.0, 1, 10.0);
        let g = geometric_term(&h, &s, None).unwrap();
        let direct: f64 = (1..=5).map(|n| 2.0 * h.g(2.0 * n as f64) / (2.0 * (n as f64).sinh())).sum();
        assert!((g.value - direct).abs() < 1e-15);
        assert_eq!(g.per_class.len(), 5);
    }

    #[test]
    fn empty_spectrum() {
        let h = TestFunction::gaussian(0.5).unwrap();
        let s = LengthSpectrum { cutoff: 8.0, method: Method::Pruned, classes: vec![], group_fingerprint: "e".into() };
        let g = geometric_term(&h, &s, Some(1e-12)).unwrap();
        assert_eq!(g.value, 0.0);
        assert_eq!(g.tail_bound, 0.0);
        let t = trace_rhs(&h, &s, 4.0 * PI, None).unwrap();
        assert_eq!(t.total, t.identity_term + t.geometric_term);
    }

    #[test]
    fn growth_fit_recovers_exponential() {
        let samples: Vec<(f64, f64)> = (0..2000).map(|i| {
            let u = 0.005 * i as f64;
            (u, 0.005 * 3.0 * (0.5 * u).exp())
        }).collect();
        let f = GrowthFit::fit(&samples, 10.0).unwrap();
        assert!((f.exponent - 0.5).abs() < 5e-3, "{f:?}");
        // dominance over the window sums
        assert!(f.coefficient >= 3.0 * 0.99);
        // upper sum dominates the integral of the model
        let t = f.tail(10.0, |u| (-u).exp()).unwrap();
        let integral = f.coefficient * (-(1.0 - f.exponent) * 10.0).exp() / (1.0 - f.exponent);
        assert!(t > integral && t < 3.0 * integral, "{t} {integral}");
        let diverging = GrowthFit { exponent: 2.0, ..f };
        assert!(matches!(diverging.tail(10.0, |u| (-u).exp()), Err(Error::Truncation(_))));
    }

    #[test]
    fn tail_tolerance_raises_truncation() {
        let h = TestFunction::peaked_pair(1.0, 0.05).unwrap();
        let classes: Vec<GeodesicClass> = (0..400)
            .map(|i| GeodesicClass {
                primitive_length: 2.0 + 0.02 * i as f64,
                power: 1,
                chi_value: 1,
                multiplicity: 1 + i / 40,
                representative: Word::new(vec![(0, 1)]),
            })
            .collect();
        let s = LengthSpectrum { cutoff: 10.0, method: Method::Pruned, classes, group_fingerprint: "t".into() };
        match geometric_term(&h, &s, Some(1e-12)) {
            Err(Error::Truncation(m)) => assert!(m.contains("raise L")),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    fn planted(rhos: &[f64], eps: f64) -> impl FnMut(usize, f64) -> Result<(f64, f64)> + '_ {
        move |_, a| {
            let h = TestFunction::peaked_pair(a, eps)?;
            Ok((rhos.iter().map(|&r| h.eval_real(r)).sum(), 0.0))
        }
    }

    #[test]
    fn planted_scan_recovers_peaks() {
        let rhos = [1.0, 2.2];
        let eps = 0.05;
        let r = scan_response(planted(&rhos, eps), ScanOptions::new(3.0, eps, 2.0), 10.0).unwrap();
        assert_eq!(r.estimates.len(), 2, "{:?}", r.estimates);
        for (e, &r0) in r.estimates.iter().zip(&rhos) {
            assert!((e.rho - r0).abs() < 1e-3, "{e:?}");
            assert!((e.height - 1.0).abs() < 1e-6);
            assert!((e.weight - 1.0).abs() < 1e-2, "{e:?}");
            assert_eq!(e.stability, 0.0);
        }
        // between peaks the response is negligible
        let mid = r.grid.iter().find(|p| (p.a - 1.6).abs() < 1e-9).unwrap();
        assert!(mid.response < 1e-12);
    }

    #[test]
    fn planted_scan_separation_bound() {
        let eps = 0.1;
        for sep in [0.35, 0.5, 0.8] {
            let rhos = [1.5, 1.5 + sep];
            let r = scan_response(planted(&rhos, eps), ScanOptions::new(3.0, eps, 0.0), 10.0).unwrap();
            assert_eq!(r.estimates.len(), 2);
            for (e, &r0) in r.estimates.iter().zip(&rhos) {
                assert!((e.rho - r0).abs() < 10.0 * eps * eps, "sep {sep}: {e:?}");
            }
        }
    }

    #[test]
    fn unmatched_peaks_are_discarded() {
        let eps = 0.1;
        let mut f = |which: usize, a: f64| {
            let h = TestFunction::peaked_pair(a, eps)?;
            let r = if which == 0 { 1.0 } else { 3.0 };
            Ok((h.eval_real(r), 0.0))
        };
        let r = scan_response(&mut f, ScanOptions::new(4.0, eps, 2.0), 10.0).unwrap();
        assert!(r.estimates.is_empty());
        assert_eq!(r.discarded, 1);
    }

    #[test]
    fn weyl_planted_exact() {
        let est: Vec<EigenvalueEstimate> = (1..=40)
            .map(|j| EigenvalueEstimate { rho: (j as f64 - 0.5).sqrt(), height: 1.0, stability: 0.0, weight: 1.0 })
            .collect();
        let w = weyl_check(&est, 4.0 * PI, 6.0);
        assert!((w.coefficient - 1.0).abs() < 1e-6, "{w:?}");
        assert!(w.max_relative_deviation < 1e-12);
        assert!(w.points > 10);
    }

    #[test]
    fn weyl_empty() {
        let w = weyl_check(&[], 4.0 * PI, 4.0);
        assert_eq!(w.coefficient, 0.0);
        assert_eq!(w.count_at_max, 0.0);
    }

    #[test]
    fn csv_has_fixed_precision() {
        let h = TestFunction::gaussian(1.0).unwrap();
        let s = toy(2.0, -1, 8.0);
        let t = trace_rhs(&h, &s, 4.0 * PI, None).unwrap();
        let csv = trace_csv(&t);
        let row = csv.lines().nth(1).unwrap();
        assert_eq!(row.split(',').count(), 7);
        assert!(row.split(',').skip(1).all(|f| f.contains('e') && f.split('e').next().unwrap().len() >= 18));
        let json = serde_json::to_value(&t).unwrap();
        assert_eq!(json["test_function"]["family"], "gaussian");
    }
}
