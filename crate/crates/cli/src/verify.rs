//! `verify-all`: every identity suite at desk-scale parameters, reported as
//! one pass/fail matrix.

use std::f64::consts::SQRT_2;

use dirac_trace::error::Result;
use dirac_trace::fuchsian::{enumerate_geodesics_with, DirichletDomain, LengthSpectrum, Method};
use dirac_trace::kernels::{build_point_pair, conjugate_by, max_entry_diff, orbital_integral, spinor_factor, PoincareSeries};
use dirac_trace::operators::{
    analytic_family, chiral_check, maass_exponent, planted_maass, s_operator_check, satz_auto_check,
    square_identity_check, time_reversal_check, GridPatch, ScalarField, SpinorField,
};
use dirac_trace::moebius::{apply, Mat2};
use dirac_trace::specfun::green::{greenh_residual, h_kernel, Representation};
use dirac_trace::testfn::TestFunction;
use dirac_trace::zeta::{log_zeta_euler, resolvent_consistency};
use num_complex::Complex64;

use crate::commands::{group, group_checks, spectrum};
use crate::config::RunConfig;
use crate::report::{Check, Report};

/// Cutoff of the brute-versus-pruned comparison.
const CROSS_METHOD_CUTOFF: f64 = 7.0;
const LENGTH_TOLERANCE: f64 = 1e-9;

fn record(r: &mut Report, suite: &str, name: &str, v: Result<f64>, tol: f64) {
    match v {
        Ok(x) => r.check(Check::below(suite, name, x, tol)),
        Err(e) => r.check(Check::flag(suite, name, false, e.to_string())),
    }
}

/// Largest length difference between two spectra, or `None` when their
/// `(power, chi, multiplicity)` records differ.
fn spectrum_distance(a: &LengthSpectrum, b: &LengthSpectrum) -> Option<f64> {
    if a.classes.len() != b.classes.len() {
        return None;
    }
    let key = |s: &LengthSpectrum| {
        let mut v: Vec<_> = s.classes.iter().map(|c| (c.primitive_length, c.power, c.chi_value, c.multiplicity)).collect();
        v.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        v
    };
    let mut d = 0.0f64;
    for (x, y) in key(a).iter().zip(&key(b)) {
        if (x.1, x.2, x.3) != (y.1, y.2, y.3) {
            return None;
        }
        d = d.max((x.0 - y.0).abs());
    }
    Some(d)
}

fn enumeration(cfg: &RunConfig, r: &mut Report) -> Result<()> {
    let g = group(cfg)?;
    let run = |m| enumerate_geodesics_with(&g.presentation, &g.multiplier, CROSS_METHOD_CUTOFF, m, cfg.budget);
    let (brute, pruned) = (run(Method::Brute)?, run(Method::Pruned)?);
    match spectrum_distance(&brute, &pruned) {
        Some(d) => r.check(Check::below("geodesics", "brute_vs_pruned", d, LENGTH_TOLERANCE)),
        None => r.check(Check::flag("geodesics", "brute_vs_pruned", false, "class records differ")),
    }
    if g.presentation.genus == 2 && matches!(cfg.source, crate::config::GroupSource::Bolza) {
        let systole = 2.0 * (1.0 + SQRT_2).acosh();
        let d = pruned.systole().map(|s| (s - systole).abs()).unwrap_or(f64::INFINITY);
        r.check(Check::below("geodesics", "bolza_systole", d, 1e-10));
    }
    Ok(())
}

fn green(r: &mut Report) {
    let mut worst = 0.0f64;
    let mut failure = None;
    for sigma in [1.5, 2.0, 5.0, 20.0] {
        for rho in [Complex64::new(0.0, -0.6), Complex64::new(1.0, -0.7), Complex64::new(2.0, -0.9)] {
            match (h_kernel(sigma, rho, Representation::Hypergeometric), h_kernel(sigma, rho, Representation::Integral)) {
                (Ok(a), Ok(b)) => {
                    for k in 0..2 {
                        worst = worst.max((a[k] - b[k]).norm() / a[k].norm().max(1e-300));
                    }
                }
                (Err(e), _) | (_, Err(e)) => failure = Some(e),
            }
        }
    }
    match failure {
        Some(e) => r.check(Check::flag("specfun", "hypergeometric_vs_euler", false, e.to_string())),
        None => r.check(Check::below("specfun", "hypergeometric_vs_euler", worst, 1e-10)),
    }
    let rho = Complex64::new(1.0, -0.7);
    let ratio = greenh_residual(2.0, rho, 0.02).and_then(|a| Ok(a / greenh_residual(2.0, rho, 0.01)?));
    record(r, "specfun", "ode_residual", greenh_residual(2.0, rho, 0.01), 1e-6);
    record(r, "specfun", "ode_order_ratio_minus_16", ratio.map(|q| (q - 16.0).abs()), 3.0);
}

fn kernels(cfg: &RunConfig, r: &mut Report) -> Result<()> {
    let g = group(cfg)?;
    let series = PoincareSeries::new(&g.presentation, &g.multiplier)?;
    let dom = DirichletDomain::compute(&g.presentation)?;
    let v = TestFunction::gaussian(0.25).and_then(build_point_pair).and_then(|k| {
        let (z1, z2) = (Complex64::new(0.1, 0.9), Complex64::new(-0.2, 1.3));
        let base = series.kernel(&k, z1, z2, cfg.ball)?;
        let (a, b) = (&dom.sides[0], &dom.sides[dom.sides.len() / 2 + 1]);
        let chi = (series.multiplier.chi_parity(a.parity) * series.multiplier.chi_parity(b.parity)) as f64;
        let lhs = series.kernel(&k, apply(&a.matrix, z1), apply(&b.matrix, z2), cfg.ball)?;
        let mut rhs = conjugate_by(spinor_factor(&a.matrix, z1), &base.value, spinor_factor(&b.matrix, z2));
        rhs.iter_mut().flatten().for_each(|x| *x *= chi);
        Ok(max_entry_diff(&lhs.value, &rhs))
    });
    record(r, "kernels", "two_slot_automorphy", v, 1e-7);
    let v = TestFunction::gaussian(0.5)
        .and_then(build_point_pair)
        .and_then(|k| orbital_integral(&k, 2.0 * (1.0 + SQRT_2).acosh(), 1))
        .map(|o| (o.quadrature - o.closed_form).abs() / o.closed_form.abs());
    record(r, "kernels", "orbital_integral", v, 1e-6);
    Ok(())
}

fn trace_side(cfg: &RunConfig, r: &mut Report) -> Result<()> {
    let g = group(cfg)?;
    let (s, _) = spectrum(cfg, &g, cfg.length)?;
    let area = g.presentation.area;
    match resolvent_consistency(2.0, 3.0, &s, area) {
        Ok(rep) => {
            r.check(Check::below("traceformula", "identity_vs_digamma", rep.identity_residual, 1e-8));
            r.check(Check::below("traceformula", "geometric_vs_zeta", rep.geometric_residual, cfg.residual_tolerance));
        }
        Err(e) => r.check(Check::flag("traceformula", "resolvent", false, e.to_string())),
    }
    let l0 = cfg.length - cfg.delta_length;
    let two = Complex64::new(2.0, 0.0);
    let v = log_zeta_euler(two, &s.truncated(l0)).and_then(|a| {
        let b = log_zeta_euler(two, &s)?;
        Ok((a.log_z[0] - b.log_z[0]).abs() / a.tail.max(1e-300))
    });
    // the change between cutoffs must sit inside the reported tail
    record(r, "zeta", "truncation_within_tail", v, 1.0);
    Ok(())
}

fn operators(r: &mut Report) -> Result<()> {
    const SUITE: &str = "operators";
    let p = GridPatch::new((-0.3, 0.3), (0.8, 1.4), 1e-3, 1e-3)?;
    let a = analytic_family(Complex64::new(0.5, 1.3), 2.0, Complex64::new(0.05, 1.1), 0.6);
    let b = analytic_family(Complex64::new(0.2, -0.7), -1.5, Complex64::new(-0.1, 1.05), 0.5);
    let f = SpinorField::sample(&p, |z| [a(z), b(z)]);
    for k in [1, 3] {
        r.check(Check::below(SUITE, &format!("square_k{k}"), square_identity_check(&f, k), 1e-7));
        r.check(Check::below(SUITE, &format!("chiral_k{k}"), chiral_check(&f, k), 1e-12));
        r.check(Check::below(SUITE, &format!("time_reversal_k{k}"), time_reversal_check(&f, k).0, 1e-10));
    }
    record(r, SUITE, "s3_parameter_independence", s_operator_check(&f, 1, 1.0, 1.7), 1e-7);
    let coarse = GridPatch::new((-0.3, 0.3), (0.8, 1.4), 5e-3, 5e-3)?;
    let g = Mat2::rotation(-0.5) * Mat2::dilation(0.25);
    let psi = ScalarField::sample(&coarse, planted_maass(1, maass_exponent(1, 1.2), g));
    record(r, SUITE, "satz_round_trip", satz_auto_check(&psi, 1, 1.2), 1e-6);
    Ok(())
}

pub fn verify_all(cfg: &RunConfig) -> Result<Report> {
    let mut r = Report::new("verify-all");
    group_checks(cfg, &mut r)?;
    if !r.passed {
        return Ok(r);
    }
    enumeration(cfg, &mut r)?;
    green(&mut r);
    kernels(cfg, &mut r)?;
    trace_side(cfg, &mut r)?;
    operators(&mut r)?;
    Ok(r)
}
