use dirac_trace::kernels::{build_point_pair, orbital_integral};
use dirac_trace::testfn::TestFunction;

/// Systole of the Bolza surface, `2 arccosh(1 + sqrt 2)`.
fn systole() -> f64 {
    2.0 * (1.0 + std::f64::consts::SQRT_2).acosh()
}

#[test]
fn orbital_integral_matches_closed_form_at_systole() {
    let k = build_point_pair(TestFunction::gaussian(0.5).unwrap()).unwrap();
    let r = orbital_integral(&k, systole(), 1).unwrap();
    let rel = (r.quadrature - r.closed_form).abs() / r.closed_form.abs();
    assert!(rel < 1e-6, "{r:?} rel {rel}");
    assert!(r.truncation_tail < 1e-10);
    assert!((systole() - 3.057141838962).abs() < 1e-11);
}

#[test]
fn orbital_integral_second_power() {
    let k = build_point_pair(TestFunction::gaussian(0.5).unwrap()).unwrap();
    let r = orbital_integral(&k, systole(), 2).unwrap();
    let rel = (r.quadrature - r.closed_form).abs() / r.closed_form.abs();
    assert!(rel < 1e-6, "{r:?} rel {rel}");
}

#[test]
fn orbital_integral_rejects_bad_input() {
    let k = build_point_pair(TestFunction::gaussian(0.5).unwrap()).unwrap();
    assert!(orbital_integral(&k, 0.0, 1).is_err());
    assert!(orbital_integral(&k, systole(), 0).is_err());
}
