//! The workflows behind each subcommand.

use std::fs;
use std::path::Path;

use dirac_trace::error::{Error, Result};
use dirac_trace::fuchsian::cache::cache_path;
use dirac_trace::fuchsian::{
    build_multiplier, fingerprint, load_or_enumerate, read_spectrum, spectrum_csv, DirichletDomain,
    LengthSpectrum, MultiplierSystem, RelatorLift, SurfacePresentation,
};
use dirac_trace::testfn::{validate_admissible, TestFunction};
use dirac_trace::traceformula::{eigenvalue_scan, scan_csv, trace_csv, trace_rhs, weyl_check, GrowthFit, ScanOptions};
use dirac_trace::zeta::{log_zeta_euler, resolvent_consistency, zeta_product_rep};
use num_complex::Complex64;

use crate::config::RunConfig;
use crate::report::{sci, to_value, Check, Report, Table};

/// Relative tolerance of the Weyl coefficient in scan reports.
pub const WEYL_TOLERANCE: f64 = 0.15;
/// Dirichlet-domain area against Gauss-Bonnet.
const AREA_TOLERANCE: f64 = 1e-8;

/// Presentation and multiplier system of a run.
pub struct Group {
    pub presentation: SurfacePresentation,
    pub multiplier: MultiplierSystem,
}

pub fn group(cfg: &RunConfig) -> Result<Group> {
    let (presentation, signs) = cfg.presentation()?;
    let multiplier = build_multiplier(&signs, cfg.weight, &presentation)?;
    Ok(Group { presentation, multiplier })
}

/// Group checks shared by `group-verify` and `verify-all`.
pub fn group_checks(cfg: &RunConfig, r: &mut Report) -> Result<()> {
    const SUITE: &str = "group";
    let (p, signs) = match cfg.presentation() {
        Ok(x) => x,
        Err(e @ Error::Group(_)) => {
            r.check(Check::flag(SUITE, "presentation", false, e.to_string()));
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    r.check(Check::flag(
        SUITE,
        "presentation",
        true,
        format!("genus {}, {} hyperbolic generators", p.genus, p.generators.len()),
    ));
    let lift = p.relator_lift();
    r.check(Check::from_result(SUITE, "relator", &lift).with_detail(match lift {
        Ok(RelatorLift::PlusIdentity) => "lifts to +Id".to_string(),
        Ok(RelatorLift::MinusIdentity) => "lifts to -Id".to_string(),
        Err(e) => e.to_string(),
    }));
    match DirichletDomain::compute(&p) {
        Ok(d) => {
            r.check(Check::flag(
                SUITE,
                "dirichlet_domain",
                true,
                format!("{} sides, circumradius {:.6}", d.sides.len(), d.circumradius),
            ));
            r.check(
                Check::below(SUITE, "area", (d.area() - p.area).abs(), AREA_TOLERANCE)
                    .with_detail(format!("polygon area {:.12} vs 4 pi (g-1)", d.area())),
            );
        }
        Err(e) => r.check(Check::flag(SUITE, "dirichlet_domain", false, e.to_string())),
    }
    let ms = build_multiplier(&signs, cfg.weight, &p);
    r.check(Check::from_result(SUITE, "multiplier", &ms));
    r.add("genus", p.genus);
    r.add("area", format!("{:.12}", p.area));
    r.add("weight", cfg.weight);
    r.add("signs", signs.iter().map(|s| if *s > 0 { "+" } else { "-" }).collect::<Vec<_>>().join(" "));
    if let Ok(ms) = ms {
        r.add("fingerprint", fingerprint(&p, &ms));
    }
    Ok(())
}

pub fn group_verify(cfg: &RunConfig) -> Result<Report> {
    let mut r = Report::new("group-verify");
    group_checks(cfg, &mut r)?;
    Ok(r)
}

/// Spectrum to cutoff `l`, from the cache when it covers `l`. Returns whether
/// the cache served it.
pub fn spectrum(cfg: &RunConfig, g: &Group, l: f64) -> Result<(LengthSpectrum, bool)> {
    let dir = cfg.cache_dir.as_deref();
    let mut hit = false;
    if let Some(d) = dir {
        fs::create_dir_all(d)?;
        let fp = fingerprint(&g.presentation, &g.multiplier);
        let path = cache_path(d, &fp, cfg.method);
        if path.exists() {
            hit = read_spectrum(&path, &fp)?.cutoff >= l;
        }
    }
    let s = load_or_enumerate(dir, &g.presentation, &g.multiplier, l, cfg.method, cfg.budget)?;
    Ok((s, hit))
}

/// Fit of the unsigned primitive counts, `c e^(alpha l)`.
fn prime_growth(s: &LengthSpectrum) -> Option<GrowthFit> {
    let samples: Vec<(f64, f64)> = s
        .classes
        .iter()
        .filter(|c| c.power == 1)
        .map(|c| (c.primitive_length, c.multiplicity as f64))
        .collect();
    GrowthFit::fit(&samples, s.cutoff)
}

pub fn geodesics(cfg: &RunConfig) -> Result<Report> {
    let g = group(cfg)?;
    let (s, hit) = spectrum(cfg, &g, cfg.length)?;
    let mut r = Report::new("geodesics");
    r.add("cutoff", format!("{:.6}", s.cutoff));
    r.add("method", s.method);
    r.add("fingerprint", &s.group_fingerprint);
    r.add("records", s.classes.len());
    r.add("classes", s.class_count());
    r.add("primitive classes", s.primitive_count());
    r.add("systole", s.systole().map(|x| format!("{x:.12}")).unwrap_or_else(|| "-".into()));
    match prime_growth(&s) {
        Some(f) => r.add("growth", format!("{} e^({:.4} l) over {} windows", sci(f.coefficient), f.exponent, f.windows)),
        None => r.add("growth", "-"),
    }
    if let Some(d) = &cfg.cache_dir {
        let path = cache_path(d, &s.group_fingerprint, cfg.method);
        r.add("cache", format!("{} ({})", path.display(), if hit { "hit" } else { "written" }));
    }
    if s.classes.is_empty() {
        r.warnings.push(format!("no closed geodesics of length <= {}; the spectrum is empty", s.cutoff));
    }
    r.table = Some(Table {
        header: ["primitive_length", "power", "chi", "multiplicity", "representative"].map(String::from).to_vec(),
        rows: s
            .classes
            .iter()
            .map(|c| {
                vec![
                    format!("{:.12}", c.primitive_length),
                    c.power.to_string(),
                    c.chi_value.to_string(),
                    c.multiplicity.to_string(),
                    c.representative.to_string(),
                ]
            })
            .collect(),
    });
    r.csv = Some(spectrum_csv(&s));
    r.data = to_value(&s)?;
    Ok(r)
}

pub fn trace(cfg: &RunConfig) -> Result<Report> {
    let g = group(cfg)?;
    let (s, _) = spectrum(cfg, &g, cfg.length)?;
    let h = cfg.testfn;
    let mut r = Report::new("trace");
    let adm = validate_admissible(&h);
    r.check(Check::from_result("testfn", "admissible", &adm));
    adm?;
    let area = g.presentation.area;
    let t = trace_rhs(&h, &s, area, Some(cfg.tail_tolerance))?;
    r.add("test function", format!("{h:?}"));
    r.add("cutoff", format!("{:.6}", t.cutoff));
    r.add("identity term", sci(t.identity_term));
    r.add("geometric term", sci(t.geometric_term));
    r.add("total", sci(t.total));
    r.add("tail bound", sci(t.tail_bound));
    if let TestFunction::Gaussian { .. } = h {
        // h >= 0 on the real line and on the imaginary segment, so the
        // spectral sum is nonnegative
        r.check(
            Check::flag("traceformula", "nonnegative", t.total >= -t.tail_bound, "")
                .with_detail(format!("total {} >= -tail", sci(t.total))),
        );
    }
    if let TestFunction::ResolventDifference { s: a, sigma: b } = h {
        let rep = resolvent_consistency(a, b, &s, area)?;
        r.add("zeta side", sci(rep.zeta_side));
        r.add("digamma side", sci(rep.digamma_side));
        r.check(Check::below("traceformula", "geometric_vs_zeta", rep.geometric_residual, cfg.residual_tolerance));
        r.check(Check::below("traceformula", "identity_vs_digamma", rep.identity_residual, cfg.residual_tolerance));
    }
    r.csv = Some(trace_csv(&t));
    r.data = to_value(&t)?;
    Ok(r)
}

pub fn scan(cfg: &RunConfig) -> Result<Report> {
    let g = group(cfg)?;
    let (s, _) = spectrum(cfg, &g, cfg.length + cfg.delta_length)?;
    let mut opts = ScanOptions::new(cfg.rho_max, cfg.scan_eps, cfg.delta_length);
    opts.tail_tolerance = cfg.scan_tail_tolerance;
    let area = g.presentation.area;
    let rep = eigenvalue_scan(&s, area, opts)?;
    let weyl = weyl_check(&rep.estimates, area, cfg.rho_max);
    let mut r = Report::new("scan");
    r.add("cutoff", format!("{:.6} (+{:.3})", rep.cutoff, cfg.delta_length));
    r.add("eps", cfg.scan_eps);
    r.add("rho_max", cfg.rho_max);
    r.add("estimates", rep.estimates.len());
    r.add("discarded", rep.discarded);
    r.add("zero response", sci(rep.zero_response));
    r.add("tail bound", sci(rep.tail_bound));
    r.add(
        "max stability",
        sci(rep.estimates.iter().map(|e| e.stability).fold(0.0, f64::max)),
    );
    r.add("weyl coefficient", format!("{:.6} (expected {:.6})", weyl.coefficient, weyl.expected));
    r.check(Check::below("scan", "weyl_coefficient", weyl.relative_error, WEYL_TOLERANCE));
    r.table = Some(Table {
        header: ["rho", "height", "stability", "weight"].map(String::from).to_vec(),
        rows: rep
            .estimates
            .iter()
            .map(|e| {
                vec![
                    format!("{:.6}", e.rho),
                    format!("{:.4}", e.height),
                    sci(e.stability),
                    format!("{:.3}", e.weight),
                ]
            })
            .collect(),
    });
    r.csv = Some(scan_csv(&rep));
    r.data = serde_json::json!({ "scan": to_value(&rep)?, "weyl": to_value(&weyl)? });
    Ok(r)
}

/// Numbers separated by whitespace, commas or newlines; `#` starts a comment.
fn read_list(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read eigenvalue list {}: {e}", path.display())))?;
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).map(str::to_string).collect::<Vec<_>>())
        .map(|t| t.parse::<f64>().map_err(|_| Error::Config(format!("{}: bad number '{t}'", path.display()))))
        .collect()
}

pub fn zeta(cfg: &RunConfig) -> Result<Report> {
    let g = group(cfg)?;
    let (s, _) = spectrum(cfg, &g, cfg.length)?;
    let eigen = cfg.eigenvalues.as_deref().map(read_list).transpose()?;
    let area = g.presentation.area;
    let mut r = Report::new("zeta");
    r.add("cutoff", format!("{:.6}", s.cutoff));
    let mut header: Vec<String> = ["re_s", "im_s", "re_log_z", "im_log_z", "tail"].map(String::from).to_vec();
    if eigen.is_some() {
        header.extend(["re_log_z_product", "im_log_z_product", "product_tail"].map(String::from));
    }
    let mut rows = vec![];
    let mut evals = vec![];
    for &re in &cfg.zeta_re {
        for &im in &cfg.zeta_im {
            let z = Complex64::new(re, im);
            let e = log_zeta_euler(z, &s)?;
            let mut row = vec![format!("{re:.16e}"), format!("{im:.16e}"), format!("{:.16e}", e.log_z[0]), format!("{:.16e}", e.log_z[1]), format!("{:.16e}", e.tail)];
            let mut product = None;
            if let Some(list) = &eigen {
                let p = zeta_product_rep(z, list, cfg.product_start, &cfg.constants, area)?;
                row.extend([format!("{:.16e}", p.log_value[0]), format!("{:.16e}", p.log_value[1]), format!("{:.16e}", p.tail)]);
                product = Some(p);
            }
            rows.push(row);
            evals.push(serde_json::json!({ "euler": to_value(&e)?, "product": to_value(&product)? }));
        }
    }
    let mut csv = header.join(",") + "\n";
    for row in &rows {
        csv += &(row.join(",") + "\n");
    }
    r.csv = Some(csv);
    r.table = Some(Table { header, rows });
    r.data = serde_json::Value::Array(evals);
    Ok(r)
}
