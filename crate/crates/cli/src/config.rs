//! Run configuration: flat `key = value` text with dotted sections.
//!
//! Sources are layered in order: built-in defaults, the `--config` file, the
//! `DIRAC_TRACE_CACHE` environment variable (cache directory only), then
//! `--set key=value` flags. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use dirac_trace::error::{Error, Result};
use dirac_trace::fuchsian::presentation::{parse_key_values, parse_signs};
use dirac_trace::fuchsian::{build_bolza, load_presentation_config, Method, SurfacePresentation};
use dirac_trace::testfn::TestFunction;
use dirac_trace::zeta::ProductConstants;

pub const CACHE_ENV: &str = "DIRAC_TRACE_CACHE";

/// Every accepted key with its default; an empty default means unset.
const KEYS: &[(&str, &str)] = &[
    ("group.source", "bolza"),
    ("group.signs", ""),
    ("group.weight", "1"),
    ("group.method", "pruned"),
    ("group.budget", "10000000"),
    ("testfn.family", "gaussian"),
    ("testfn.t", "0.5"),
    ("testfn.s", "2"),
    ("testfn.sigma", "3"),
    ("testfn.a", "1"),
    ("testfn.eps", "0.05"),
    ("cutoffs.length", "12"),
    ("cutoffs.ball", "7"),
    ("cutoffs.rho_max", "4"),
    ("cutoffs.eps", "0.1"),
    ("cutoffs.delta_length", "2"),
    ("tolerances.tail", "1e-4"),
    ("tolerances.scan_tail", ""),
    ("tolerances.residual", "1e-6"),
    ("zeta.re", "1.5 2 3"),
    ("zeta.im", "0 1"),
    ("zeta.eigenvalues", ""),
    ("zeta.zero_modes", ""),
    ("zeta.gamma_d", ""),
    ("zeta.leading", ""),
    ("zeta.start", ""),
    ("output.dir", ""),
    ("cache.dir", ""),
];

#[derive(Clone, Debug)]
pub enum GroupSource {
    Bolza,
    File(PathBuf),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub source: GroupSource,
    pub signs: Option<Vec<i8>>,
    pub weight: i32,
    pub method: Method,
    pub budget: u64,
    pub testfn: TestFunction,
    pub length: f64,
    pub ball: f64,
    pub rho_max: f64,
    pub scan_eps: f64,
    pub delta_length: f64,
    pub tail_tolerance: f64,
    pub scan_tail_tolerance: Option<f64>,
    pub residual_tolerance: f64,
    pub zeta_re: Vec<f64>,
    pub zeta_im: Vec<f64>,
    pub eigenvalues: Option<PathBuf>,
    pub constants: ProductConstants,
    pub product_start: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

fn cfg_err(key: &str, v: &str, what: &str) -> Error {
    Error::Config(format!("{key} = '{v}': {what}"))
}

fn number(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| cfg_err(key, v, "expected a number"))
}

fn positive(key: &str, v: &str) -> Result<f64> {
    let x = number(key, v)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(cfg_err(key, v, "must be positive"))
    }
}

fn tolerance(key: &str, v: &str) -> Result<f64> {
    let x = number(key, v)?;
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(cfg_err(key, v, "tolerances must lie in (0, 1)"))
    }
}

fn integer<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse::<T>().map_err(|_| cfg_err(key, v, "expected an integer"))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| number(key, t))
        .collect()
}

fn optional<T>(v: &str, f: impl FnOnce(&str) -> Result<T>) -> Result<Option<T>> {
    if v.is_empty() {
        Ok(None)
    } else {
        f(v).map(Some)
    }
}

/// Raw key-value layers before typing.
#[derive(Clone, Debug)]
pub struct ConfigLayers {
    values: BTreeMap<String, String>,
}

impl Default for ConfigLayers {
    fn default() -> Self {
        ConfigLayers { values: KEYS.iter().map(|&(k, v)| (k.to_string(), v.to_string())).collect() }
    }
}

impl ConfigLayers {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match self.values.get_mut(key) {
            Some(slot) => {
                *slot = value.trim().to_string();
                Ok(())
            }
            None => Err(Error::Config(format!("unknown key '{key}'"))),
        }
    }

    pub fn merge_text(&mut self, text: &str) -> Result<()> {
        for (k, v) in parse_key_values(text)? {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        self.merge_text(&text)
            .map_err(|e| Error::Config(format!("{}: {}", path.display(), strip(e))))
    }

    /// Applies one `key=value` override.
    pub fn merge_flag(&mut self, flag: &str) -> Result<()> {
        let (k, v) = flag
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects key=value, got '{flag}'")))?;
        self.set(k.trim(), v)
    }

    fn get(&self, key: &str) -> &str {
        &self.values[key]
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        let g = |k: &str| self.get(k);
        let source = match g("group.source") {
            "bolza" => GroupSource::Bolza,
            "" => return Err(Error::Config("group.source is empty".into())),
            p => GroupSource::File(PathBuf::from(p)),
        };
        let family = g("testfn.family");
        let testfn = match family {
            "gaussian" => TestFunction::gaussian(positive("testfn.t", g("testfn.t"))?),
            "peaked_pair" => TestFunction::peaked_pair(
                number("testfn.a", g("testfn.a"))?,
                positive("testfn.eps", g("testfn.eps"))?,
            ),
            "resolvent" => TestFunction::resolvent(
                number("testfn.s", g("testfn.s"))?,
                number("testfn.sigma", g("testfn.sigma"))?,
            ),
            _ => return Err(cfg_err("testfn.family", family, "expected gaussian, peaked_pair or resolvent")),
        }
        .map_err(|e| Error::Config(strip(e)))?;
        let path = |k: &str| optional(g(k), |v| Ok(PathBuf::from(v)));
        Ok(RunConfig {
            source,
            signs: optional(g("group.signs"), |v| parse_signs(v))?,
            weight: integer("group.weight", g("group.weight"))?,
            method: g("group.method").parse()?,
            budget: integer("group.budget", g("group.budget"))?,
            testfn,
            length: positive("cutoffs.length", g("cutoffs.length"))?,
            ball: positive("cutoffs.ball", g("cutoffs.ball"))?,
            rho_max: positive("cutoffs.rho_max", g("cutoffs.rho_max"))?,
            scan_eps: positive("cutoffs.eps", g("cutoffs.eps"))?,
            delta_length: positive("cutoffs.delta_length", g("cutoffs.delta_length"))?,
            tail_tolerance: tolerance("tolerances.tail", g("tolerances.tail"))?,
            scan_tail_tolerance: optional(g("tolerances.scan_tail"), |v| tolerance("tolerances.scan_tail", v))?,
            residual_tolerance: tolerance("tolerances.residual", g("tolerances.residual"))?,
            zeta_re: list("zeta.re", g("zeta.re"))?,
            zeta_im: list("zeta.im", g("zeta.im"))?,
            eigenvalues: path("zeta.eigenvalues")?,
            constants: ProductConstants {
                n: optional(g("zeta.zero_modes"), |v| integer("zeta.zero_modes", v))?,
                gamma_d: optional(g("zeta.gamma_d"), |v| number("zeta.gamma_d", v))?,
                leading: optional(g("zeta.leading"), |v| number("zeta.leading", v))?,
            },
            product_start: optional(g("zeta.start"), |v| integer("zeta.start", v))?,
            output_dir: path("output.dir")?,
            cache_dir: path("cache.dir")?,
        })
    }
}

/// Message of an error without its category prefix.
fn strip(e: Error) -> String {
    match e {
        Error::Config(m) | Error::Admissibility(m) | Error::Domain(m) => m,
        other => other.to_string(),
    }
}

/// Builds the configuration from a file, the environment and flags.
pub fn load(file: Option<&Path>, flags: &[String], cache_env: Option<String>) -> Result<RunConfig> {
    let mut layers = ConfigLayers::default();
    if let Some(f) = file {
        layers.merge_file(f)?;
    }
    if let Some(dir) = cache_env.filter(|d| !d.is_empty()) {
        layers.set("cache.dir", &dir)?;
    }
    for f in flags {
        layers.merge_flag(f)?;
    }
    layers.resolve()
}

impl RunConfig {
    /// The presentation and its character signs. A presentation file may carry
    /// its own signs; `group.signs` overrides them. Bolza defaults to
    /// `+ - + -`, other files to all `+`.
    pub fn presentation(&self) -> Result<(SurfacePresentation, Vec<i8>)> {
        let (p, file_signs) = match &self.source {
            GroupSource::Bolza => (build_bolza(), Some(vec![1, -1, 1, -1])),
            GroupSource::File(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read presentation {}: {e}", path.display())))?;
                let c = load_presentation_config(&text)?;
                (c.presentation, c.signs)
            }
        };
        let signs = self
            .signs
            .clone()
            .or(file_signs)
            .unwrap_or_else(|| vec![1; p.generators.len()]);
        Ok((p, signs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let c = ConfigLayers::default().resolve().unwrap();
        assert!(matches!(c.source, GroupSource::Bolza));
        assert_eq!(c.testfn, TestFunction::Gaussian { t: 0.5 });
        assert_eq!(c.length, 12.0);
        assert!(c.scan_tail_tolerance.is_none());
        assert_eq!(c.zeta_re, vec![1.5, 2.0, 3.0]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut l = ConfigLayers::default();
        assert!(l.merge_text("cutoffs.lenght = 3").is_err());
        assert!(l.merge_flag("nothing").is_err());
        assert!(l.merge_flag("group.nope=1").is_err());
    }

    #[test]
    fn invariants_are_checked() {
        for bad in ["cutoffs.length=-1", "tolerances.tail=1.5", "tolerances.residual=0", "group.method=fast", "testfn.t=0"] {
            let mut l = ConfigLayers::default();
            l.merge_flag(bad).unwrap();
            assert!(matches!(l.resolve(), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn layers_override_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("run.cfg");
        fs::write(&f, "# comment\ncutoffs.length = 8\ncache.dir = /from/file\n").unwrap();
        let c = load(Some(&f), &[], Some("/from/env".into())).unwrap();
        assert_eq!(c.length, 8.0);
        assert_eq!(c.cache_dir.unwrap(), PathBuf::from("/from/env"));
        let c = load(Some(&f), &["cutoffs.length=9".into(), "cache.dir=/x".into()], None).unwrap();
        assert_eq!(c.length, 9.0);
        assert_eq!(c.cache_dir.unwrap(), PathBuf::from("/x"));
    }

    #[test]
    fn resolvent_family() {
        let c = load(None, &["testfn.family=resolvent".into()], None).unwrap();
        assert_eq!(c.testfn, TestFunction::ResolventDifference { s: 2.0, sigma: 3.0 });
        assert!(load(None, &["testfn.family=resolvent".into(), "testfn.s=0.5".into()], None).is_err());
    }
}
