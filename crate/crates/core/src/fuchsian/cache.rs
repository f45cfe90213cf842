//! CSV cache of length spectra.
//!
//! ```text
//! format_version,1
//! group_fingerprint,<hex>
//! cutoff,<float>
//! method,<brute|pruned>
//! primitive_length,power,chi,multiplicity,representative
//! 3.0571418389619963e0,1,1,24,1 -2 3
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::multiplier::MultiplierSystem;
use super::presentation::SurfacePresentation;
use super::spectrum::{enumerate_geodesics_with, fingerprint, GeodesicClass, LengthSpectrum, Method};
use super::word::Word;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
const COLUMNS: &str = "primitive_length,power,chi,multiplicity,representative";

pub fn spectrum_csv(s: &LengthSpectrum) -> String {
    let mut text = String::new();
    text += &format!("format_version,{FORMAT_VERSION}\n");
    text += &format!("group_fingerprint,{}\n", s.group_fingerprint);
    text += &format!("cutoff,{:.16e}\n", s.cutoff);
    text += &format!("method,{}\n", s.method);
    text += COLUMNS;
    text.push('\n');
    for c in &s.classes {
        text += &format!(
            "{:.16e},{},{},{},{}\n",
            c.primitive_length, c.power, c.chi_value, c.multiplicity, c.representative
        );
    }
    text
}

pub fn write_spectrum(path: &Path, s: &LengthSpectrum) -> Result<()> {
    let text = spectrum_csv(s);
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    // write then rename so readers never see a partial file
    let tmp = path.with_extension("csv.tmp");
    let mut f = fs::File::create(&tmp)?;
    f.write_all(text.as_bytes())?;
    f.sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn header<'a>(lines: &mut impl Iterator<Item = &'a str>, key: &str) -> Result<&'a str> {
    let line = lines.next().ok_or_else(|| Error::Cache(format!("missing header '{key}'")))?;
    line.strip_prefix(key)
        .and_then(|r| r.strip_prefix(','))
        .ok_or_else(|| Error::Cache(format!("expected header '{key}', found '{line}'")))
}

fn parse<T: std::str::FromStr>(v: &str, what: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Cache(format!("bad {what} '{v}'")))
}

/// Reads a cached spectrum; fails unless the fingerprint matches `expected`.
pub fn read_spectrum(path: &Path, expected: &str) -> Result<LengthSpectrum> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let version: u32 = parse(header(&mut lines, "format_version")?, "format version")?;
    if version != FORMAT_VERSION {
        return Err(Error::Cache(format!("unsupported cache format version {version}")));
    }
    let fp = header(&mut lines, "group_fingerprint")?;
    if fp != expected {
        return Err(Error::Cache(format!(
            "fingerprint mismatch: cache has {fp}, current group is {expected}"
        )));
    }
    let cutoff: f64 = parse(header(&mut lines, "cutoff")?, "cutoff")?;
    let method: Method = header(&mut lines, "method")?.parse().map_err(|_| Error::Cache("bad method".into()))?;
    if lines.next() != Some(COLUMNS) {
        return Err(Error::Cache("missing column header".into()));
    }
    let mut classes = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let f: Vec<&str> = line.splitn(5, ',').collect();
        if f.len() != 5 {
            return Err(Error::Cache(format!("malformed record '{line}'")));
        }
        classes.push(GeodesicClass {
            primitive_length: parse(f[0], "length")?,
            power: parse(f[1], "power")?,
            chi_value: parse(f[2], "chi")?,
            multiplicity: parse(f[3], "multiplicity")?,
            representative: f[4].parse::<Word>().map_err(Error::Cache)?,
        });
    }
    Ok(LengthSpectrum { cutoff, method, classes, group_fingerprint: fp.to_string() })
}

pub fn cache_path(dir: &Path, fingerprint: &str, method: Method) -> PathBuf {
    dir.join(format!("spectrum-{fingerprint}-{method}.csv"))
}

/// Uses a cached spectrum whose cutoff covers `l`, otherwise enumerates and
/// stores the result. A cache file for a different group is an error.
pub fn load_or_enumerate(
    dir: Option<&Path>,
    p: &SurfacePresentation,
    ms: &MultiplierSystem,
    l: f64,
    method: Method,
    budget: u64,
) -> Result<LengthSpectrum> {
    let fp = fingerprint(p, ms);
    let Some(dir) = dir else {
        return enumerate_geodesics_with(p, ms, l, method, budget);
    };
    let path = cache_path(dir, &fp, method);
    if path.exists() {
        let s = read_spectrum(&path, &fp)?;
        if s.cutoff >= l {
            return Ok(s.truncated(l));
        }
    }
    let s = enumerate_geodesics_with(p, ms, l, method, budget)?;
    write_spectrum(&path, &s)?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::multiplier::build_multiplier;
    use crate::fuchsian::presentation::build_bolza;
    use crate::fuchsian::spectrum::enumerate_geodesics;

    #[test]
    fn round_trip_is_exact() {
        let p = build_bolza();
        let ms = build_multiplier(&[1, -1, 1, -1], 1, &p).unwrap();
        let s = enumerate_geodesics(&p, &ms, 6.5, Method::Pruned).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_spectrum(&path, &s).unwrap();
        let t = read_spectrum(&path, &s.group_fingerprint).unwrap();
        assert_eq!(s, t);
        for (a, b) in s.classes.iter().zip(&t.classes) {
            assert_eq!(a.primitive_length.to_bits(), b.primitive_length.to_bits());
        }
    }

    #[test]
    fn fingerprint_mismatch_refused() {
        let p = build_bolza();
        let ms = build_multiplier(&[1, 1, 1, 1], 0, &p).unwrap();
        let other = build_multiplier(&[1, -1, 1, 1], 0, &p).unwrap();
        let s = enumerate_geodesics(&p, &ms, 3.2, Method::Pruned).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_spectrum(&path, &s).unwrap();
        let err = read_spectrum(&path, &fingerprint(&p, &other)).unwrap_err();
        assert!(matches!(err, Error::Cache(_)));
    }

    #[test]
    fn cache_reuse_truncates() {
        let p = build_bolza();
        let ms = build_multiplier(&[1, 1, 1, 1], 0, &p).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let big = load_or_enumerate(Some(dir.path()), &p, &ms, 6.5, Method::Pruned, 1_000_000).unwrap();
        let small = load_or_enumerate(Some(dir.path()), &p, &ms, 4.0, Method::Pruned, 1_000_000).unwrap();
        assert_eq!(small, big.truncated(4.0));
    }
}
