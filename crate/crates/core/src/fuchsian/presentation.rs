use serde::Serialize;
use std::f64::consts::PI;

use super::word::Word;
use crate::error::{Error, Result};
use crate::moebius::Mat2;

const RELATOR_TOL: f64 = 1e-8;

/// A closed surface group given by `2g` hyperbolic generators and one relator.
#[derive(Clone, Debug, Serialize)]
pub struct SurfacePresentation {
    pub genus: u32,
    pub generators: Vec<Mat2>,
    pub relator: Word,
    pub area: f64,
}

/// Sign of the `SL(2,R)` lift of a relator that is `+-Id` in `PSL(2,R)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RelatorLift {
    PlusIdentity,
    MinusIdentity,
}

impl SurfacePresentation {
    /// Validates generators, relator and area.
    pub fn new(genus: u32, generators: Vec<Mat2>, relator: Word) -> Result<Self> {
        if genus < 2 {
            return Err(Error::Group(format!("genus must be at least 2, got {genus}")));
        }
        if generators.len() != 2 * genus as usize {
            return Err(Error::Group(format!(
                "genus {genus} needs {} generators, got {}",
                2 * genus,
                generators.len()
            )));
        }
        for (i, g) in generators.iter().enumerate() {
            if (g.det() - 1.0).abs() > RELATOR_TOL {
                return Err(Error::Group(format!(
                    "generator {} has determinant {} (expected 1)",
                    i + 1,
                    g.det()
                )));
            }
            if g.trace().abs() <= 2.0 {
                return Err(Error::Group(format!(
                    "generator {} is not hyperbolic (|trace| = {})",
                    i + 1,
                    g.trace().abs()
                )));
            }
        }
        if let Some(&(g, _)) = relator.letters.iter().find(|&&(g, _)| g as usize >= generators.len()) {
            return Err(Error::Group(format!("relator uses unknown generator {}", g + 1)));
        }
        let p = SurfacePresentation {
            genus,
            generators,
            relator,
            area: 4.0 * PI * (genus as f64 - 1.0),
        };
        p.relator_lift()?;
        Ok(p)
    }

    /// Evaluates the relator and reports the sign of its lift.
    pub fn relator_lift(&self) -> Result<RelatorLift> {
        let m = self.relator.evaluate(&self.generators);
        if m.max_abs_diff(&Mat2::IDENTITY) < RELATOR_TOL {
            Ok(RelatorLift::PlusIdentity)
        } else if m.max_abs_diff(&Mat2::IDENTITY.neg()) < RELATOR_TOL {
            Ok(RelatorLift::MinusIdentity)
        } else {
            Err(Error::Group(format!(
                "relator evaluates to [[{}, {}], [{}, {}]], not +-Id",
                m.a, m.b, m.c, m.d
            )))
        }
    }

    /// Key-value text accepted by [`load_presentation`].
    pub fn to_config_text(&self) -> String {
        let mut s = format!("genus = {}\n", self.genus);
        for (i, g) in self.generators.iter().enumerate() {
            s += &format!("generator.{} = {:.17e} {:.17e} {:.17e} {:.17e}\n", i + 1, g.a, g.b, g.c, g.d);
        }
        s += &format!("relator = {}\n", self.relator);
        s
    }
}

/// The regular-octagon genus-2 group.
pub fn build_bolza() -> SurfacePresentation {
    build_regular(2).expect("octagon group self-check")
}

/// Regular `4g`-gon with opposite sides paired: `g_j = R(j pi/2g) T R(j pi/2g)^-1`
/// with `cosh(l(T)/2) = cot(pi/4g)`, relator `g_0 g_1^-1 ... g_0^-1 g_1 ...`.
pub fn build_regular(genus: u32) -> Result<SurfacePresentation> {
    let n = 2 * genus as usize;
    let half_trace = 1.0 / (PI / (2.0 * n as f64)).tan();
    let t = Mat2::dilation(2.0 * half_trace.acosh());
    let generators = (0..n)
        .map(|j| {
            let r = Mat2::rotation(j as f64 * PI / n as f64);
            r * t * r.inv()
        })
        .collect();
    let sign = |j: usize| if j % 2 == 0 { 1i8 } else { -1i8 };
    let mut letters: Vec<(u8, i8)> = (0..n).map(|j| (j as u8, sign(j))).collect();
    letters.extend((0..n).map(|j| (j as u8, -sign(j))));
    SurfacePresentation::new(genus, generators, Word::new(letters))
}

/// Parsed key-value configuration: `genus`, `generator.N` (row-major, 1-based),
/// `relator` (signed 1-based indices) and optional `signs`.
pub struct PresentationConfig {
    pub presentation: SurfacePresentation,
    pub signs: Option<Vec<i8>>,
}

pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn parse_signs(v: &str) -> Result<Vec<i8>> {
    v.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| match t {
            "+" | "+1" | "1" => Ok(1),
            "-" | "-1" => Ok(-1),
            _ => Err(Error::Config(format!("bad sign '{t}'"))),
        })
        .collect()
}

pub fn load_presentation_config(text: &str) -> Result<PresentationConfig> {
    let mut genus = None;
    let mut gens: Vec<Option<Mat2>> = Vec::new();
    let mut relator = None;
    let mut signs = None;
    for (k, v) in parse_key_values(text)? {
        if k == "genus" {
            genus = Some(v.parse::<u32>().map_err(|_| Error::Config(format!("bad genus '{v}'")))?);
        } else if let Some(idx) = k.strip_prefix("generator.") {
            let i: usize = idx
                .parse()
                .ok()
                .filter(|&i| i >= 1 && i <= 32)
                .ok_or_else(|| Error::Config(format!("bad generator key '{k}'")))?;
            let e: Vec<f64> = v
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Config(format!("{k}: expected four numbers")))?;
            if e.len() != 4 {
                return Err(Error::Config(format!("{k}: expected four numbers, got {}", e.len())));
            }
            if gens.len() < i {
                gens.resize(i, None);
            }
            gens[i - 1] = Some(Mat2::new(e[0], e[1], e[2], e[3]));
        } else if k == "relator" {
            relator = Some(v.parse::<Word>().map_err(Error::Config)?);
        } else if k == "signs" {
            signs = Some(parse_signs(&v)?);
        } else {
            return Err(Error::Config(format!("unknown key '{k}'")));
        }
    }
    let genus = genus.ok_or_else(|| Error::Config("missing 'genus'".into()))?;
    let generators = gens
        .into_iter()
        .enumerate()
        .map(|(i, g)| g.ok_or_else(|| Error::Config(format!("missing generator.{}", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    let relator = relator.ok_or_else(|| Error::Config("missing 'relator'".into()))?;
    let presentation = SurfacePresentation::new(genus, generators, relator)?;
    Ok(PresentationConfig { presentation, signs })
}

pub fn load_presentation(text: &str) -> Result<SurfacePresentation> {
    Ok(load_presentation_config(text)?.presentation)
}
