use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::{HashMap, VecDeque};
use std::str::FromStr;

use super::domain::DirichletDomain;
use super::multiplier::MultiplierSystem;
use super::presentation::SurfacePresentation;
use super::walk::{walk_ball, MatrixIndex};
use super::word::Word;
use crate::error::{Error, Result};
use crate::moebius::Mat2;

pub const DEFAULT_BUDGET: u64 = 10_000_000;
/// Klein-model slack when testing whether an axis meets the closed domain.
const AXIS_TOL: f64 = 1e-9;
const LENGTH_REL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Pruned,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Method::Brute),
            "pruned" => Ok(Method::Pruned),
            _ => Err(Error::Config(format!("unknown enumeration method '{s}' (brute|pruned)"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Brute => "brute",
            Method::Pruned => "pruned",
        })
    }
}

/// Conjugacy classes `{gamma_p^n}` sharing length, power and character value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicClass {
    pub primitive_length: f64,
    pub power: u32,
    pub chi_value: i8,
    pub multiplicity: u32,
    pub representative: Word,
}

impl GeodesicClass {
    pub fn length(&self) -> f64 {
        self.power as f64 * self.primitive_length
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LengthSpectrum {
    pub cutoff: f64,
    pub method: Method,
    pub classes: Vec<GeodesicClass>,
    pub group_fingerprint: String,
}

impl LengthSpectrum {
    /// Shortest primitive length, if any class was found.
    pub fn systole(&self) -> Option<f64> {
        self.classes.iter().map(|c| c.primitive_length).reduce(f64::min)
    }

    /// Number of conjugacy classes counted with multiplicity.
    pub fn class_count(&self) -> u64 {
        self.classes.iter().map(|c| c.multiplicity as u64).sum()
    }

    pub fn primitive_count(&self) -> u64 {
        self.classes.iter().filter(|c| c.power == 1).map(|c| c.multiplicity as u64).sum()
    }

    /// Restriction to classes of length at most `l`.
    pub fn truncated(&self, l: f64) -> LengthSpectrum {
        LengthSpectrum {
            cutoff: l.min(self.cutoff),
            method: self.method,
            classes: self.classes.iter().filter(|c| c.length() <= l).cloned().collect(),
            group_fingerprint: self.group_fingerprint.clone(),
        }
    }
}

/// Hash of the generator matrices, relator and multiplier system.
pub fn fingerprint(p: &SurfacePresentation, ms: &MultiplierSystem) -> String {
    let mut h = Sha256::new();
    h.update(p.genus.to_le_bytes());
    for g in &p.generators {
        for x in [g.a, g.b, g.c, g.d] {
            h.update(x.to_bits().to_le_bytes());
        }
    }
    h.update(p.relator.to_string().as_bytes());
    for &s in &ms.signs {
        h.update([s as u8]);
    }
    h.update([ms.weight_parity]);
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Displacement bound: an element whose axis passes within `r` of `o` and
/// translates by `l` moves `o` by `2 asinh(sinh(l/2) cosh r)`.
pub fn search_radius(l: f64, circumradius: f64) -> f64 {
    2.0 * ((0.5 * l).sinh() * circumradius.cosh()).asinh() * (1.0 + 1e-12) + 1e-12
}

/// An element whose axis meets the closed domain, lifted with positive trace.
#[derive(Clone, Copy)]
struct AxisElement {
    m: Mat2,
    parity: u32,
    negated: bool,
}

impl AxisElement {
    fn from_lift(m: &Mat2, parity: u32) -> Self {
        let negated = m.trace() < 0.0;
        AxisElement { m: if negated { m.neg() } else { *m }, parity, negated }
    }
}

fn length_cap(l: f64) -> (f64, f64) {
    let tr_max = 2.0 * (0.5 * l).cosh() * (1.0 + 1e-12);
    (2.0 + 1e-9, tr_max)
}

struct RawClass {
    length: f64,
    power: u32,
    chi: i8,
    weight: f64,
    word: Word,
}

struct Enumerator<'a> {
    dom: DirichletDomain,
    ms: &'a MultiplierSystem,
}

impl<'a> Enumerator<'a> {
    /// Largest `n` such that `m` is an `n`-th power in the group, with the
    /// character of the root.
    fn power(&self, m: &Mat2, length: f64, systole: f64) -> Result<(u32, i8)> {
        let n_max = (length / systole * (1.0 + 1e-9)).floor() as u32;
        for n in (2..=n_max).rev() {
            let root = m.hyperbolic_root(n).ok_or_else(|| Error::Numerical("root of non-hyperbolic".into()))?;
            if let Some(e) = self.dom.express(&root) {
                return Ok((n, self.ms.chi_lift(e.parity, e.negated)));
            }
        }
        Ok((1, 0))
    }

    fn classify(&self, e: &AxisElement, systole: f64) -> Result<(f64, u32, i8, Word)> {
        let length = e.m.translation_length();
        let chi = self.ms.chi_lift(e.parity, e.negated);
        let expr = self
            .dom
            .express(&e.m)
            .ok_or_else(|| Error::Numerical("enumerated element failed the membership test".into()))?;
        if self.ms.chi_lift(expr.parity, expr.negated) != chi {
            return Err(Error::Numerical("character values disagree between two words".into()));
        }
        let (n, chi_p) = self.power(&e.m, length, systole)?;
        if n > 1 && chi_p.pow(n) != chi {
            return Err(Error::Numerical(format!("chi(gamma_p)^{n} != chi(gamma_p^{n})")));
        }
        Ok((length, n, chi, self.dom.word_of(&expr)))
    }

    fn pruned(&self, l: f64, budget: u64) -> Result<Vec<RawClass>> {
        let radius = search_radius(l, self.dom.circumradius);
        let (tr_min, tr_max) = length_cap(l);
        let mut elems: Vec<AxisElement> = Vec::new();
        walk_ball(&self.dom, radius, budget, |m, parity| {
            let t = m.trace().abs();
            if t > tr_min && t <= tr_max && self.dom.clip_axis(m, AXIS_TOL).is_some() {
                elems.push(AxisElement::from_lift(m, parity));
            }
        })?;
        let mut index = MatrixIndex::with_capacity(elems.len());
        for (i, e) in elems.iter().enumerate() {
            index.insert(&e.m, i as u32);
        }
        let mut uf = UnionFind::new(elems.len());
        for (i, e) in elems.iter().enumerate() {
            for s in &self.dom.sides {
                let c = self.dom.sides[s.inverse].matrix * e.m * s.matrix;
                if let Some(j) = index.get(&c) {
                    uf.union(i, j as usize);
                }
            }
        }
        let mut rep_of_root: HashMap<usize, usize> = HashMap::new();
        for i in 0..elems.len() {
            let r = uf.find(i);
            let better = match rep_of_root.get(&r) {
                None => true,
                Some(&j) => rep_order(&elems[i].m, &elems[j].m).is_lt(),
            };
            if better {
                rep_of_root.insert(r, i);
            }
        }
        let mut reps: Vec<usize> = rep_of_root.values().copied().collect();
        reps.sort_unstable();
        let systole = reps.iter().map(|&i| elems[i].m.translation_length()).fold(f64::INFINITY, f64::min);
        // inverse closure: the class of gamma^-1 has the same length and character
        for &i in &reps {
            let inv = elems[i].m.inv();
            let j = index
                .get(&inv)
                .ok_or_else(|| Error::Numerical("inverse of an enumerated element is missing".into()))?;
            let (a, b) = (&elems[i], &elems[j as usize]);
            if self.ms.chi_lift(a.parity, a.negated) != self.ms.chi_lift(b.parity, b.negated) {
                return Err(Error::Numerical("chi(gamma^-1) != chi(gamma)".into()));
            }
        }
        reps.iter()
            .map(|&i| {
                let (length, power, chi, word) = self.classify(&elems[i], systole)?;
                Ok(RawClass { length, power, chi, weight: 1.0, word })
            })
            .collect()
    }

    fn brute(&self, l: f64, budget: u64) -> Result<Vec<RawClass>> {
        let radius = search_radius(l, self.dom.circumradius);
        let cmax = radius.cosh();
        let (tr_min, tr_max) = length_cap(l);
        let mut seen = MatrixIndex::new();
        seen.insert(&Mat2::IDENTITY, 0);
        let mut queue = VecDeque::from([(Mat2::IDENTITY, 0u32)]);
        let mut hits: Vec<(AxisElement, f64)> = Vec::new();
        while let Some((m, parity)) = queue.pop_front() {
            let t = m.trace().abs();
            if t > tr_min && t <= tr_max {
                if let Some(clip) = self.dom.clip_axis(&m, AXIS_TOL) {
                    let w = if clip.on_side { 0.5 } else { 1.0 };
                    hits.push((AxisElement::from_lift(&m, parity), w * clip.length()));
                }
            }
            for s in &self.dom.sides {
                let c = m * s.matrix;
                if c.cosh_displacement() <= cmax && seen.get(&c).is_none() {
                    if seen.len() as u64 >= budget {
                        return Err(Error::Budget(format!(
                            "more than {budget} group elements within displacement {radius:.4}"
                        )));
                    }
                    seen.insert(&c, 0);
                    queue.push_back((c, parity ^ s.parity));
                }
            }
        }
        let systole = hits.iter().map(|(e, _)| e.m.translation_length()).fold(f64::INFINITY, f64::min);
        hits.sort_by(|a, b| rep_order(&a.0.m, &b.0.m));
        let mut out = Vec::with_capacity(hits.len());
        for (e, chord) in &hits {
            // axes that only touch a vertex
            if *chord < 1e-7 {
                continue;
            }
            let (length, power, chi, word) = self.classify(e, systole)?;
            // a class of gamma_p^n meets the domain along chords of total length l(gamma_p)
            out.push(RawClass { length, power, chi, weight: chord * power as f64 / length, word });
        }
        Ok(out)
    }
}

fn rep_order(x: &Mat2, y: &Mat2) -> std::cmp::Ordering {
    x.cosh_displacement()
        .total_cmp(&y.cosh_displacement())
        .then(x.a.total_cmp(&y.a))
        .then(x.b.total_cmp(&y.b))
        .then(x.c.total_cmp(&y.c))
        .then(x.d.total_cmp(&y.d))
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect() }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] as usize != i {
            let g = self.parent[self.parent[i] as usize];
            self.parent[i] = g;
            i = g as usize;
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo as u32;
        }
    }
}

/// Groups raw classes by length (relative tolerance), power and character;
/// summed weights must be integers.
fn merge(mut raw: Vec<RawClass>) -> Result<Vec<GeodesicClass>> {
    raw.sort_by(|a, b| a.length.total_cmp(&b.length));
    let mut out = Vec::new();
    let mut i = 0;
    while i < raw.len() {
        let l0 = raw[i].length;
        let mut j = i;
        while j < raw.len() && raw[j].length - l0 <= LENGTH_REL_TOL * l0.max(1.0) {
            j += 1;
        }
        let mut groups: Vec<(u32, i8, f64, Word, f64)> = Vec::new();
        for r in &raw[i..j] {
            match groups.iter_mut().find(|g| g.0 == r.power && g.1 == r.chi) {
                Some(g) => {
                    g.2 += r.weight;
                    if (r.word.len(), &r.word.letters) < (g.3.len(), &g.3.letters) {
                        g.3 = r.word.clone();
                    }
                }
                None => groups.push((r.power, r.chi, r.weight, r.word.clone(), r.length)),
            }
        }
        groups.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        for (n, chi, w, word, length) in groups {
            let m = w.round();
            if (w - m).abs() > 1e-4 || m < 1.0 {
                return Err(Error::Numerical(format!(
                    "class weights at length {length:.12} sum to {w}, not an integer"
                )));
            }
            out.push(GeodesicClass {
                primitive_length: l0 / n as f64,
                power: n,
                chi_value: chi,
                multiplicity: m as u32,
                representative: word,
            });
        }
        i = j;
    }
    Ok(out)
}

pub fn enumerate_geodesics(
    p: &SurfacePresentation,
    ms: &MultiplierSystem,
    l: f64,
    method: Method,
) -> Result<LengthSpectrum> {
    enumerate_geodesics_with(p, ms, l, method, DEFAULT_BUDGET)
}

/// Enumerates all conjugacy classes of hyperbolic elements with translation
/// length at most `l`, each represented with positive trace. A class meets
/// the Dirichlet domain `F` in the sense that some conjugate has its axis
/// through the closed domain; such conjugates move `o` by at most
/// [`search_radius`].
pub fn enumerate_geodesics_with(
    p: &SurfacePresentation,
    ms: &MultiplierSystem,
    l: f64,
    method: Method,
    budget: u64,
) -> Result<LengthSpectrum> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::Domain(format!("length cutoff must be positive, got {l}")));
    }
    if ms.signs.len() != p.generators.len() {
        return Err(Error::Group("multiplier system does not match the presentation".into()));
    }
    let en = Enumerator { dom: DirichletDomain::compute(p)?, ms };
    let raw = match method {
        Method::Pruned => en.pruned(l, budget)?,
        Method::Brute => en.brute(l, budget)?,
    };
    Ok(LengthSpectrum { cutoff: l, method, classes: merge(raw)?, group_fingerprint: fingerprint(p, ms) })
}
