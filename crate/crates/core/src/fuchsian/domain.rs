//! Dirichlet domain centred at `o = i`, computed in the Klein model where it is
//! a Euclidean convex polygon cut out by the half-planes `k . u_g <= tanh(d_g / 2)`.

use num_complex::Complex64;
use serde::Serialize;
use std::collections::HashMap;

use super::presentation::SurfacePresentation;
use super::walk::{walk_ball, MatrixIndex};
use super::word::Word;
use crate::error::{Error, Result};
use crate::moebius::{apply, boundary_to_disc, disc_to_klein, to_disc, Mat2};

/// Candidate words up to this length seed the domain computation.
const SEED_DEPTH: usize = 4;
const EDGE_EPS: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct SidePairing {
    pub matrix: Mat2,
    pub parity: u32,
    pub word: Word,
    /// Index of the inverse side pairing.
    pub inverse: usize,
}

/// Half-plane `n . k <= r` in Klein coordinates.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HalfPlane {
    pub n: [f64; 2],
    pub r: f64,
}

impl HalfPlane {
    /// Bisector of `o` and `g o`, on the side of `o`.
    pub fn bisector(g: &Mat2) -> Option<HalfPlane> {
        let w = to_disc(apply(g, Complex64::i()));
        let rw = w.norm();
        if rw < 1e-12 {
            return None;
        }
        let d = g.displacement();
        Some(HalfPlane { n: [w.re / rw, w.im / rw], r: (0.5 * d).tanh() })
    }

    fn eval(&self, p: [f64; 2]) -> f64 {
        self.n[0] * p[0] + self.n[1] * p[1] - self.r
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DirichletDomain {
    pub sides: Vec<SidePairing>,
    pub planes: Vec<HalfPlane>,
    /// Vertices in the Klein model, counter-clockwise.
    pub vertices: Vec<[f64; 2]>,
    pub circumradius: f64,
}

/// Convex polygon with the index of the constraint that produced each edge
/// (edge `i` runs from vertex `i` to vertex `i+1`).
fn clip(poly: &[([f64; 2], usize)], h: &HalfPlane, label: usize) -> Vec<([f64; 2], usize)> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let (p, lp) = poly[i];
        let (q, _) = poly[(i + 1) % n];
        let fp = h.eval(p);
        let fq = h.eval(q);
        if fp <= 0.0 {
            out.push((p, lp));
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            let t = fp / (fp - fq);
            let x = [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])];
            // entering the half-plane keeps the old edge label, leaving starts the new edge
            out.push((x, if fp <= 0.0 { label } else { lp }));
        }
    }
    out
}

struct Candidate {
    matrix: Mat2,
    parity: u32,
    word: Word,
}

fn seed_candidates(p: &SurfacePresentation) -> Vec<Candidate> {
    let ng = p.generators.len();
    let mut index = MatrixIndex::new();
    let mut out: Vec<Candidate> = Vec::new();
    let mut frontier = vec![Candidate { matrix: Mat2::IDENTITY, parity: 0, word: Word::empty() }];
    index.insert(&Mat2::IDENTITY, 0);
    for _ in 0..SEED_DEPTH {
        let mut next = Vec::new();
        for c in &frontier {
            for g in 0..ng {
                for e in [1i8, -1] {
                    let x = p.generators[g];
                    let m = c.matrix * if e > 0 { x } else { x.inv() };
                    if index.get(&m).is_some() {
                        continue;
                    }
                    let mut letters = c.word.letters.clone();
                    letters.push((g as u8, e));
                    let cand = Candidate { matrix: m, parity: c.parity ^ (1 << g), word: Word::new(letters) };
                    index.insert(&m, 1);
                    next.push(cand);
                }
            }
        }
        out.extend(next.iter().map(|c| Candidate {
            matrix: c.matrix,
            parity: c.parity,
            word: c.word.clone(),
        }));
        frontier = next;
    }
    out
}

fn polygon_from(planes: &[HalfPlane]) -> Vec<([f64; 2], usize)> {
    let big = usize::MAX;
    let mut poly = vec![([-2.0, -2.0], big), ([2.0, -2.0], big), ([2.0, 2.0], big), ([-2.0, 2.0], big)];
    for (i, h) in planes.iter().enumerate() {
        poly = clip(&poly, h, i);
        if poly.is_empty() {
            break;
        }
    }
    poly
}

impl DirichletDomain {
    pub fn compute(p: &SurfacePresentation) -> Result<DirichletDomain> {
        let cands = seed_candidates(p);
        let planes: Vec<(usize, HalfPlane)> = cands
            .iter()
            .enumerate()
            .filter_map(|(i, c)| HalfPlane::bisector(&c.matrix).map(|h| (i, h)))
            .collect();
        let only: Vec<HalfPlane> = planes.iter().map(|&(_, h)| h).collect();
        let poly = polygon_from(&only);
        if poly.len() < 3 {
            return Err(Error::Group("Dirichlet domain is degenerate".into()));
        }
        let mut active: Vec<usize> = Vec::new();
        for i in 0..poly.len() {
            let (a, label) = poly[i];
            let (b, _) = poly[(i + 1) % poly.len()];
            let len = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
            if len <= EDGE_EPS {
                continue;
            }
            if label == usize::MAX || a[0].hypot(a[1]) >= 1.0 - 1e-12 {
                return Err(Error::Group(
                    "Dirichlet domain is not compact with the seed words; the group may not be cocompact"
                        .into(),
                ));
            }
            if !active.contains(&label) {
                active.push(label);
            }
        }
        let mut sides: Vec<SidePairing> = active
            .iter()
            .map(|&l| {
                let c = &cands[planes[l].0];
                SidePairing { matrix: c.matrix, parity: c.parity, word: c.word.clone(), inverse: usize::MAX }
            })
            .collect();
        let mut hp: Vec<HalfPlane> = active.iter().map(|&l| planes[l].1).collect();
        // order by normal angle
        let mut order: Vec<usize> = (0..sides.len()).collect();
        order.sort_by(|&a, &b| {
            let ta = hp[a].n[1].atan2(hp[a].n[0]);
            let tb = hp[b].n[1].atan2(hp[b].n[0]);
            ta.total_cmp(&tb)
        });
        sides = order.iter().map(|&i| sides[i].clone()).collect();
        hp = order.iter().map(|&i| hp[i]).collect();
        // pair inverses and make the lifts consistent: S[inv j] = S[j]^-1 exactly
        for j in 0..sides.len() {
            if sides[j].inverse != usize::MAX {
                continue;
            }
            let target = sides[j].matrix.inv().sign_normalized();
            let k = (0..sides.len())
                .find(|&k| sides[k].matrix.sign_normalized().max_abs_diff(&target) < 1e-8)
                .ok_or_else(|| Error::Group("side pairings are not closed under inversion".into()))?;
            sides[j].inverse = k;
            sides[k].inverse = j;
            if k != j {
                sides[k].matrix = sides[j].matrix.inv();
                sides[k].word = sides[j].word.inverse();
                sides[k].parity = sides[j].parity;
            }
        }
        let vertices: Vec<[f64; 2]> = polygon_from(&hp).into_iter().map(|(v, _)| v).collect();
        let circumradius = vertices
            .iter()
            .map(|v| v[0].hypot(v[1]).atanh())
            .fold(0.0f64, f64::max);
        let dom = DirichletDomain { sides, planes: hp, vertices, circumradius };
        dom.verify_complete()?;
        Ok(dom)
    }

    /// Every element with displacement at most `2R` gives a bisector that
    /// misses the interior of the computed polygon.
    fn verify_complete(&self) -> Result<()> {
        let cosh_max = (2.0 * self.circumradius).cosh() * (1.0 + 1e-9);
        let mut bad = 0usize;
        walk_ball(self, cosh_max.acosh(), 10_000_000, |m, _| {
            if let Some(h) = HalfPlane::bisector(m) {
                if self.vertices.iter().any(|&v| h.eval(v) > 1e-9) {
                    bad += 1;
                }
            }
        })?;
        if bad > 0 {
            return Err(Error::Group(format!(
                "Dirichlet domain check failed: {bad} group elements cut the polygon"
            )));
        }
        Ok(())
    }

    /// Hyperbolic area `(n - 2) pi - sum of interior angles`, with the angles
    /// taken on the hyperboloid.
    pub fn area(&self) -> f64 {
        let lift = |v: [f64; 2]| {
            let w = (1.0 - v[0] * v[0] - v[1] * v[1]).sqrt();
            [1.0 / w, v[0] / w, v[1] / w]
        };
        let dot = |a: [f64; 3], b: [f64; 3]| -a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let n = self.vertices.len();
        let pts: Vec<[f64; 3]> = self.vertices.iter().map(|&v| lift(v)).collect();
        let mut angles = 0.0;
        for i in 0..n {
            let b = pts[i];
            // tangent at b towards a point a: a + <a, b> b
            let tangent = |a: [f64; 3]| {
                let c = dot(a, b);
                [a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2]]
            };
            let u = tangent(pts[(i + n - 1) % n]);
            let w = tangent(pts[(i + 1) % n]);
            angles += (dot(u, w) / (dot(u, u) * dot(w, w)).sqrt()).clamp(-1.0, 1.0).acos();
        }
        (n as f64 - 2.0) * std::f64::consts::PI - angles
    }

    pub fn contains(&self, k: [f64; 2], tol: f64) -> bool {
        self.planes.iter().all(|h| h.eval(k) <= tol)
    }

    /// Part of the chord from `p` to `q` (Klein coordinates) inside the closed
    /// domain, widened by `tol`: parameter interval and whether the chord runs
    /// along a side.
    pub fn clip_chord(&self, p: [f64; 2], q: [f64; 2], tol: f64) -> Option<ChordClip> {
        let dir = [q[0] - p[0], q[1] - p[1]];
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        for h in &self.planes {
            let fp = h.eval(p) - tol;
            let den = h.n[0] * dir[0] + h.n[1] * dir[1];
            if den.abs() < 1e-300 {
                if fp > 0.0 {
                    return None;
                }
                continue;
            }
            let t = -fp / den;
            if den > 0.0 {
                t1 = t1.min(t);
            } else {
                t0 = t0.max(t);
            }
            if t0 > t1 {
                return None;
            }
        }
        let a = [p[0] + t0 * dir[0], p[1] + t0 * dir[1]];
        let b = [p[0] + t1 * dir[0], p[1] + t1 * dir[1]];
        let on_side = self.planes.iter().any(|h| h.eval(a).abs() < 1e-8 && h.eval(b).abs() < 1e-8);
        Some(ChordClip { a, b, on_side })
    }

    /// Clips the axis of a hyperbolic element against the closed domain.
    pub fn clip_axis(&self, m: &Mat2, tol: f64) -> Option<ChordClip> {
        let (x0, x1) = m.fixed_points()?;
        let p = boundary_to_disc(x0);
        let q = boundary_to_disc(x1);
        self.clip_chord([p.re, p.im], [q.re, q.im], tol)
    }

    /// Side pairings keyed by index, for diagnostics.
    pub fn side_words(&self) -> HashMap<usize, String> {
        self.sides.iter().enumerate().map(|(i, s)| (i, s.word.to_string())).collect()
    }

    /// Greedy descent `m -> m s` while the displacement strictly decreases.
    /// Returns the residual matrix and the side indices used.
    pub fn descend(&self, m: &Mat2) -> (Mat2, Vec<usize>) {
        let mut cur = *m;
        let mut ch = cur.cosh_displacement();
        let mut path = Vec::new();
        loop {
            let mut best = (f64::INFINITY, usize::MAX);
            for (i, s) in self.sides.iter().enumerate() {
                let c = (cur * s.matrix).cosh_displacement();
                if c < best.0 {
                    best = (c, i);
                }
            }
            if best.0 < ch * (1.0 - 1e-12) && path.len() < 100_000 {
                cur = cur * self.sides[best.1].matrix;
                ch = best.0;
                path.push(best.1);
            } else {
                return (cur, path);
            }
        }
    }

    /// Membership of a `PSL(2,R)` matrix in the group, with its expression as
    /// a product of side pairings: `m = eps * S[p_1] ... S[p_n]`.
    pub fn express(&self, m: &Mat2) -> Option<Expression> {
        let (res, path) = self.descend(m);
        // the residual fixes o only up to rotations, which must be excluded
        let negated = res.a + res.d < 0.0;
        let target = if negated { Mat2::IDENTITY.neg() } else { Mat2::IDENTITY };
        if res.max_abs_diff(&target) > 1e-6 {
            return None;
        }
        let sides: Vec<usize> = path.iter().rev().map(|&j| self.sides[j].inverse).collect();
        let parity = sides.iter().fold(0u32, |p, &j| p ^ self.sides[j].parity);
        Some(Expression { sides, parity, negated })
    }

    pub fn word_of(&self, e: &Expression) -> Word {
        let mut letters = Vec::new();
        for &j in &e.sides {
            letters.extend_from_slice(&self.sides[j].word.letters);
        }
        Word::new(letters)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ChordClip {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub on_side: bool,
}

impl ChordClip {
    /// Hyperbolic length of the clipped chord.
    pub fn length(&self) -> f64 {
        let n2 = |p: [f64; 2]| (1.0 - p[0] * p[0] - p[1] * p[1]).max(1e-300);
        let dot = self.a[0] * self.b[0] + self.a[1] * self.b[1];
        let c = (1.0 - dot) / (n2(self.a) * n2(self.b)).sqrt();
        c.max(1.0).acosh()
    }
}

/// `m = eps * S[sides[0]] * S[sides[1]] * ...` with `eps = -1` when `negated`.
#[derive(Clone, Debug)]
pub struct Expression {
    pub sides: Vec<usize>,
    pub parity: u32,
    pub negated: bool,
}

/// Klein coordinates of a point of the upper half-plane.
pub fn klein_point(z: Complex64) -> [f64; 2] {
    let k = disc_to_klein(to_disc(z));
    [k.re, k.im]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::presentation::{build_bolza, build_regular};

    #[test]
    fn bolza_octagon() {
        let p = build_bolza();
        let d = DirichletDomain::compute(&p).unwrap();
        assert_eq!(d.sides.len(), 8);
        assert_eq!(d.vertices.len(), 8);
        // cosh R = 3 + 2 sqrt 2 for the regular octagon with angles pi/4
        let r = (3.0 + 2.0 * 2f64.sqrt()).acosh();
        assert!((d.circumradius - r).abs() < 1e-10, "{}", d.circumradius);
        for (j, s) in d.sides.iter().enumerate() {
            assert_eq!(d.sides[s.inverse].inverse, j);
            assert!((s.matrix * d.sides[s.inverse].matrix).max_abs_diff(&Mat2::IDENTITY) < 1e-12);
            assert_eq!(s.word.len(), 1);
        }
        assert!((d.area() - 4.0 * std::f64::consts::PI).abs() < 1e-10, "{}", d.area());
    }

    #[test]
    fn genus_three_domain() {
        let p = build_regular(3).unwrap();
        let d = DirichletDomain::compute(&p).unwrap();
        assert_eq!(d.sides.len(), 12);
        // regular 12-gon with angles pi/6: cosh R = cot(pi/12) cot(pi/12)
        let c = 1.0 / (std::f64::consts::PI / 12.0).tan();
        assert!((d.circumradius.cosh() - c * c).abs() < 1e-8);
        assert!((d.area() - 8.0 * std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn express_round_trip() {
        let p = build_bolza();
        let d = DirichletDomain::compute(&p).unwrap();
        let w: Word = "1 3 -2 4 4 -1".parse().unwrap();
        let m = w.evaluate(&p.generators);
        let e = d.express(&m).unwrap();
        let back = d.word_of(&e).evaluate(&p.generators);
        let back = if e.negated { back.neg() } else { back };
        assert!(back.max_abs_diff(&m) < 1e-9);
        assert_eq!(e.parity, w.parity());
        assert!(d.express(&Mat2::dilation(1.0)).is_none());
        // a symmetry of the octagon composed with a group element is not in the group
        let rot = Mat2::rotation(std::f64::consts::PI / 4.0);
        assert!(d.express(&(m * rot)).is_none());
    }
}
