//! Enumeration of group elements by displacement.
//!
//! Each element `eta != Id` has a parent `eta s`, where `s` is the side pairing
//! minimising the displacement of `eta s` (ties go to the smallest index). The
//! parent is strictly closer to `o`, so the parent links form a tree rooted at
//! `Id` whose subtrees can be cut at any displacement bound.

use std::collections::HashMap;

use super::domain::{DirichletDomain, SidePairing};
use crate::error::{Error, Result};
use crate::moebius::Mat2;

const TIE_REL: f64 = 1e-9;

fn is_parent_side(sides: &[SidePairing], c: &Mat2, cand: usize, cand_value: f64) -> bool {
    let lo = cand_value * (1.0 - TIE_REL);
    let hi = cand_value * (1.0 + TIE_REL);
    for (i, s) in sides.iter().enumerate() {
        if i == cand {
            continue;
        }
        let v = (*c * s.matrix).cosh_displacement();
        if v < lo || (i < cand && v <= hi) {
            return false;
        }
    }
    true
}

/// Visits every group element `M` with `d(o, M o) <= radius`, once per
/// `PSL(2,R)` element, with the parity vector of its word. The `SL(2,R)` lift
/// passed to `visit` is the product of side-pairing matrices along the tree.
pub fn walk_ball<F: FnMut(&Mat2, u32)>(
    dom: &DirichletDomain,
    radius: f64,
    budget: u64,
    mut visit: F,
) -> Result<u64> {
    let cmax = radius.cosh() * (1.0 + 1e-12);
    let sides = &dom.sides;
    let mut stack: Vec<(Mat2, u32, f64)> = vec![(Mat2::IDENTITY, 0, 1.0)];
    let mut count = 0u64;
    while let Some((m, parity, ch)) = stack.pop() {
        count += 1;
        if count > budget {
            return Err(Error::Budget(format!(
                "more than {budget} group elements within displacement {radius:.4}"
            )));
        }
        visit(&m, parity);
        for s in sides.iter() {
            let c = m * s.matrix;
            let cc = c.cosh_displacement();
            if cc > cmax || cc <= ch * (1.0 + 1e-12) {
                continue;
            }
            // c s^-1 = m, so m is the parent iff s^-1 wins the argmin
            if is_parent_side(sides, &c, s.inverse, ch) {
                stack.push((c, parity ^ s.parity, cc));
            }
        }
    }
    Ok(count)
}

/// Number of group elements within the given displacement of `o`.
pub fn ball_count(dom: &DirichletDomain, radius: f64, budget: u64) -> Result<u64> {
    walk_ball(dom, radius, budget, |_, _| {})
}

const QUANTUM: f64 = 1e-6;

/// Hash index of `PSL(2,R)` matrices with entrywise tolerance well below
/// `QUANTUM` and well above accumulated rounding.
#[derive(Default)]
pub struct MatrixIndex {
    map: HashMap<[i64; 4], u32>,
}

impl MatrixIndex {
    pub fn new() -> Self {
        MatrixIndex { map: HashMap::new() }
    }

    pub fn with_capacity(n: usize) -> Self {
        MatrixIndex { map: HashMap::with_capacity(n) }
    }

    fn scaled(m: &Mat2) -> [f64; 4] {
        let m = m.sign_normalized();
        [m.a / QUANTUM, m.b / QUANTUM, m.c / QUANTUM, m.d / QUANTUM]
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn insert(&mut self, m: &Mat2, v: u32) {
        let s = Self::scaled(m);
        self.map.insert(s.map(|x| x.round() as i64), v);
    }

    pub fn get(&self, m: &Mat2) -> Option<u32> {
        let s = Self::scaled(m);
        let key = s.map(|x| x.round() as i64);
        if let Some(&v) = self.map.get(&key) {
            return Some(v);
        }
        // values near a rounding boundary may have been stored in the neighbouring cell
        let mut alts: Vec<(usize, i64)> = Vec::new();
        for (i, x) in s.iter().enumerate() {
            let f = x - x.round();
            if f.abs() > 0.4 {
                alts.push((i, if f > 0.0 { 1 } else { -1 }));
            }
        }
        for mask in 1u32..(1 << alts.len()) {
            let mut k = key;
            for (b, &(i, step)) in alts.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    k[i] += step;
                }
            }
            if let Some(&v) = self.map.get(&k) {
                return Some(v);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::presentation::build_bolza;
    use std::collections::VecDeque;

    /// Breadth-first search over side pairings with a hash set.
    fn bfs_ball(dom: &DirichletDomain, radius: f64) -> usize {
        let cmax = radius.cosh() * (1.0 + 1e-12);
        let mut seen = MatrixIndex::new();
        seen.insert(&Mat2::IDENTITY, 0);
        let mut queue = VecDeque::from([Mat2::IDENTITY]);
        while let Some(m) = queue.pop_front() {
            for s in &dom.sides {
                let c = m * s.matrix;
                if c.cosh_displacement() <= cmax && seen.get(&c).is_none() {
                    seen.insert(&c, 0);
                    queue.push_back(c);
                }
            }
        }
        seen.len()
    }

    #[test]
    fn tree_walk_matches_bfs() {
        let dom = DirichletDomain::compute(&build_bolza()).unwrap();
        for r in [3.0, 6.0, 9.0] {
            let n = ball_count(&dom, r, 1_000_000).unwrap();
            assert_eq!(n as usize, bfs_ball(&dom, r), "radius {r}");
        }
    }

    #[test]
    fn ball_growth_matches_area() {
        // hyperbolic disc area 2 pi (cosh r - 1) over fundamental area 4 pi
        let dom = DirichletDomain::compute(&build_bolza()).unwrap();
        let r = 10.0;
        let n = ball_count(&dom, r, 10_000_000).unwrap() as f64;
        let expected = 0.5 * (r.cosh() - 1.0);
        assert!((n / expected - 1.0).abs() < 0.1, "{n} vs {expected}");
    }

    #[test]
    fn budget_is_enforced() {
        let dom = DirichletDomain::compute(&build_bolza()).unwrap();
        assert!(matches!(ball_count(&dom, 10.0, 1000), Err(Error::Budget(_))));
    }

    #[test]
    fn index_tolerates_rounding() {
        let mut idx = MatrixIndex::new();
        let m = Mat2::new(1.0000004999999, 0.3, 0.2, 1.06);
        idx.insert(&m, 7);
        let n = Mat2::new(1.0000005000001, 0.3, 0.2, 1.06);
        assert_eq!(idx.get(&n), Some(7));
        assert_eq!(idx.get(&m.neg()), Some(7));
        assert_eq!(idx.get(&Mat2::new(1.0, 0.3, 0.2, 1.07)), None);
    }
}
