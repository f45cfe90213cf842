use serde::{Deserialize, Serialize};
use std::fmt;

use crate::moebius::Mat2;

/// A word in the generators: `(index, exponent)` letters with exponent `+-1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    pub letters: Vec<(u8, i8)>,
}

impl Word {
    pub fn new(letters: Vec<(u8, i8)>) -> Self {
        let mut w = Word { letters };
        w.reduce();
        w
    }

    pub fn empty() -> Self {
        Word::default()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Free reduction: cancels adjacent `x x^-1` pairs.
    pub fn reduce(&mut self) {
        let mut out: Vec<(u8, i8)> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            match out.last() {
                Some(&(g, e)) if g == l.0 && e == -l.1 => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        self.letters = out;
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&(g0, e0)), Some(&(g1, e1))) if self.letters.len() > 1 => !(g0 == g1 && e0 == -e1),
            _ => true,
        }
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|&(g, e)| (g, -e)).collect() }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut l = self.letters.clone();
        l.extend_from_slice(&other.letters);
        Word::new(l)
    }

    pub fn pow(&self, n: usize) -> Word {
        let mut l = Vec::with_capacity(self.letters.len() * n);
        for _ in 0..n {
            l.extend_from_slice(&self.letters);
        }
        Word::new(l)
    }

    /// Exponent sums mod 2 as a bit vector (bit `i` for generator `i`).
    pub fn parity(&self) -> u32 {
        self.letters.iter().fold(0u32, |p, &(g, _)| p ^ (1u32 << g))
    }

    /// Matrix product of the letters in `SL(2,R)`.
    pub fn evaluate(&self, generators: &[Mat2]) -> Mat2 {
        self.letters.iter().fold(Mat2::IDENTITY, |m, &(g, e)| {
            let x = generators[g as usize];
            m * if e > 0 { x } else { x.inv() }
        })
    }
}

impl fmt::Display for Word {
    /// Letters as 1-based signed indices, e.g. `1 -2 3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.letters.iter().map(|&(g, e)| format!("{}", (g as i32 + 1) * e as i32)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl std::str::FromStr for Word {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let mut letters = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let v: i32 = tok.parse().map_err(|_| format!("bad word letter '{tok}'"))?;
            if v == 0 || v.abs() > 32 {
                return Err(format!("word letter {v} out of range (1-based signed index)"));
            }
            letters.push(((v.abs() - 1) as u8, v.signum() as i8));
        }
        Ok(Word::new(letters))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_and_inverse() {
        let w = Word::new(vec![(0, 1), (1, 1), (1, -1), (2, -1)]);
        assert_eq!(w.letters, vec![(0, 1), (2, -1)]);
        assert!(w.concat(&w.inverse()).is_empty());
    }

    #[test]
    fn parity_of_square_is_zero() {
        let w: Word = "1 -2 3".parse().unwrap();
        assert_eq!(w.parity(), 0b111);
        assert_eq!(w.pow(2).parity(), 0);
    }

    #[test]
    fn text_round_trip() {
        let w: Word = "1 -2 3 -4 -1 2 -3 4".parse().unwrap();
        assert_eq!(w.to_string(), "1 -2 3 -4 -1 2 -3 4");
        assert!(w.is_cyclically_reduced());
        assert!(!"1 2 -1".parse::<Word>().unwrap().is_cyclically_reduced());
    }
}
