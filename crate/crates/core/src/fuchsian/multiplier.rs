use serde::{Deserialize, Serialize};

use super::presentation::{RelatorLift, SurfacePresentation};
use super::word::Word;
use crate::error::{Error, Result};

/// Real character of the lifted group: a sign per generator, extended to
/// `-Id` by `(-1)^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplierSystem {
    pub signs: Vec<i8>,
    pub weight_parity: u8,
}

impl MultiplierSystem {
    /// Character on words with the given exponent-sum parity vector.
    pub fn chi_parity(&self, parity: u32) -> i8 {
        self.signs
            .iter()
            .enumerate()
            .filter(|&(i, _)| parity >> i & 1 == 1)
            .fold(1i8, |c, (_, &s)| c * s)
    }

    /// `chi(-Id)`.
    pub fn chi_minus_identity(&self) -> i8 {
        if self.weight_parity == 1 {
            -1
        } else {
            1
        }
    }

    /// Character of `eps * M_w`, where `M_w` is the matrix product of a word
    /// with the given parity and `eps = -1` when `negated`.
    pub fn chi_lift(&self, parity: u32, negated: bool) -> i8 {
        let c = self.chi_parity(parity);
        if negated {
            c * self.chi_minus_identity()
        } else {
            c
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.signs.iter().all(|&s| s == 1)
    }
}

pub fn build_multiplier(signs: &[i8], k: i32, p: &SurfacePresentation) -> Result<MultiplierSystem> {
    if signs.len() != p.generators.len() {
        return Err(Error::Group(format!(
            "expected {} generator signs, got {}",
            p.generators.len(),
            signs.len()
        )));
    }
    if let Some(s) = signs.iter().find(|&&s| s != 1 && s != -1) {
        return Err(Error::Group(format!("character sign {s} is not +-1")));
    }
    let ms = MultiplierSystem { signs: signs.to_vec(), weight_parity: k.rem_euclid(2) as u8 };
    let lift = p.relator_lift()?;
    let chi_rel = ms.chi_lift(p.relator.parity(), lift == RelatorLift::MinusIdentity);
    if chi_rel != 1 {
        return Err(Error::Group(match lift {
            RelatorLift::MinusIdentity if ms.weight_parity == 1 => {
                "inconsistent spin structure: relator lifts to -Id with odd weight".to_string()
            }
            _ => "character is not trivial on the relator".to_string(),
        }));
    }
    Ok(ms)
}

pub fn evaluate_chi(ms: &MultiplierSystem, w: &Word) -> i8 {
    ms.chi_parity(w.parity())
}
