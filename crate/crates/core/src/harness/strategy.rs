//! Adversary strategies against leased keys.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::qsim::Ket;
use crate::skl::{LeasingScheme, QuantumKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Return the key untouched and keep nothing.
    Honest,
    /// Measure every block, return the collapsed key, keep a copy.
    MeasureKeep,
    /// Measure the first `k` blocks only.
    PartialMeasure(usize),
    /// Keep the key and never return it.
    NeverReturn,
    /// Measure every block and return the collapsed key twice.
    MeasureCloneTwice,
    /// Return a fresh state with random branch keys.
    JunkKey,
}

/// What the adversary holds after returning the key.
#[derive(Debug, Clone, PartialEq)]
pub struct SideInfo {
    /// A decryption key still usable after the return, if any.
    pub kept: Option<QuantumKey>,
}

impl Strategy {
    pub fn name(&self) -> String {
        self.to_string()
    }

    /// Acts on a freshly leased key: returns the keys submitted to
    /// verification (in order) and the retained side information.
    pub fn act_on_key<S: LeasingScheme, R: Rng + ?Sized>(
        &self,
        scheme: &S,
        key: &QuantumKey,
        rng: &mut R,
    ) -> Result<(Vec<QuantumKey>, SideInfo)> {
        let blocks = scheme.blocks();
        Ok(match *self {
            Strategy::Honest => (vec![key.clone()], SideInfo { kept: None }),
            Strategy::NeverReturn => (vec![], SideInfo { kept: Some(key.clone()) }),
            Strategy::MeasureKeep => {
                let (_, collapsed) = key.measure_blocks(&(0..blocks).collect::<Vec<_>>(), rng)?;
                (vec![collapsed.clone()], SideInfo { kept: Some(collapsed) })
            }
            Strategy::PartialMeasure(k) => {
                if k > blocks {
                    return Err(Error::Params(format!("cannot measure {k} of {blocks} blocks")));
                }
                let (_, collapsed) = key.measure_blocks(&(0..k).collect::<Vec<_>>(), rng)?;
                let kept = (k == blocks).then(|| collapsed.clone());
                (vec![collapsed], SideInfo { kept })
            }
            Strategy::MeasureCloneTwice => {
                let (_, collapsed) = key.measure_blocks(&(0..blocks).collect::<Vec<_>>(), rng)?;
                (vec![collapsed.clone(), collapsed.clone()], SideInfo { kept: Some(collapsed) })
            }
            Strategy::JunkKey => (vec![junk_like(key, rng)?], SideInfo { kept: None }),
        })
    }

    /// Tries to decrypt the challenge with the retained key.
    pub fn act_on_challenge<S: LeasingScheme, R: Rng + ?Sized>(
        &self,
        scheme: &S,
        aux: &S::Aux,
        side: &SideInfo,
        ct: &S::Ciphertext,
        rng: &mut R,
    ) -> Result<Option<BitString>> {
        match &side.kept {
            Some(k) => Ok(scheme.decrypt(aux, k, ct, rng)?.0),
            None => Ok(None),
        }
    }
}

/// Equal superposition of two uniformly random labels over each ket's layout.
fn junk_like<R: Rng + ?Sized>(key: &QuantumKey, rng: &mut R) -> Result<QuantumKey> {
    let kets = key
        .kets()
        .iter()
        .map(|k| {
            let layout = k.layout().clone();
            let mut label = || -> Vec<BitString> {
                layout.registers().iter().map(|r| BitString::random(r.width, rng)).collect()
            };
            let (a, b) = (label(), label());
            let one = Complex64::new(1.0, 0.0);
            let terms = if a == b { vec![(a, one)] } else { vec![(a, one), (b, one)] };
            Ok(Ket::superpose(layout, terms)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(match key {
        QuantumKey::Blocks(_) => QuantumKey::Blocks(kets),
        QuantumKey::Joint(_) => QuantumKey::Joint(kets.into_iter().next().expect("one ket")),
    })
}

/// Probability that the first key returned by `strategy` passes
/// verification: the product over blocks of `|<target|returned>|^2`, which
/// is 1/2 for a measured block and 1 for an untouched one. `None` when the
/// value depends on sampled junk.
pub fn analytic_pass_probability(strategy: Strategy, blocks: usize) -> Result<Option<f64>> {
    let half_pow = |k: usize| 0.5f64.powi(k as i32);
    Ok(match strategy {
        Strategy::Honest => Some(1.0),
        Strategy::MeasureKeep | Strategy::MeasureCloneTwice => Some(half_pow(blocks)),
        Strategy::PartialMeasure(k) if k > blocks => {
            return Err(Error::Params(format!("cannot measure {k} of {blocks} blocks")))
        }
        Strategy::PartialMeasure(k) => Some(half_pow(k)),
        Strategy::NeverReturn => Some(0.0),
        Strategy::JunkKey => None,
    })
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Honest => f.write_str("honest"),
            Strategy::MeasureKeep => f.write_str("measure_keep"),
            Strategy::PartialMeasure(k) => write!(f, "partial_measure:{k}"),
            Strategy::NeverReturn => f.write_str("never_return"),
            Strategy::MeasureCloneTwice => f.write_str("measure_clone_twice"),
            Strategy::JunkKey => f.write_str("junk_key"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(k) = s.strip_prefix("partial_measure:") {
            let k = k
                .parse()
                .map_err(|_| Error::Parse(format!("bad block count in strategy {s:?}")))?;
            return Ok(Strategy::PartialMeasure(k));
        }
        Ok(match s {
            "honest" => Strategy::Honest,
            "measure_keep" => Strategy::MeasureKeep,
            "never_return" => Strategy::NeverReturn,
            "measure_clone_twice" => Strategy::MeasureCloneTwice,
            "junk_key" => Strategy::JunkKey,
            _ => return Err(Error::Parse(format!("unknown strategy {s:?}"))),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in [
            Strategy::Honest,
            Strategy::MeasureKeep,
            Strategy::PartialMeasure(3),
            Strategy::NeverReturn,
            Strategy::MeasureCloneTwice,
            Strategy::JunkKey,
        ] {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!("measure".parse::<Strategy>().is_err());
        assert!("partial_measure:x".parse::<Strategy>().is_err());
    }

    #[test]
    fn analytic_values() {
        assert_eq!(analytic_pass_probability(Strategy::MeasureKeep, 1).unwrap(), Some(0.5));
        assert_eq!(analytic_pass_probability(Strategy::MeasureKeep, 4).unwrap(), Some(0.0625));
        assert_eq!(analytic_pass_probability(Strategy::Honest, 7).unwrap(), Some(1.0));
        assert_eq!(analytic_pass_probability(Strategy::PartialMeasure(2), 4).unwrap(), Some(0.25));
        assert!(analytic_pass_probability(Strategy::PartialMeasure(5), 4).is_err());
    }
}
