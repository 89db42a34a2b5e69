//! The consistent-or-inconsistent game.
//!
//! The adversary holds `(|0, dk0> + |1, dk1>) / sqrt(2)` over two key pairs
//! and may submit one state to an oracle that reports whether it lies in the
//! honest key state. It then receives encryptions of `m_a` under `ek0` and
//! `m_(a ^ b)` under `ek1` and must guess `b`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{monte_carlo, ExperimentReport, TrialOutcome};
use crate::bits::BitString;
use crate::coic::{self, CoicCiphertext, CoicDecKey, CoicEncKey, CoicParams};
use crate::error::{Error, Result};
use crate::pke::{Pke, Regev};
use crate::qsim::Ket;
use crate::skl::{coherent_block_decrypt, superposed_block, QuantumKey};

/// When the one oracle query may be made.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleWindow {
    /// Only before the challenge messages are sent, as in the game's
    /// definition.
    #[default]
    BeforeChallenge,
    /// Also after the challenge ciphertexts are received.
    Anytime,
}

#[derive(Debug, Clone)]
pub struct CoicView<P: Pke = Regev> {
    pub ek: [CoicEncKey<P>; 2],
    pub qdk: QuantumKey,
}

#[derive(Debug)]
pub struct CoicGame<P: Pke = Regev> {
    params: CoicParams<P>,
    window: OracleWindow,
    ek: [CoicEncKey<P>; 2],
    target: Ket,
    oracle_used: bool,
    /// `(a, b)` once the challenge is issued.
    coins: Option<(bool, bool)>,
}

impl<P: Pke> CoicGame<P> {
    pub fn new<R: Rng + ?Sized>(params: &CoicParams<P>, window: OracleWindow, rng: &mut R) -> Result<(Self, CoicView<P>)> {
        let k0 = coic::keygen(params, rng)?;
        let k1 = coic::keygen(params, rng)?;
        let target = superposed_block(0, &k0.dk.to_bits(), &k1.dk.to_bits())?;
        let ek = [k0.ek, k1.ek];
        let view = CoicView {
            ek: ek.clone(),
            qdk: QuantumKey::Blocks(vec![target.clone()]),
        };
        let game = Self {
            params: params.clone(),
            window,
            ek,
            target,
            oracle_used: false,
            coins: None,
        };
        Ok((game, view))
    }

    /// Projects `key` onto the honest key state and reports only the
    /// outcome; the state is consumed.
    pub fn oracle<R: Rng + ?Sized>(&mut self, key: QuantumKey, rng: &mut R) -> Result<bool> {
        if self.oracle_used {
            return Err(Error::Protocol("the verification oracle may be queried once".into()));
        }
        if self.coins.is_some() && self.window == OracleWindow::BeforeChallenge {
            return Err(Error::Protocol("the verification oracle closes at the challenge".into()));
        }
        self.oracle_used = true;
        let ket = match key {
            QuantumKey::Blocks(mut k) if k.len() == 1 => k.remove(0),
            QuantumKey::Joint(k) => k,
            QuantumKey::Blocks(k) => {
                return Err(Error::KeyMismatch(format!("expected one block, got {}", k.len())));
            }
        };
        Ok(ket.project(&self.target, rng)?.0)
    }

    pub fn challenge<R: Rng + ?Sized>(
        &mut self,
        m0: &BitString,
        m1: &BitString,
        rng: &mut R,
    ) -> Result<[CoicCiphertext<P>; 2]> {
        if self.coins.is_some() {
            return Err(Error::Protocol("challenge already requested".into()));
        }
        let (a, b): (bool, bool) = (rng.gen(), rng.gen());
        let pick = |i: bool| if i { m1 } else { m0 };
        let ct0 = coic::encrypt(&self.ek[0], pick(a), rng)?;
        let ct1 = coic::encrypt(&self.ek[1], pick(a ^ b), rng)?;
        self.coins = Some((a, b));
        Ok([ct0, ct1])
    }

    pub fn finish(self, guess: bool) -> Result<bool> {
        let (_, b) = self
            .coins
            .ok_or_else(|| Error::Protocol("no challenge was requested".into()))?;
        Ok(guess == b)
    }

    pub fn params(&self) -> &CoicParams<P> {
        &self.params
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoicStrategy {
    /// No oracle query; a coin flip.
    RandomGuess,
    /// Measures the key, decrypts its branch of the challenge and compares
    /// the result with the two messages. The plaintext of one branch is
    /// `m_a` or `m_(a ^ b)`, each uniform on its own, so the comparison
    /// carries no information about `b` and the guess is a coin flip.
    MeasureDecryptOneBranch,
    /// After the challenge, decrypts coherently with the superposed key and
    /// measures the plaintext. Consistent ciphertexts leave the key intact;
    /// inconsistent ones collapse it. The oracle then tells the cases apart:
    /// guess 0 on acceptance. Needs a post-challenge query.
    CoherentConsistencyTest,
    /// Submits two states to the oracle.
    DoubleQuery,
}

impl CoicStrategy {
    pub fn analytic(&self, window: OracleWindow) -> Option<f64> {
        match (self, window) {
            (CoicStrategy::CoherentConsistencyTest, OracleWindow::Anytime) => Some(0.75),
            (CoicStrategy::CoherentConsistencyTest | CoicStrategy::DoubleQuery, _) => None,
            _ => Some(0.5),
        }
    }

    /// Plays one game.
    pub fn play<P: Pke, R: Rng + ?Sized>(&self, game: &mut CoicGame<P>, view: CoicView<P>, rng: &mut R) -> Result<bool> {
        let params = game.params().clone();
        let m0 = BitString::random(params.msg_bits, rng);
        let mut m1 = m0.clone();
        m1.set(0, !m0.get(0));
        match self {
            CoicStrategy::RandomGuess => {
                game.challenge(&m0, &m1, rng)?;
                Ok(rng.gen())
            }
            CoicStrategy::MeasureDecryptOneBranch => {
                let (outcome, _) = view.qdk.measure_blocks(&[0], rng)?;
                let (beta, dk_bits) = &outcome[0];
                let cts = game.challenge(&m0, &m1, rng)?;
                let dk = CoicDecKey::from_bits(&params, dk_bits)?;
                let m = coic::decrypt(&dk, &cts[usize::from(*beta)])?;
                if m != m0 && m != m1 {
                    return Err(Error::Protocol("branch key failed to decrypt".into()));
                }
                Ok(rng.gen())
            }
            CoicStrategy::CoherentConsistencyTest => {
                let cts = game.challenge(&m0, &m1, rng)?;
                let (_, post) = coherent_block_decrypt(
                    &view.qdk,
                    0,
                    params.msg_bits,
                    |b, dk_bits| {
                        let dk = CoicDecKey::from_bits(&params, dk_bits).ok()?;
                        coic::decrypt(&dk, &cts[usize::from(b)]).ok()
                    },
                    rng,
                )?;
                Ok(!game.oracle(post, rng)?)
            }
            CoicStrategy::DoubleQuery => {
                game.oracle(view.qdk.clone(), rng)?;
                game.oracle(view.qdk, rng)?;
                game.challenge(&m0, &m1, rng)?;
                Ok(rng.gen())
            }
        }
    }
}

impl fmt::Display for CoicStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoicStrategy::RandomGuess => "random_guess",
            CoicStrategy::MeasureDecryptOneBranch => "measure_decrypt_one_branch",
            CoicStrategy::CoherentConsistencyTest => "coherent_consistency_test",
            CoicStrategy::DoubleQuery => "double_query",
        })
    }
}

impl FromStr for CoicStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "random_guess" => CoicStrategy::RandomGuess,
            "measure_decrypt_one_branch" => CoicStrategy::MeasureDecryptOneBranch,
            "coherent_consistency_test" => CoicStrategy::CoherentConsistencyTest,
            "double_query" => CoicStrategy::DoubleQuery,
            _ => return Err(Error::Parse(format!("unknown strategy {s:?}"))),
        })
    }
}

pub fn run_coic<P: Pke>(
    params: &CoicParams<P>,
    strategy: CoicStrategy,
    window: OracleWindow,
    trials: u64,
    seed: u64,
) -> Result<ExperimentReport> {
    let name = format!("{strategy}@{}", serde_json::to_value(window)?.as_str().unwrap_or_default());
    monte_carlo("coic-kla", &name, trials, seed, strategy.analytic(window), |rng| {
        let (mut game, view) = CoicGame::new(params, window, rng)?;
        let guess = strategy.play(&mut game, view, rng)?;
        let success = game.finish(guess)?;
        Ok(TrialOutcome { accepted: true, success })
    })
}
