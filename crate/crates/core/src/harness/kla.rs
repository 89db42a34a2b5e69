//! Key-leasing games: verification, one-wayness, indistinguishability and
//! one-more unreturnability.

use rand::Rng;

use super::strategy::{analytic_pass_probability, SideInfo, Strategy};
use super::{monte_carlo, ExperimentReport, TrialOutcome};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::skl::{LeasingScheme, QuantumKey};

/// What the adversary receives at the start of a key-leasing game.
#[derive(Debug, Clone)]
pub struct KlaView<S: LeasingScheme> {
    pub ek: S::EncKey,
    pub aux: S::Aux,
    pub qdk: QuantumKey,
}

#[derive(Debug, Clone, PartialEq)]
enum Challenge {
    None,
    Ow { m: BitString, live: bool },
    Ind { coin: bool, live: bool },
}

/// Challenger state for the key-leasing games. The verification oracle may
/// be queried any number of times, before or after the challenge; the flag
/// `V` is set by the first acceptance, and a challenge requested while `V`
/// is unset makes the experiment output 0.
#[derive(Debug)]
pub struct KlaGame<'s, S: LeasingScheme> {
    scheme: &'s S,
    ek: S::EncKey,
    vk: S::VerKey,
    verified: bool,
    acceptances: usize,
    challenge: Challenge,
}

impl<'s, S: LeasingScheme> KlaGame<'s, S> {
    pub fn new<R: Rng + ?Sized>(scheme: &'s S, rng: &mut R) -> Result<(Self, KlaView<S>)> {
        let keys = scheme.keygen(rng)?;
        let view = KlaView {
            ek: keys.ek.clone(),
            aux: keys.aux,
            qdk: keys.qdk,
        };
        let game = Self {
            scheme,
            ek: keys.ek,
            vk: keys.vk,
            verified: false,
            acceptances: 0,
            challenge: Challenge::None,
        };
        Ok((game, view))
    }

    pub fn verify<R: Rng + ?Sized>(&mut self, key: &QuantumKey, rng: &mut R) -> Result<bool> {
        let accepted = self.scheme.verify(&self.vk, key, rng)?.accepted;
        if accepted {
            self.verified = true;
            self.acceptances += 1;
        }
        Ok(accepted)
    }

    pub fn verified(&self) -> bool {
        self.verified
    }

    pub fn acceptances(&self) -> usize {
        self.acceptances
    }

    fn check_fresh(&self) -> Result<()> {
        match self.challenge {
            Challenge::None => Ok(()),
            _ => Err(Error::Protocol("challenge already requested".into())),
        }
    }

    /// Encrypts a uniform message, or returns `None` if `V` is unset.
    pub fn ow_challenge<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Option<S::Ciphertext>> {
        self.check_fresh()?;
        let m = self.scheme.sample_message(rng);
        let ct = self.verified.then(|| self.scheme.encrypt(&self.ek, &m, rng)).transpose()?;
        self.challenge = Challenge::Ow { m, live: self.verified };
        Ok(ct)
    }

    /// Encrypts `m_coin`, or returns `None` if `V` is unset.
    pub fn ind_challenge<R: Rng + ?Sized>(
        &mut self,
        m0: &BitString,
        m1: &BitString,
        rng: &mut R,
    ) -> Result<Option<S::Ciphertext>> {
        self.check_fresh()?;
        let bits = self.scheme.message_bits();
        for m in [m0, m1] {
            if m.len() != bits {
                return Err(Error::Length {
                    what: "challenge message",
                    expected: bits,
                    actual: m.len(),
                });
            }
        }
        let coin: bool = rng.gen();
        let m = if coin { m1 } else { m0 };
        let ct = self.verified.then(|| self.scheme.encrypt(&self.ek, m, rng)).transpose()?;
        self.challenge = Challenge::Ind { coin, live: self.verified };
        Ok(ct)
    }

    /// Success iff the challenge was issued and `guess` is the message.
    pub fn ow_finish(self, guess: Option<&BitString>) -> Result<TrialOutcome> {
        match self.challenge {
            Challenge::Ow { m, live } => Ok(TrialOutcome {
                accepted: live,
                success: live && guess == Some(&m),
            }),
            _ => Err(Error::Protocol("no one-wayness challenge was requested".into())),
        }
    }

    /// The experiment outputs the guess if the challenge was issued and 0
    /// otherwise; success means the output equals the coin.
    pub fn ind_finish(self, guess: bool) -> Result<TrialOutcome> {
        match self.challenge {
            Challenge::Ind { coin, live } => {
                let output = live && guess;
                Ok(TrialOutcome {
                    accepted: live,
                    success: output == coin,
                })
            }
            _ => Err(Error::Protocol("no indistinguishability challenge was requested".into())),
        }
    }
}

fn submit<S: LeasingScheme, R: Rng + ?Sized>(game: &mut KlaGame<'_, S>, keys: &[QuantumKey], rng: &mut R) -> Result<()> {
    for k in keys {
        game.verify(k, rng)?;
    }
    Ok(())
}

/// Whether the strategy keeps a key that decrypts exactly.
fn keeps_working_key(strategy: Strategy, blocks: usize) -> bool {
    match strategy {
        Strategy::MeasureKeep | Strategy::MeasureCloneTwice | Strategy::NeverReturn => true,
        Strategy::PartialMeasure(k) => k == blocks,
        Strategy::Honest | Strategy::JunkKey => false,
    }
}

/// Probability that at least one returned key is accepted.
fn analytic_verified(strategy: Strategy, blocks: usize) -> Result<Option<f64>> {
    let p = analytic_pass_probability(strategy, blocks)?;
    Ok(match strategy {
        Strategy::MeasureCloneTwice => p.map(|p| 1.0 - (1.0 - p) * (1.0 - p)),
        _ => p,
    })
}

/// Acceptance rate of the first key the strategy returns.
pub fn run_verification<S: LeasingScheme>(scheme: &S, strategy: Strategy, trials: u64, seed: u64) -> Result<ExperimentReport> {
    let analytic = analytic_pass_probability(strategy, scheme.blocks())?;
    monte_carlo("verification", &strategy.name(), trials, seed, analytic, |rng| {
        let keys = scheme.keygen(rng)?;
        let (returned, _) = strategy.act_on_key(scheme, &keys.qdk, rng)?;
        let accepted = match returned.first() {
            Some(k) => scheme.verify(&keys.vk, k, rng)?.accepted,
            None => false,
        };
        Ok(TrialOutcome {
            accepted,
            success: accepted,
        })
    })
}

pub fn run_ow_kla<S: LeasingScheme>(scheme: &S, strategy: Strategy, trials: u64, seed: u64) -> Result<ExperimentReport> {
    let blocks = scheme.blocks();
    let guess_rate = if keeps_working_key(strategy, blocks) {
        1.0
    } else {
        0.5f64.powi(scheme.message_bits() as i32)
    };
    let analytic = analytic_verified(strategy, blocks)?.map(|v| v * guess_rate);
    monte_carlo("ow-kla", &strategy.name(), trials, seed, analytic, |rng| {
        let (mut game, view) = KlaGame::new(scheme, rng)?;
        let (returned, side) = strategy.act_on_key(scheme, &view.qdk, rng)?;
        submit(&mut game, &returned, rng)?;
        let guess = match game.ow_challenge(rng)? {
            Some(ct) => guess_message(scheme, &view.aux, &side, &ct, strategy, rng)?,
            None => None,
        };
        game.ow_finish(guess.as_ref())
    })
}

fn guess_message<S: LeasingScheme, R: Rng + ?Sized>(
    scheme: &S,
    aux: &S::Aux,
    side: &SideInfo,
    ct: &S::Ciphertext,
    strategy: Strategy,
    rng: &mut R,
) -> Result<Option<BitString>> {
    Ok(Some(match strategy.act_on_challenge(scheme, aux, side, ct, rng)? {
        Some(m) => m,
        None => scheme.sample_message(rng),
    }))
}

/// Challenge messages differ in their first bit; the guess is 1 iff the
/// kept key decrypts to `m1`, and a coin flip when nothing decrypts.
pub fn run_ind_kla<S: LeasingScheme>(scheme: &S, strategy: Strategy, trials: u64, seed: u64) -> Result<ExperimentReport> {
    let blocks = scheme.blocks();
    let conditional = if keeps_working_key(strategy, blocks) { 1.0 } else { 0.5 };
    let analytic = analytic_verified(strategy, blocks)?.map(|v| v * conditional + (1.0 - v) * 0.5);
    monte_carlo("ind-kla", &strategy.name(), trials, seed, analytic, |rng| {
        let (mut game, view) = KlaGame::new(scheme, rng)?;
        let (returned, side) = strategy.act_on_key(scheme, &view.qdk, rng)?;
        submit(&mut game, &returned, rng)?;
        let m0 = scheme.sample_message(rng);
        let mut m1 = m0.clone();
        m1.set(0, !m0.get(0));
        let guess = match game.ind_challenge(&m0, &m1, rng)? {
            Some(ct) => match strategy.act_on_challenge(scheme, &view.aux, &side, &ct, rng)? {
                Some(m) if m == m1 => true,
                Some(m) if m == m0 => false,
                _ => rng.gen(),
            },
            None => rng.gen(),
        };
        game.ind_finish(guess)
    })
}

/// Success iff at least two returned keys are accepted.
pub fn run_omur<S: LeasingScheme>(scheme: &S, strategy: Strategy, trials: u64, seed: u64) -> Result<ExperimentReport> {
    let analytic = match strategy {
        Strategy::MeasureCloneTwice => analytic_pass_probability(strategy, scheme.blocks())?.map(|p| p * p),
        Strategy::JunkKey => None,
        _ => Some(0.0),
    };
    monte_carlo("omur", &strategy.name(), trials, seed, analytic, |rng| {
        let (mut game, view) = KlaGame::new(scheme, rng)?;
        let (returned, _) = strategy.act_on_key(scheme, &view.qdk, rng)?;
        submit(&mut game, &returned, rng)?;
        Ok(TrialOutcome {
            accepted: game.verified(),
            success: game.acceptances() >= 2,
        })
    })
}
