//! Security experiments as seeded Monte-Carlo games.
//!
//! Every trial draws its randomness from a ChaCha20 stream selected by the
//! trial index under a master seed, so reports are reproducible no matter
//! how rayon schedules the trials.

mod coic_game;
mod kla;
mod strategy;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use coic_game::{run_coic, CoicGame, CoicStrategy, CoicView, OracleWindow};
pub use kla::{run_ind_kla, run_omur, run_ow_kla, run_verification, KlaGame};
pub use strategy::{analytic_pass_probability, SideInfo, Strategy};

pub const Z_95: f64 = 1.959963984540054;
pub const Z_99: f64 = 2.5758293035489004;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // Exact arithmetic keeps p inside; rounding at p = 0 or 1 may not.
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

/// Outcome of one trial. `accepted` records whether the returned key passed
/// verification, whatever the game's notion of success.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub accepted: bool,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub strategy: String,
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub wilson_ci_95: (f64, f64),
    pub analytic: Option<f64>,
    pub seed: u64,
    /// Trials whose returned key was accepted.
    pub accepted: u64,
    /// Success rate among accepted trials, absent when none were accepted.
    pub conditional_estimate: Option<f64>,
}

impl ExperimentReport {
    pub fn wilson_ci_99(&self) -> (f64, f64) {
        wilson_interval(self.successes, self.trials, Z_99)
    }

    /// True when the analytic value lies in the 99% Wilson interval. Reports
    /// without an analytic value pass trivially.
    pub fn agrees_with_analytic(&self) -> bool {
        self.analytic.is_none_or(|a| {
            let (lo, hi) = self.wilson_ci_99();
            lo - 1e-12 <= a && a <= hi + 1e-12
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Random stream for trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs `trial` `trials` times in parallel and aggregates the outcomes.
pub fn monte_carlo<F>(
    experiment: &str,
    strategy: &str,
    trials: u64,
    seed: u64,
    analytic: Option<f64>,
    trial: F,
) -> Result<ExperimentReport>
where
    F: Fn(&mut ChaCha20Rng) -> Result<TrialOutcome> + Sync,
{
    if trials == 0 {
        return Err(Error::Params("at least one trial is required".into()));
    }
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| trial(&mut trial_rng(seed, t)))
        .collect::<Result<Vec<_>>>()?;
    let successes = outcomes.iter().filter(|o| o.success).count() as u64;
    let accepted = outcomes.iter().filter(|o| o.accepted).count() as u64;
    let accepted_successes = outcomes.iter().filter(|o| o.accepted && o.success).count() as u64;
    Ok(ExperimentReport {
        experiment: experiment.to_string(),
        strategy: strategy.to_string(),
        trials,
        successes,
        estimate: successes as f64 / trials as f64,
        wilson_ci_95: wilson_interval(successes, trials, Z_95),
        analytic,
        seed,
        accepted,
        conditional_estimate: (accepted > 0).then(|| accepted_successes as f64 / accepted as f64),
    })
}

/// One row of a benchmark table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub experiment: String,
    pub strategy: String,
    pub analytic: Option<f64>,
    pub empirical: f64,
    pub wilson_ci_95: (f64, f64),
}

impl From<&ExperimentReport> for BenchRow {
    fn from(r: &ExperimentReport) -> Self {
        Self {
            experiment: r.experiment.clone(),
            strategy: r.strategy.clone(),
            analytic: r.analytic,
            empirical: r.estimate,
            wilson_ci_95: r.wilson_ci_95,
        }
    }
}
