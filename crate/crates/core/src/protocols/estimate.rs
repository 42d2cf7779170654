//! Seeded Monte Carlo estimation of acceptance probabilities.
//!
//! Trials are split into fixed-size shards. Shard `s` draws its trial seeds
//! from ChaCha8 stream `s` of the master seed, so results do not depend on
//! the number of worker threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::layout::Protocol;
use super::run::{run_trial, ProtocolTranscript, RunBranch};
use super::setup::ProtocolSetup;
use super::strategy::ProverStrategy;
use crate::distinguish::{qcd_bounds, qcd_bounds_at, qsd_bounds, qsd_bounds_at, BoundReport, Instance};
use crate::{Error, Result};

pub const SHARD_SIZE: usize = 1000;
pub const DEFAULT_EPSILON: f64 = 0.01;

/// Probability of the computation branch: the optimal q* or a fixed value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QChoice {
    Value(f64),
    Named(Optimal),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimal {
    Optimal,
}

impl Default for QChoice {
    fn default() -> Self {
        QChoice::Named(Optimal::Optimal)
    }
}

/// Parameters that override the instance's own thresholds.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub r: Option<u32>,
    pub a: Option<f64>,
    pub b: Option<f64>,
}

/// Builds the per-instance setup with bounds at the same parameters.
pub fn setup_for_instance(
    instance: &Instance,
    q: QChoice,
    epsilon: f64,
    overrides: Overrides,
) -> Result<ProtocolSetup> {
    match instance {
        Instance::Qsd(inst) => {
            let r = overrides.r.unwrap_or(inst.r());
            let star = qsd_bounds(epsilon, r)?;
            let q = resolve(q, star.q_star);
            ProtocolSetup::qsd(inst, q, epsilon, qsd_bounds_at(epsilon, r, q)?)
        }
        Instance::Qcd(inst) => {
            let (a, b) = (overrides.a.unwrap_or(inst.a), overrides.b.unwrap_or(inst.b));
            let star = qcd_bounds(epsilon, a, b)?;
            let q = resolve(q, star.q_star);
            ProtocolSetup::qcd(inst, q, epsilon, qcd_bounds_at(epsilon, a, b, q)?)
        }
    }
}

fn resolve(q: QChoice, q_star: f64) -> f64 {
    match q {
        QChoice::Value(v) => v,
        QChoice::Named(Optimal::Optimal) => q_star,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceEstimate {
    pub protocol: Protocol,
    pub strategy: String,
    pub seed: u64,
    pub trials: usize,
    pub q: f64,
    pub epsilon: f64,
    pub accepted: usize,
    pub p_hat: f64,
    /// Binomial standard error √(p̂(1 − p̂)/trials).
    pub stderr: f64,
    pub compute_trials: usize,
    pub compute_accepted: usize,
    pub test_trials: usize,
    pub test_accepted: usize,
    pub analytic: BoundReport,
}

impl AcceptanceEstimate {
    pub fn p_comp_hat(&self) -> Option<f64> {
        (self.compute_trials > 0).then(|| self.compute_accepted as f64 / self.compute_trials as f64)
    }

    pub fn p_test_hat(&self) -> Option<f64> {
        (self.test_trials > 0).then(|| self.test_accepted as f64 / self.test_trials as f64)
    }
}

/// Trial seeds for every shard, derived from `seed`.
pub fn trial_seeds(trials: usize, seed: u64) -> Vec<Vec<u64>> {
    (0..trials.div_ceil(SHARD_SIZE))
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let len = SHARD_SIZE.min(trials - s * SHARD_SIZE);
            (0..len).map(|_| rng.next_u64()).collect()
        })
        .collect()
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    Ok(())
}

/// Every transcript, in trial order.
pub fn run_trials(
    setup: &ProtocolSetup,
    strategy: &dyn ProverStrategy,
    trials: usize,
    seed: u64,
) -> Result<Vec<ProtocolTranscript>> {
    check_trials(trials)?;
    let shards = trial_seeds(trials, seed)
        .into_par_iter()
        .map(|seeds| {
            seeds
                .into_iter()
                .map(|s| run_trial(setup, strategy, s))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(shards.into_iter().flatten().collect())
}

#[derive(Clone, Copy, Default)]
struct Tally {
    compute: usize,
    compute_accepted: usize,
    test: usize,
    test_accepted: usize,
}

impl Tally {
    fn add(&mut self, t: &ProtocolTranscript) {
        match t.run_branch {
            RunBranch::Compute => {
                self.compute += 1;
                self.compute_accepted += usize::from(t.accepted);
            }
            RunBranch::Test => {
                self.test += 1;
                self.test_accepted += usize::from(t.accepted);
            }
        }
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.compute += o.compute;
        self.compute_accepted += o.compute_accepted;
        self.test += o.test;
        self.test_accepted += o.test_accepted;
        self
    }
}

/// p̂ with its binomial standard error and the analytic bounds at the same
/// parameters.
pub fn estimate_acceptance(
    setup: &ProtocolSetup,
    strategy: &dyn ProverStrategy,
    trials: usize,
    seed: u64,
) -> Result<AcceptanceEstimate> {
    check_trials(trials)?;
    let tallies = trial_seeds(trials, seed)
        .into_par_iter()
        .map(|seeds| {
            let mut t = Tally::default();
            for s in seeds {
                t.add(&run_trial(setup, strategy, s)?);
            }
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    let total = tallies.into_iter().fold(Tally::default(), Tally::merge);
    Ok(finish(setup, strategy.name(), seed, trials, total))
}

/// Summary of already collected transcripts.
pub fn summarize(
    setup: &ProtocolSetup,
    strategy: &str,
    seed: u64,
    transcripts: &[ProtocolTranscript],
) -> AcceptanceEstimate {
    let mut t = Tally::default();
    for tr in transcripts {
        t.add(tr);
    }
    finish(setup, strategy, seed, transcripts.len(), t)
}

fn finish(setup: &ProtocolSetup, strategy: &str, seed: u64, trials: usize, t: Tally) -> AcceptanceEstimate {
    let accepted = t.compute_accepted + t.test_accepted;
    let p_hat = accepted as f64 / trials as f64;
    AcceptanceEstimate {
        protocol: setup.protocol(),
        strategy: strategy.into(),
        seed,
        trials,
        q: setup.q,
        epsilon: setup.epsilon,
        accepted,
        p_hat,
        stderr: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
        compute_trials: t.compute,
        compute_accepted: t.compute_accepted,
        test_trials: t.test,
        test_accepted: t.test_accepted,
        analytic: setup.bounds,
    }
}
