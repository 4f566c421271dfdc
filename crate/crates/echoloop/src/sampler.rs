//! Seeded Monte Carlo over the source's echo profile.
//!
//! Outcome channels are drawn with probability proportional to their
//! confirmation strength — the Born rule read off the [`EchoProfile`] —
//! and each drawn outcome is resolved to its unique consistent history,
//! so a trial records not just "left" but *who completed the
//! transaction*.
//!
//! Reproducibility is a hard contract, not best effort: trial `i` of a
//! batch seeded `s` reads from stream `i` of a counter-based ChaCha8
//! generator keyed by `s`.  No trial's randomness depends on any other
//! trial's, so identical `(setup, trials, seed)` give bit-identical
//! batches on any machine, any thread count, any evaluation order.
//!
//! The sampler refuses two kinds of setup: anything
//! [`classify`](crate::consistency::classify) calls pathological, and
//! any echo profile carrying a nonzero deficit (offers escaping under an
//! open boundary) — sampling "no outcome" is not a thing.

use std::collections::BTreeMap;
use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::consistency::{classify, Classification, ConsistencyError, Transaction};
use crate::scenario::{History, Setup};
use crate::wave::{echo_profile, EchoProfile};

/// One sampled trial, with its full witnessing history.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub outcome_channel: String,
    pub completing_absorber: String,
    pub history: History,
}

/// A reproducible batch of trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialBatch {
    pub setup_label: String,
    pub seed: u64,
    pub trials: Vec<TrialRecord>,
    /// Empirical counts / trials for every setup channel; empty when the
    /// batch is empty.
    pub frequencies: BTreeMap<String, f64>,
}

impl TrialBatch {
    /// Writes the batch as CSV, one row per trial: `index,outcome,absorber`.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["index", "outcome", "absorber"])?;
        for r in &self.trials {
            w.write_record([
                r.trial_index.to_string().as_str(),
                &r.outcome_channel,
                &r.completing_absorber,
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplerError {
    #[error("echo profile carries an unconfirmed deficit of {deficit}: offers escape under an open boundary")]
    DeficitPresent { deficit: f64 },
    #[error(transparent)]
    Consistency(#[from] ConsistencyError),
}

/// Draws one outcome channel by inverse CDF over the profile, walking
/// channels in declared order.  A draw landing exactly on a cumulative
/// boundary belongs to the later channel; zero-weight channels can never
/// be chosen.
pub fn sample_outcome<'p, R: Rng>(
    profile: &'p EchoProfile,
    rng: &mut R,
) -> Result<&'p str, SamplerError> {
    if profile.deficit != 0.0 {
        return Err(SamplerError::DeficitPresent { deficit: profile.deficit });
    }
    let total = profile.confirmed_total();
    let u = rng.random::<f64>() * total;
    let mut cumulative = 0.0;
    for (name, value) in &profile.per_channel {
        cumulative += value;
        if u < cumulative {
            return Ok(name);
        }
    }
    // Rounding pushed u to the very top of the CDF: the draw belongs to
    // the last channel that has any weight at all.
    profile
        .per_channel
        .iter()
        .rev()
        .find(|(_, value)| *value > 0.0)
        .or_else(|| profile.per_channel.last())
        .map(|(name, _)| name.as_str())
        .ok_or(SamplerError::DeficitPresent { deficit: 1.0 })
}

/// Runs `trials` independent seeded trials against a well-posed setup.
///
/// A pure function of `(setup, trials, seed)`.
pub fn run_trials(setup: &Setup, trials: u64, seed: u64) -> Result<TrialBatch, SamplerError> {
    let report = classify(setup)?;
    if let Classification::Pathological(reasons) = report.classification {
        return Err(ConsistencyError::NotWellPosed { reasons }.into());
    }

    // Well-posed ⇒ the echo profile is history-invariant, so any
    // consistent history describes what the source hears at t₀.
    let witness = report.histories.first().expect("a well-posed setup has histories");
    let profile = echo_profile(setup, witness);

    // One resolved transaction per sampleable outcome, precomputed.
    let transactions: BTreeMap<&str, Transaction> = report
        .histories
        .iter()
        .map(|h| {
            let (name, _) = h.firing().expect("consistent history has a firer");
            (
                h.outcome_channel.as_str(),
                Transaction {
                    outcome_channel: h.outcome_channel.clone(),
                    completing_absorber: name.to_string(),
                    history: h.clone(),
                },
            )
        })
        .collect();

    let base = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(trials as usize);
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for trial_index in 0..trials {
        let mut rng = base.clone();
        rng.set_stream(trial_index);
        let outcome = sample_outcome(&profile, &mut rng)?;
        let transaction = &transactions[outcome];
        *counts.entry(transaction.outcome_channel.as_str()).or_insert(0) += 1;
        records.push(TrialRecord {
            trial_index,
            outcome_channel: transaction.outcome_channel.clone(),
            completing_absorber: transaction.completing_absorber.clone(),
            history: transaction.history.clone(),
        });
    }

    let frequencies = if trials == 0 {
        BTreeMap::new()
    } else {
        setup
            .channels
            .iter()
            .map(|c| {
                let count = counts.get(c.name.as_str()).copied().unwrap_or(0);
                (c.name.clone(), count as f64 / trials as f64)
            })
            .collect()
    };

    Ok(TrialBatch { setup_label: setup.label.clone(), seed, trials: records, frequencies })
}
