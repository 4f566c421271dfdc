//! Atemporal enumeration of predicate-consistent histories.
//!
//! Contingent absorbers create feedback through outcomes: whether B
//! participates depends on whether A fired, and whether A fired depends
//! on which channel completed, which depends on who participates.  This
//! module never simulates that loop forward in time.  Instead it treats
//! a [`History`] as a complete four-dimensional account and keeps
//! exactly those accounts that are fixed points: every absorber's
//! activation equals its predicate evaluated against the history's own
//! firing record, and the firer is genuinely the first active absorber
//! on the outcome channel.
//!
//! The search exploits that predicates read only the firing record.  A
//! history has exactly one firer, so fixing (outcome channel, firer)
//! forces every activation; the candidate survives iff the forced
//! activations put the firer first on that channel.  That is
//! O(channels × absorbers²) instead of 2^n — the brute-force 2^n scan
//! exists in the test suite as an oracle, and the two agree exactly.
//!
//! Well-posedness is what the sampler needs: every nonzero-weight
//! channel admits exactly one consistent history, and every channel has
//! a guaranteed confirmer (an always-on absorber, or any non-open
//! boundary).  Anything else is [`Classification::Pathological`], with
//! one [`PathologyReason`] per offending channel.

use std::collections::BTreeMap;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::amplitude;
use crate::scenario::{
    Absorber, BoundaryCondition, Channel, History, Setup, BOUNDARY_NAME,
};

/// Exhaustive-enumeration bound on the absorber count.
pub const MAX_ABSORBERS: usize = 20;

/// A completed emitter-absorber handshake: the unique consistent history
/// for an outcome, plus who completed it (possibly the stand-in
/// [`BOUNDARY_NAME`]).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transaction {
    pub outcome_channel: String,
    pub completing_absorber: String,
    pub history: History,
}

/// Verdict on a setup.
#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    WellPosed,
    Pathological(Vec<PathologyReason>),
}

/// Why a channel breaks well-posedness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathologyReason {
    /// Open boundary and no always-on absorber: the channel's offer can
    /// leave with nobody obliged to confirm it.
    EscapingOffer { channel: String },
    /// The channel has `histories` ≠ 1 consistent histories, so its
    /// outcome is either impossible or underdetermined.
    OutcomeAmbiguity { channel: String, histories: usize },
}

impl std::fmt::Display for PathologyReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PathologyReason::EscapingOffer { channel } => {
                write!(f, "escaping offer on channel `{channel}`")
            }
            PathologyReason::OutcomeAmbiguity { channel, histories } => {
                write!(f, "outcome ambiguity on channel `{channel}` ({histories} consistent histories)")
            }
        }
    }
}

fn join_reasons(reasons: &[PathologyReason]) -> String {
    reasons.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Everything [`classify`] learned about a setup.
///
/// Serializes as `{classification, reasons[], histories[], per_outcome{}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub histories: Vec<History>,
    pub classification: Classification,
    /// Consistent-history count per channel, all channels included.
    pub per_outcome: BTreeMap<String, usize>,
}

impl ConsistencyReport {
    pub fn is_well_posed(&self) -> bool {
        matches!(self.classification, Classification::WellPosed)
    }

    pub fn reasons(&self) -> &[PathologyReason] {
        match &self.classification {
            Classification::WellPosed => &[],
            Classification::Pathological(reasons) => reasons,
        }
    }
}

impl Serialize for ConsistencyReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ConsistencyReport", 4)?;
        s.serialize_field(
            "classification",
            match self.classification {
                Classification::WellPosed => "well_posed",
                Classification::Pathological(_) => "pathological",
            },
        )?;
        s.serialize_field("reasons", self.reasons())?;
        s.serialize_field("histories", &self.histories)?;
        s.serialize_field("per_outcome", &self.per_outcome)?;
        s.end()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConsistencyError {
    #[error("{absorbers} absorbers exceed the exhaustive enumeration bound of {MAX_ABSORBERS}")]
    TooLarge { absorbers: usize },
    #[error("setup is not well-posed: {}", join_reasons(reasons))]
    NotWellPosed { reasons: Vec<PathologyReason> },
    #[error("no consistent history has outcome `{channel}`")]
    NoConsistentHistory { channel: String },
}

enum Firer<'a> {
    Absorber(&'a Absorber),
    Boundary,
}

/// Builds the unique history in which `firer` completes on `channel`,
/// if that history is consistent.
fn history_with_firer(setup: &Setup, channel: &Channel, firer: &Firer<'_>) -> Option<History> {
    let (firer_name, fire_time) = match firer {
        Firer::Absorber(a) => (a.name.as_str(), setup.arrival_time(a)),
        Firer::Boundary => (BOUNDARY_NAME, setup.boundary_arrival_time()),
    };

    // The firing record alone decides every predicate, so fixing the
    // firer forces the whole activation assignment.
    let mut firing_times: BTreeMap<String, Option<f64>> =
        setup.absorbers.iter().map(|a| (a.name.clone(), None)).collect();
    firing_times.insert(firer_name.to_string(), Some(fire_time));
    let record = History {
        activations: BTreeMap::new(),
        outcome_channel: channel.name.clone(),
        firing_times,
    };
    let activations: BTreeMap<String, bool> = setup
        .absorbers
        .iter()
        .map(|a| (a.name.clone(), a.activation.holds(&record)))
        .collect();
    let history = History { activations, ..record };

    // Fixed-point check: under the forced activations, the assumed firer
    // must really be the entity that completes on this channel.
    let consistent = match firer {
        Firer::Absorber(a) => setup
            .first_absorber(&channel.name, &history)
            .is_some_and(|first| first.name == a.name),
        // The boundary only ever completes when no real absorber claims
        // the channel (and never under an open boundary — see callers).
        Firer::Boundary => setup.first_absorber(&channel.name, &history).is_none(),
    };
    consistent.then_some(history)
}

fn activation_mask(setup: &Setup, history: &History) -> u64 {
    setup
        .absorbers
        .iter()
        .enumerate()
        .filter(|(_, a)| history.is_active(&a.name))
        .fold(0u64, |mask, (i, _)| mask | (1 << i))
}

/// All predicate-consistent histories of `setup`, sorted by declared
/// outcome-channel order, then by activation bitmask.
pub fn enumerate_histories(setup: &Setup) -> Result<Vec<History>, ConsistencyError> {
    if setup.absorbers.len() > MAX_ABSORBERS {
        return Err(ConsistencyError::TooLarge { absorbers: setup.absorbers.len() });
    }
    let mut found: Vec<(usize, u64, History)> = Vec::new();
    for (channel_index, channel) in setup.channels.iter().enumerate() {
        let mut candidates: Vec<Firer<'_>> =
            setup.absorbers_on(&channel.name).map(Firer::Absorber).collect();
        if setup.boundary != BoundaryCondition::Open {
            candidates.push(Firer::Boundary);
        }
        for firer in &candidates {
            if let Some(history) = history_with_firer(setup, channel, firer) {
                let mask = activation_mask(setup, &history);
                found.push((channel_index, mask, history));
            }
        }
    }
    found.sort_by_key(|(channel_index, mask, _)| (*channel_index, *mask));
    Ok(found.into_iter().map(|(_, _, h)| h).collect())
}

/// Enumerates histories and judges well-posedness.
pub fn classify(setup: &Setup) -> Result<ConsistencyReport, ConsistencyError> {
    let histories = enumerate_histories(setup)?;
    let mut per_outcome: BTreeMap<String, usize> =
        setup.channels.iter().map(|c| (c.name.clone(), 0)).collect();
    for history in &histories {
        *per_outcome.get_mut(&history.outcome_channel).expect("outcome is a setup channel") += 1;
    }

    let mut reasons = Vec::new();
    for channel in &setup.channels {
        if setup.boundary == BoundaryCondition::Open
            && !setup.absorbers_on(&channel.name).any(|a| a.activation.is_always())
        {
            reasons.push(PathologyReason::EscapingOffer { channel: channel.name.clone() });
        }
        if amplitude::weight(channel.amplitude) > 0.0 {
            let count = per_outcome[&channel.name];
            if count != 1 {
                reasons.push(PathologyReason::OutcomeAmbiguity {
                    channel: channel.name.clone(),
                    histories: count,
                });
            }
        }
    }

    let classification = if reasons.is_empty() {
        Classification::WellPosed
    } else {
        Classification::Pathological(reasons)
    };
    Ok(ConsistencyReport { histories, classification, per_outcome })
}

/// The unique completed transaction for `outcome` in a well-posed setup.
/// Deterministic: no randomness, same answer on every call.
pub fn resolve_transaction(setup: &Setup, outcome: &str) -> Result<Transaction, ConsistencyError> {
    let report = classify(setup)?;
    if let Classification::Pathological(reasons) = report.classification {
        return Err(ConsistencyError::NotWellPosed { reasons });
    }
    let history = report
        .histories
        .into_iter()
        .find(|h| h.outcome_channel == outcome)
        .ok_or_else(|| ConsistencyError::NoConsistentHistory { channel: outcome.to_string() })?;
    let completing_absorber = history
        .firing()
        .expect("every consistent history has exactly one firer")
        .0
        .to_string();
    Ok(Transaction { outcome_channel: outcome.to_string(), completing_absorber, history })
}
