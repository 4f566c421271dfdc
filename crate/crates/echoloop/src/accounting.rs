//! Big-space and many-spaces probability tables over trial ensembles.
//!
//! An ensemble is a grid of cells, one per (setup Σ, initial state Λ)
//! pair, each holding a trial batch and a prior.  Two accounting styles
//! answer "how likely is outcome X?":
//!
//! - **big space**: one probability space over everything.  Joint
//!   P(Σ,Λ,X) = prior(Σ,Λ) × freq(X in that cell); the marginal P(Σ,Λ)
//!   sums the joint over X; conditionals divide the two.
//! - **many spaces**: an independent space per cell, no priors, no
//!   cross-cell quantities — just each batch's frequencies.
//!
//! Because priors enter the joint as a constant factor per cell, the
//! big-space conditional algebraically collapses to the cell frequency.
//! The code computes it that way — straight from the counts — so on
//! shared batches the two styles agree *exactly*, not within an epsilon,
//! and rescaling priors cannot move any conditional.  Divergence between
//! the styles is then a pure resampling effect, measured by
//! [`compare`] and reported as `max_divergence`.
//!
//! [`weight_check`] is the loop-scepticism diagnostic: declared channel
//! weights |c_k|² against observed per-absorber completion rates, for
//! anyone who suspects a contingent absorber's long-run frequency need
//! not match its channel weight.  The crate computes both sides and
//! reports; it takes no side.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::amplitude;
use crate::sampler::TrialBatch;
use crate::scenario::Setup;

/// Outcome channel → probability.
pub type OutcomeTable = BTreeMap<String, f64>;

/// setup id → state id → outcome table.
pub type CellTables = BTreeMap<String, BTreeMap<String, OutcomeTable>>;

/// One (Σ, Λ) cell of an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleCell {
    pub setup_id: String,
    pub state_id: String,
    pub prior: f64,
    pub batch: TrialBatch,
}

/// A grid of cells; the unit both accountings consume.
#[derive(Debug, Clone, PartialEq)]
pub struct RunEnsemble {
    pub cells: Vec<EnsembleCell>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AccountingError {
    #[error("cell priors sum to {total}, expected 1 within 1e-12")]
    PriorsNotNormalized { total: f64 },
    #[error("cell {cell} holds no trials")]
    EmptyBatch { cell: String },
    #[error("duplicate cell {cell}")]
    DuplicateCell { cell: String },
    #[error("cell {cell} is present in only one of the two ensembles being compared")]
    MismatchedCells { cell: String },
}

fn cell_id(cell: &EnsembleCell) -> String {
    format!("({}, {})", cell.setup_id, cell.state_id)
}

fn validate(ensemble: &RunEnsemble, check_priors: bool) -> Result<(), AccountingError> {
    if ensemble.cells.is_empty() {
        return Err(AccountingError::EmptyBatch { cell: "(no cells)".into() });
    }
    let mut seen = std::collections::BTreeSet::new();
    for cell in &ensemble.cells {
        if !seen.insert((cell.setup_id.as_str(), cell.state_id.as_str())) {
            return Err(AccountingError::DuplicateCell { cell: cell_id(cell) });
        }
        if cell.batch.trials.is_empty() {
            return Err(AccountingError::EmptyBatch { cell: cell_id(cell) });
        }
    }
    if check_priors {
        let total: f64 = ensemble.cells.iter().map(|c| c.prior).sum();
        if !total.is_finite()
            || ensemble.cells.iter().any(|c| c.prior < 0.0)
            || (total - 1.0).abs() > amplitude::TOLERANCE
        {
            return Err(AccountingError::PriorsNotNormalized { total });
        }
    }
    Ok(())
}

/// Big-space accounting: `(joint, conditionals)` tables.
///
/// The conditional per cell is computed from the batch counts directly —
/// the algebraic reduction of joint/marginal — so it is exact and
/// independent of the (normalized) priors.
pub fn big_space(ensemble: &RunEnsemble) -> Result<(CellTables, CellTables), AccountingError> {
    validate(ensemble, true)?;
    let mut joint: CellTables = BTreeMap::new();
    let mut conditionals: CellTables = BTreeMap::new();
    for cell in &ensemble.cells {
        let weighted: OutcomeTable = cell
            .batch
            .frequencies
            .iter()
            .map(|(outcome, freq)| (outcome.clone(), cell.prior * freq))
            .collect();
        joint
            .entry(cell.setup_id.clone())
            .or_default()
            .insert(cell.state_id.clone(), weighted);
        conditionals
            .entry(cell.setup_id.clone())
            .or_default()
            .insert(cell.state_id.clone(), cell.batch.frequencies.clone());
    }
    Ok((joint, conditionals))
}

/// Many-spaces accounting: per-cell frequency tables, priors ignored,
/// nothing computed across cells.
pub fn many_spaces(ensemble: &RunEnsemble) -> Result<CellTables, AccountingError> {
    validate(ensemble, false)?;
    let mut tables: CellTables = BTreeMap::new();
    for cell in &ensemble.cells {
        tables
            .entry(cell.setup_id.clone())
            .or_default()
            .insert(cell.state_id.clone(), cell.batch.frequencies.clone());
    }
    Ok(tables)
}

/// Both accountings plus their maximum disagreement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccountingReport {
    pub joint: CellTables,
    pub conditionals: CellTables,
    pub many_spaces: CellTables,
    /// max over cells and outcomes of |conditional − many_spaces|.
    pub max_divergence: f64,
}

impl AccountingReport {
    /// Builds both tables from one ensemble.  Shared batches make the
    /// two styles literally equal, so `max_divergence` is exactly 0.
    pub fn build(ensemble: &RunEnsemble) -> Result<Self, AccountingError> {
        Self::build_pair(ensemble, ensemble)
    }

    /// Builds big-space tables from `big` and many-spaces tables from
    /// `many` — the same cell grid, possibly independently sampled
    /// batches.  This is how resampling divergence is measured.
    pub fn build_pair(big: &RunEnsemble, many: &RunEnsemble) -> Result<Self, AccountingError> {
        let (joint, conditionals) = big_space(big)?;
        let many_tables = many_spaces(many)?;
        for (setup, states) in &conditionals {
            for state in states.keys() {
                if many_tables.get(setup).and_then(|s| s.get(state)).is_none() {
                    return Err(AccountingError::MismatchedCells {
                        cell: format!("({setup}, {state})"),
                    });
                }
            }
        }
        for (setup, states) in &many_tables {
            for state in states.keys() {
                if conditionals.get(setup).and_then(|s| s.get(state)).is_none() {
                    return Err(AccountingError::MismatchedCells {
                        cell: format!("({setup}, {state})"),
                    });
                }
            }
        }
        let mut report = AccountingReport {
            joint,
            conditionals,
            many_spaces: many_tables,
            max_divergence: 0.0,
        };
        report.max_divergence = compare(&report);
        Ok(report)
    }
}

/// Maximum over cells and outcomes of |conditional − many_spaces|.
pub fn compare(report: &AccountingReport) -> f64 {
    let mut max = 0.0_f64;
    for (setup, states) in &report.conditionals {
        for (state, table) in states {
            let other = report.many_spaces.get(setup).and_then(|s| s.get(state));
            let outcomes =
                table.keys().chain(other.into_iter().flat_map(|t| t.keys()));
            for outcome in outcomes {
                let a = table.get(outcome).copied().unwrap_or(0.0);
                let b = other.and_then(|t| t.get(outcome)).copied().unwrap_or(0.0);
                max = max.max((a - b).abs());
            }
        }
    }
    max
}

/// One row of the declared-weight vs completion-rate diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightCheckRow {
    /// Completing entity: an absorber name or the stand-in boundary.
    pub absorber: String,
    /// Channel the completion happened on.
    pub channel: String,
    pub completions: u64,
    /// completions / total trials.
    pub frequency: f64,
    /// |c_k|² of that channel.
    pub declared_weight: f64,
    /// frequency − declared_weight.
    pub gap: f64,
}

/// Tabulates, per completing entity and channel, how often transactions
/// completed there against the channel's declared weight.  Covers every
/// (entity, channel) pair observed in the batch, in first-seen order
/// after the declared absorbers.
pub fn weight_check(setup: &Setup, batch: &TrialBatch) -> Vec<WeightCheckRow> {
    let total = batch.trials.len() as f64;
    if batch.trials.is_empty() {
        return Vec::new();
    }
    let mut counts: BTreeMap<(&str, &str), u64> = BTreeMap::new();
    for record in &batch.trials {
        *counts
            .entry((record.completing_absorber.as_str(), record.outcome_channel.as_str()))
            .or_insert(0) += 1;
    }
    // Declared absorbers first (in declaration order, channel implied),
    // then anything else observed — i.e. the boundary.
    let mut keys: Vec<(&str, &str)> = setup
        .absorbers
        .iter()
        .map(|a| (a.name.as_str(), a.channel.as_str()))
        .filter(|key| counts.contains_key(key))
        .collect();
    for key in counts.keys() {
        if !keys.contains(key) {
            keys.push(*key);
        }
    }
    keys.into_iter()
        .map(|(absorber, channel)| {
            let completions = counts[&(absorber, channel)];
            let frequency = completions as f64 / total;
            let declared_weight = setup
                .channel(channel)
                .map(|c| amplitude::weight(c.amplitude))
                .unwrap_or(0.0);
            WeightCheckRow {
                absorber: absorber.to_string(),
                channel: channel.to_string(),
                completions,
                frequency,
                declared_weight,
                gap: frequency - declared_weight,
            }
        })
        .collect()
}
