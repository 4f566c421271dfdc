//! Sequential detector entanglement and branch-weight bookkeeping.
//!
//! An offer wave threading a chain of detectors entangles with each one
//! in turn: a detector in its ready state splits every branch into an
//! activated continuation (coupling `activate`) and a pass-through
//! continuation (coupling `pass`).  Branch weights are squared moduli of
//! the accumulated couplings, so the leaf weights always sum to one — the
//! unit-trace conservation law — no matter how long the chain grows or
//! when along it each amplitude is evaluated.
//!
//! Whether a branch can seed a completed transaction is a separate
//! question from its weight: only detectors flagged `irreversible` emit
//! confirmations, so a branch is transaction-capable exactly when it has
//! activated at least one irreversible detector.  The flag is explicit
//! configuration — nothing in the amplitude formalism itself decides
//! where the reversible/irreversible cut sits, so this crate refuses to
//! guess and makes callers say.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amplitude::{self, TOLERANCE};

/// One detector in the chain: couplings onto its activated and ready
/// continuations, plus the explicit irreversibility flag.
///
/// Construct with [`Detector::new`], which enforces unitarity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DetectorDoc", into = "DetectorDoc")]
pub struct Detector {
    pub name: String,
    /// Coupling onto the branch where this detector fires.
    pub activate: Complex64,
    /// Coupling onto the branch where the offer passes through untouched.
    pub pass: Complex64,
    /// Whether firing is thermodynamically committed.  Only irreversible
    /// detectors are allowed to emit confirmation waves.
    pub irreversible: bool,
}

impl Detector {
    /// Builds a detector, rejecting couplings that do not preserve
    /// probability: |activate|² + |pass|² must equal 1 within 1e-12.
    pub fn new(
        name: impl Into<String>,
        activate: Complex64,
        pass: Complex64,
        irreversible: bool,
    ) -> Result<Self, ChainError> {
        let name = name.into();
        let total = amplitude::weight(activate) + amplitude::weight(pass);
        if (total - 1.0).abs() > TOLERANCE {
            return Err(ChainError::NotUnitary { name, total });
        }
        Ok(Detector { name, activate, pass, irreversible })
    }

    /// True iff this detector may emit a confirmation wave.  Reversible
    /// (microscopic) entanglement never does, however large its coupling.
    pub fn confirmation_eligible(&self) -> bool {
        self.irreversible
    }
}

/// Wire form of [`Detector`]: `{name, activate{re,im}, pass{re,im}, irreversible}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectorDoc {
    name: String,
    #[serde(with = "amplitude::rect")]
    activate: Complex64,
    #[serde(with = "amplitude::rect")]
    pass: Complex64,
    irreversible: bool,
}

impl TryFrom<DetectorDoc> for Detector {
    type Error = ChainError;

    fn try_from(doc: DetectorDoc) -> Result<Self, ChainError> {
        Detector::new(doc.name, doc.activate, doc.pass, doc.irreversible)
    }
}

impl From<Detector> for DetectorDoc {
    fn from(d: Detector) -> Self {
        DetectorDoc { name: d.name, activate: d.activate, pass: d.pass, irreversible: d.irreversible }
    }
}

/// What one detector did on one branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorOutcome {
    Activated,
    Ready,
}

impl DetectorOutcome {
    fn word(self) -> &'static str {
        match self {
            DetectorOutcome::Activated => "activated",
            DetectorOutcome::Ready => "ready",
        }
    }
}

/// One leaf of the branch tree: the outcome of every detector met so
/// far, in chain order, and the accumulated weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub outcomes: Vec<DetectorOutcome>,
    pub weight: f64,
}

impl Branch {
    /// Human/report label: `"root"` for the empty path, otherwise the
    /// outcome words joined by dots, e.g. `"activated.ready"`.
    pub fn label(&self) -> String {
        if self.outcomes.is_empty() {
            "root".to_string()
        } else {
            self.outcomes.iter().map(|o| o.word()).collect::<Vec<_>>().join(".")
        }
    }
}

/// The branch structure after some prefix of detector interactions.
///
/// Immutable: [`BranchTree::interact`] returns a new tree, so partial
/// chains can be extended independently and concurrently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchTree {
    pub chain: Vec<Detector>,
    pub leaves: Vec<Branch>,
}

impl BranchTree {
    /// The unentangled offer wave: no detectors, one unit-weight leaf.
    pub fn root() -> Self {
        BranchTree { chain: Vec::new(), leaves: vec![Branch { outcomes: Vec::new(), weight: 1.0 }] }
    }

    /// Folds a whole detector chain onto a fresh root.
    pub fn from_chain(detectors: impl IntoIterator<Item = Detector>) -> Result<Self, ChainError> {
        detectors.into_iter().try_fold(Self::root(), |tree, d| tree.interact(d))
    }

    /// Entangles one more detector: every leaf of weight `w` splits into
    /// an activated child of weight `w·|activate|²` and a ready child of
    /// weight `w·|pass|²`.  Children of exactly zero weight are pruned —
    /// a certain detector leaves a single continuation, not a dead twin.
    pub fn interact(&self, detector: Detector) -> Result<Self, ChainError> {
        if self.chain.iter().any(|d| d.name == detector.name) {
            return Err(ChainError::DuplicateDetector { name: detector.name });
        }
        let splits = [
            (DetectorOutcome::Activated, amplitude::weight(detector.activate)),
            (DetectorOutcome::Ready, amplitude::weight(detector.pass)),
        ];
        let mut leaves = Vec::with_capacity(self.leaves.len() * 2);
        for leaf in &self.leaves {
            for (outcome, coupling_weight) in splits {
                let weight = leaf.weight * coupling_weight;
                if weight == 0.0 {
                    continue;
                }
                let mut outcomes = leaf.outcomes.clone();
                outcomes.push(outcome);
                leaves.push(Branch { outcomes, weight });
            }
        }
        let mut chain = self.chain.clone();
        chain.push(detector);
        Ok(BranchTree { chain, leaves })
    }

    /// Leaves that can seed a completed transaction: those that activated
    /// at least one irreversible detector.  A chain of purely reversible
    /// detectors yields none, whatever its weights.
    pub fn transaction_capable_leaves(&self) -> Vec<&Branch> {
        self.leaves
            .iter()
            .filter(|branch| {
                branch
                    .outcomes
                    .iter()
                    .zip(&self.chain)
                    .any(|(o, d)| *o == DetectorOutcome::Activated && d.irreversible)
            })
            .collect()
    }

    /// Leaf weights keyed by label.  Asserts unit trace: weights must sum
    /// to 1 within 1e-12, else the tree was corrupted and the violation
    /// is surfaced rather than renormalized away.
    pub fn terminal_distribution(&self) -> Result<BTreeMap<String, f64>, ChainError> {
        // Compensated summation: wide trees accumulate one rounding per
        // leaf, which a naive sum can push past the 1e-12 gate.
        let mut total = 0.0_f64;
        let mut carry = 0.0_f64;
        for branch in &self.leaves {
            let y = branch.weight - carry;
            let t = total + y;
            carry = (t - total) - y;
            total = t;
        }
        if (total - 1.0).abs() > TOLERANCE {
            return Err(ChainError::ConservationViolation { total });
        }
        Ok(self.leaves.iter().map(|b| (b.label(), b.weight)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChainError {
    #[error("detector `{name}` is not unitary: |activate|² + |pass|² = {total}")]
    NotUnitary { name: String, total: f64 },
    #[error("detector `{name}` already interacted with this tree")]
    DuplicateDetector { name: String },
    #[error("leaf weights sum to {total}, expected 1")]
    ConservationViolation { total: f64 },
}
