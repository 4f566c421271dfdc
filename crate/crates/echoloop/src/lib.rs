//! Simulator and consistency checker for offer/confirmation-wave
//! experiments in the transactional picture of quantum mechanics.
//!
//! A source emits one particle as a retarded *offer wave* split across
//! named channels with complex amplitudes.  Absorbers sit on those
//! channels; each returns an advanced *confirmation wave* whose strength
//! is the squared modulus of the offer it received, and exactly one
//! offer–confirmation pair completes as a *transaction*.  The twist this
//! crate exists for: absorbers may be **contingent** — wired to act only
//! if some other absorber did or did not fire — which closes a causal
//! loop between the outcome and the configuration that produced it
//! (Maudlin's contingent-absorber challenge to Cramer's theory).
//!
//! The engine resolves such loops atemporally.  A run is represented as
//! a completed [`History`](scenario::History); contingency predicates
//! are evaluated against the history's own firing record, and
//! [`consistency`] enumerates every fixed point.  Setups where each
//! channel admits exactly one consistent history are *well-posed*:
//! outcomes can be sampled by Born weight ([`sampler`]) and every
//! advanced wave is cancelled before emission ([`wave`]).  Setups where
//! offers escape unconfirmed or histories are ambiguous are flagged
//! *pathological* instead, with reasons.
//!
//! # Module map
//!
//! - [`scenario`] — scenario documents, validation, [`Setup`], [`History`].
//! - [`scenarios`] — canonical built-ins: Renninger's negative-result
//!   experiment and Maudlin's contingent-absorber experiment.
//! - [`consistency`] — fixed-point history enumeration, well-posedness
//!   classification, transaction resolution.
//! - [`wave`] — offer amplitudes, confirmation strengths, echo profiles,
//!   and the pre-emission advanced-wave ledger.
//! - [`sampler`] — seeded, reproducible Monte Carlo over outcomes.
//! - [`chain`] — downstream detector chains: entanglement branches,
//!   terminal weights, which leaves can seed a transaction.
//! - [`accounting`] — big-space vs many-spaces probability tables over
//!   batch ensembles, plus the weight-vs-frequency diagnostic.
//! - [`synth`] — randomized scenario generation for stress tests.
//! - [`cli`] — the `echoloop` binary: `check | run | ledger | compare`.
//!
//! # Quick start
//!
//! ```
//! use echoloop::{classify, run_trials, scenarios, BoundaryCondition};
//!
//! // Maudlin's experiment: absorber B activates only if A stays silent.
//! // Under a perfect absorbing boundary the setup is well-posed ...
//! let setup = scenarios::maudlin(BoundaryCondition::PerfectAbsorber);
//! assert!(classify(&setup).unwrap().is_well_posed());
//!
//! // ... and outcomes sample at the Born weights |c_L|² = |c_R|² = 1/2.
//! let batch = run_trials(&setup, 1000, 42).unwrap();
//! let left = batch.frequencies["L"];
//! assert!((left - 0.5).abs() < 0.05);
//!
//! // The causal loop resolves the same way in every trial: a left
//! // outcome is always completed by the contingent absorber B.
//! assert!(batch
//!     .trials
//!     .iter()
//!     .filter(|t| t.outcome_channel == "L")
//!     .all(|t| t.completing_absorber == "B"));
//! ```
//!
//! # Runnable examples
//!
//! Each major capability has a standalone example under `examples/`:
//!
//! ```text
//! cargo run --example renninger            # negative-result weights Ω/4π
//! cargo run --example maudlin_challenge    # the pathology, diagnosed
//! cargo run --example maudlin_resolved     # the same loop, well-posed
//! cargo run --example boundary_conditions  # open vs perfect vs bigbang
//! cargo run --example detector_chain       # entanglement chains, unit trace
//! cargo run --example accounting_modes     # big-space vs many-spaces
//! cargo run --example custom_scenario      # build & check your own JSON
//! ```
//!
//! # Determinism
//!
//! All randomness flows from explicit 64-bit seeds through a
//! counter-mode generator; trial *i* of a batch draws from its own
//! stream, so batches are bit-identical across runs, platforms, and
//! batch sizes.  Reports serialize with sorted keys.  Identical inputs
//! produce byte-identical JSON/CSV output.

pub mod accounting;
pub mod amplitude;
pub mod chain;
pub mod cli;
pub mod consistency;
pub mod sampler;
pub mod scenario;
pub mod scenarios;
pub mod synth;
pub mod wave;

pub use chain::{BranchTree, Detector};
pub use consistency::{classify, resolve_transaction, Classification, ConsistencyReport};
pub use sampler::{run_trials, TrialBatch};
pub use scenario::{build_scenario, BoundaryCondition, History, Setup};
pub use wave::{advanced_ledger, echo_profile, AdvancedLedger, EchoProfile};
