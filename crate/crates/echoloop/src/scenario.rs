//! Experiment vocabulary: sources, channels, absorbers, contingency
//! predicates, boundary conditions, and the histories that tie them all
//! together.
//!
//! A [`Setup`] is an immutable, validated description of one emission
//! experiment: a single-particle source, a normalized family of outgoing
//! channels, absorbers placed along those channels, and a boundary
//! condition saying what happens to offer waves no real absorber claims.
//! Absorbers may be contingent — whether one participates at all can
//! depend on whether another has fired by some time.  That is what makes
//! causal loops possible, and what the consistency solver untangles.
//!
//! A [`History`] is one complete account of a run, laid out atemporally:
//! which absorbers were active, which channel carried the particle, and
//! who fired when.  Contingency predicates are evaluated against the
//! finished history, never against a temporal prefix.
//!
//! # Document format
//!
//! Setups load from JSON documents shaped like:
//!
//! ```json
//! {
//!   "label": "maudlin-perfect",
//!   "source": { "t0": 1.0, "v": 1000.0, "position": 0.0 },
//!   "channels": [
//!     { "name": "L", "direction": -1.0,
//!       "amplitude": { "re": 0.7071067811865476, "im": 0.0 } },
//!     { "name": "R", "direction": 1.0,
//!       "amplitude": { "re": 0.7071067811865476, "im": 0.0 } }
//!   ],
//!   "absorbers": [
//!     { "name": "A", "channel": "R", "distance": 1.0,
//!       "activation": { "kind": "always" } },
//!     { "name": "B", "channel": "L", "distance": 2.0,
//!       "activation": { "kind": "not_fired", "ref": "A" } }
//!   ],
//!   "boundary": "perfect"
//! }
//! ```
//!
//! `boundary` is one of `"open"`, `"perfect"`, `"bigbang"`.  Activation
//! kinds are `"always"`, `"fired"`, `"not_fired"`; the latter two take a
//! `"ref"` (an absorber name) and an optional `"by"` deadline, which
//! defaults to the referenced absorber's arrival time plus
//! [`CONTINGENCY_SLACK`].  Two more keys are optional: `detector_chain`
//! (a list of detectors, see [`crate::chain`]) and `horizon` (the
//! stand-in boundary distance in meters, default [`DEFAULT_HORIZON_M`]).
//!
//! Deserializing a `Setup` runs the full validation in
//! [`build_scenario`], so a decoded setup is always well-formed (not
//! necessarily well-posed — that is the solver's verdict, not the
//! schema's).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amplitude::{self, TOLERANCE};
use crate::chain::{ChainError, Detector};

/// Default slack added to a referenced absorber's arrival time when a
/// contingency deadline is not given explicitly: "soon after" its
/// arrival, in seconds.
pub const CONTINGENCY_SLACK: f64 = 1e-6;

/// Default distance of the stand-in boundary absorber, in meters.
pub const DEFAULT_HORIZON_M: f64 = 1e6;

/// Reserved name for the stand-in boundary absorber.  Real absorbers may
/// not use it, and contingency predicates may not reference it.
pub const BOUNDARY_NAME: &str = "boundary";

/// Longest detector chain a scenario document may embed; the branch tree
/// has 2^n leaves, so this caps memory at about a million branches.
pub const MAX_CHAIN: usize = 20;

/// What happens to an offer wave that reaches no active absorber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    /// Nothing: the offer escapes and nobody confirms it.
    #[serde(rename = "open")]
    Open,
    /// A universe-edge absorber confirms whatever escapes.
    #[serde(rename = "perfect")]
    PerfectAbsorber,
    /// Advanced waves reaching t = 0 reflect forward with phase π,
    /// which confirms escaping offers exactly like a perfect absorber.
    #[serde(rename = "bigbang")]
    BigBangReflector,
}

impl BoundaryCondition {
    /// The document token: `"open"`, `"perfect"`, or `"bigbang"`.
    pub fn token(self) -> &'static str {
        match self {
            BoundaryCondition::Open => "open",
            BoundaryCondition::PerfectAbsorber => "perfect",
            BoundaryCondition::BigBangReflector => "bigbang",
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// The single-particle emitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Source {
    /// Emission time t₀, seconds.
    #[serde(rename = "t0")]
    pub emission_time: f64,
    /// Propagation speed, m/s; strictly positive.
    #[serde(rename = "v")]
    pub speed: f64,
    /// 1-D coordinate of the emitter, meters.
    pub position: f64,
}

/// One outgoing branch of the offer wave.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Channel {
    pub name: String,
    /// Signed heading of the branch (e.g. left = −1, right = +1); purely
    /// descriptive — distances, not directions, decide arrival times.
    pub direction: f64,
    /// The branch amplitude c_k; squared moduli across channels sum to 1.
    #[serde(with = "amplitude::rect")]
    pub amplitude: Complex64,
}

/// When an absorber participates in a run.
///
/// Deadlines are evaluated against the completed history: `Fired(a, by)`
/// holds iff `a` fired at some time ≤ `by` in that history.
#[derive(Debug, Clone, PartialEq)]
pub enum ContingencyPredicate {
    Always,
    NotFired { reference: String, by: f64 },
    Fired { reference: String, by: f64 },
}

impl ContingencyPredicate {
    /// Evaluates the predicate against a completed history's firing
    /// record.  Activations in `history` are irrelevant here; only who
    /// fired when matters, which is what breaks the evaluation loop.
    pub fn holds(&self, history: &History) -> bool {
        match self {
            ContingencyPredicate::Always => true,
            ContingencyPredicate::NotFired { reference, by } => !history.fired_by(reference, *by),
            ContingencyPredicate::Fired { reference, by } => history.fired_by(reference, *by),
        }
    }

    /// The absorber this predicate watches, if any.
    pub fn reference(&self) -> Option<&str> {
        match self {
            ContingencyPredicate::Always => None,
            ContingencyPredicate::NotFired { reference, .. }
            | ContingencyPredicate::Fired { reference, .. } => Some(reference),
        }
    }

    pub fn is_always(&self) -> bool {
        matches!(self, ContingencyPredicate::Always)
    }
}

/// A detector sitting on one channel at a fixed distance.
#[derive(Debug, Clone, PartialEq)]
pub struct Absorber {
    pub name: String,
    /// Name of the channel this absorber sits on.
    pub channel: String,
    /// Distance from the source, meters; strictly positive.
    pub distance: f64,
    pub activation: ContingencyPredicate,
}

/// A validated, immutable experiment description.
///
/// Construct via [`build_scenario`] or by deserializing a document;
/// both run the same validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioDoc", into = "ScenarioDoc")]
pub struct Setup {
    pub label: String,
    pub source: Source,
    pub channels: Vec<Channel>,
    pub absorbers: Vec<Absorber>,
    pub boundary: BoundaryCondition,
    /// Optional downstream detector chain (see [`crate::chain`]).
    pub detector_chain: Vec<Detector>,
    /// Distance of the stand-in boundary absorber, meters.
    pub horizon: f64,
}

impl Setup {
    /// Parses and validates a JSON scenario document.
    pub fn from_json_str(text: &str) -> Result<Setup, ScenarioError> {
        let doc: ScenarioDoc =
            serde_json::from_str(text).map_err(|e| ScenarioError::Schema(e.to_string()))?;
        build_scenario(doc)
    }

    /// When the offer along `absorber`'s channel reaches it: t₀ + R/v.
    pub fn arrival_time(&self, absorber: &Absorber) -> f64 {
        self.source.emission_time + absorber.distance / self.source.speed
    }

    /// When an escaping offer reaches the stand-in boundary absorber.
    pub fn boundary_arrival_time(&self) -> f64 {
        self.source.emission_time + self.horizon / self.source.speed
    }

    /// The absorber that actually receives a channel's offer under a
    /// given history: the active one nearest the source.  Everything
    /// behind it is shadowed.  `None` when no absorber on the channel is
    /// active — the boundary's case.
    pub fn first_absorber(&self, channel: &str, history: &History) -> Option<&Absorber> {
        self.absorbers
            .iter()
            .filter(|a| a.channel == channel && history.is_active(&a.name))
            .min_by(|x, y| x.distance.total_cmp(&y.distance))
    }

    pub fn channel(&self, name: &str) -> Option<&Channel> {
        self.channels.iter().find(|c| c.name == name)
    }

    pub fn absorber(&self, name: &str) -> Option<&Absorber> {
        self.absorbers.iter().find(|a| a.name == name)
    }

    pub fn absorbers_on<'a>(&'a self, channel: &'a str) -> impl Iterator<Item = &'a Absorber> {
        self.absorbers.iter().filter(move |a| a.channel == channel)
    }
}

/// One complete, atemporal account of a run.
///
/// Invariants (maintained by the solver, not re-checked on read):
/// exactly one entity fires; the firer is active; inactive absorbers
/// never have firing times.  The firer is usually a real absorber but
/// may be the stand-in [`BOUNDARY_NAME`] under a non-open boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct History {
    /// Real absorber name → whether it participated in this run.
    pub activations: BTreeMap<String, bool>,
    pub outcome_channel: String,
    /// Firing record: one entry per real absorber (`None` = never fired),
    /// plus a [`BOUNDARY_NAME`] entry when the boundary completed.
    pub firing_times: BTreeMap<String, Option<f64>>,
}

impl History {
    pub fn is_active(&self, absorber: &str) -> bool {
        self.activations.get(absorber).copied().unwrap_or(false)
    }

    pub fn fired(&self, absorber: &str) -> bool {
        self.firing_times.get(absorber).copied().flatten().is_some()
    }

    /// True iff `absorber` fired at some time ≤ `by` in this history.
    pub fn fired_by(&self, absorber: &str, by: f64) -> bool {
        self.firing_times
            .get(absorber)
            .copied()
            .flatten()
            .is_some_and(|t| t <= by)
    }

    /// The one entity that fired, with its firing time.
    pub fn firing(&self) -> Option<(&str, f64)> {
        self.firing_times
            .iter()
            .find_map(|(name, t)| t.map(|t| (name.as_str(), t)))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    /// Structural problems: missing/unknown keys, non-finite numbers,
    /// empty or reserved names, out-of-range values.
    #[error("schema: {0}")]
    Schema(String),
    #[error("channel weights sum to {total}, expected 1 within 1e-12")]
    Normalization { total: f64 },
    #[error("`{owner}` references unknown {role} `{missing}`")]
    DanglingReference { owner: String, role: &'static str, missing: String },
    #[error("contingency references form a cycle: {}", path.join(" -> "))]
    PredicateCycle { path: Vec<String> },
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// The raw document form of a [`Setup`], before validation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub label: String,
    pub source: Source,
    pub channels: Vec<Channel>,
    pub absorbers: Vec<AbsorberDoc>,
    pub boundary: BoundaryCondition,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub detector_chain: Vec<Detector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
}

/// Document form of an absorber.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbsorberDoc {
    pub name: String,
    pub channel: String,
    pub distance: f64,
    pub activation: ActivationDoc,
}

/// Document form of a contingency predicate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActivationDoc {
    pub kind: ActivationKind,
    #[serde(rename = "ref", default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub by: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivationKind {
    Always,
    NotFired,
    Fired,
}

impl TryFrom<ScenarioDoc> for Setup {
    type Error = ScenarioError;

    fn try_from(doc: ScenarioDoc) -> Result<Setup, ScenarioError> {
        build_scenario(doc)
    }
}

impl From<Setup> for ScenarioDoc {
    fn from(setup: Setup) -> ScenarioDoc {
        let absorbers = setup
            .absorbers
            .into_iter()
            .map(|a| {
                let activation = match a.activation {
                    ContingencyPredicate::Always => {
                        ActivationDoc { kind: ActivationKind::Always, reference: None, by: None }
                    }
                    ContingencyPredicate::NotFired { reference, by } => ActivationDoc {
                        kind: ActivationKind::NotFired,
                        reference: Some(reference),
                        by: Some(by),
                    },
                    ContingencyPredicate::Fired { reference, by } => ActivationDoc {
                        kind: ActivationKind::Fired,
                        reference: Some(reference),
                        by: Some(by),
                    },
                };
                AbsorberDoc { name: a.name, channel: a.channel, distance: a.distance, activation }
            })
            .collect();
        ScenarioDoc {
            label: setup.label,
            source: setup.source,
            channels: setup.channels,
            absorbers,
            boundary: setup.boundary,
            detector_chain: setup.detector_chain,
            horizon: (setup.horizon != DEFAULT_HORIZON_M).then_some(setup.horizon),
        }
    }
}

fn ensure_finite(field: &str, value: f64) -> Result<(), ScenarioError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ScenarioError::Schema(format!("{field} must be finite, got {value}")))
    }
}

/// Validates a scenario document into a [`Setup`].
///
/// Total over the schema: every well-formed document either yields a
/// setup satisfying all type invariants or the specific error naming the
/// violation — nothing is silently repaired.
pub fn build_scenario(doc: ScenarioDoc) -> Result<Setup, ScenarioError> {
    let ScenarioDoc { label, source, channels, absorbers, boundary, detector_chain, horizon } = doc;

    ensure_finite("source.t0", source.emission_time)?;
    ensure_finite("source.v", source.speed)?;
    ensure_finite("source.position", source.position)?;
    if source.speed <= 0.0 {
        return Err(ScenarioError::Schema(format!(
            "source.v must be > 0, got {}",
            source.speed
        )));
    }

    let mut channel_names = BTreeSet::new();
    let mut total_weight = 0.0_f64;
    for channel in &channels {
        if channel.name.is_empty() {
            return Err(ScenarioError::Schema("channel name must not be empty".into()));
        }
        if !channel_names.insert(channel.name.as_str()) {
            return Err(ScenarioError::Schema(format!(
                "duplicate channel name `{}`",
                channel.name
            )));
        }
        ensure_finite(&format!("channel `{}` direction", channel.name), channel.direction)?;
        ensure_finite(&format!("channel `{}` amplitude re", channel.name), channel.amplitude.re)?;
        ensure_finite(&format!("channel `{}` amplitude im", channel.name), channel.amplitude.im)?;
        let weight = amplitude::weight(channel.amplitude);
        if weight > 1.0 + TOLERANCE {
            return Err(ScenarioError::Schema(format!(
                "channel `{}` amplitude modulus exceeds 1 (|c|² = {weight})",
                channel.name
            )));
        }
        total_weight += weight;
    }
    if (total_weight - 1.0).abs() > TOLERANCE {
        return Err(ScenarioError::Normalization { total: total_weight });
    }

    let mut absorber_names = BTreeSet::new();
    for a in &absorbers {
        if a.name.is_empty() {
            return Err(ScenarioError::Schema("absorber name must not be empty".into()));
        }
        if a.name == BOUNDARY_NAME {
            return Err(ScenarioError::Schema(format!(
                "absorber name `{BOUNDARY_NAME}` is reserved for the stand-in boundary"
            )));
        }
        if !absorber_names.insert(a.name.as_str()) {
            return Err(ScenarioError::Schema(format!("duplicate absorber name `{}`", a.name)));
        }
        ensure_finite(&format!("absorber `{}` distance", a.name), a.distance)?;
        if a.distance <= 0.0 {
            return Err(ScenarioError::Schema(format!(
                "absorber `{}` distance must be > 0, got {}",
                a.name, a.distance
            )));
        }
        if !channel_names.contains(a.channel.as_str()) {
            return Err(ScenarioError::DanglingReference {
                owner: a.name.clone(),
                role: "channel",
                missing: a.channel.clone(),
            });
        }
    }

    // Resolve predicates: check targets, default missing deadlines to the
    // target's arrival plus the slack, and forbid pre-emission deadlines.
    let arrival = |distance: f64| source.emission_time + distance / source.speed;
    let distance_of = |name: &str| absorbers.iter().find(|a| a.name == name).map(|a| a.distance);
    let mut resolved = Vec::with_capacity(absorbers.len());
    for a in &absorbers {
        let activation = match a.activation.kind {
            ActivationKind::Always => {
                if a.activation.reference.is_some() || a.activation.by.is_some() {
                    return Err(ScenarioError::Schema(format!(
                        "absorber `{}`: `always` takes neither `ref` nor `by`",
                        a.name
                    )));
                }
                ContingencyPredicate::Always
            }
            kind => {
                let reference = a.activation.reference.clone().ok_or_else(|| {
                    ScenarioError::Schema(format!(
                        "absorber `{}`: contingent activation needs a `ref`",
                        a.name
                    ))
                })?;
                let target_distance = distance_of(&reference).ok_or_else(|| {
                    ScenarioError::DanglingReference {
                        owner: a.name.clone(),
                        role: "absorber",
                        missing: reference.clone(),
                    }
                })?;
                let by = match a.activation.by {
                    Some(by) => {
                        ensure_finite(&format!("absorber `{}` deadline", a.name), by)?;
                        if by < source.emission_time {
                            return Err(ScenarioError::Schema(format!(
                                "absorber `{}` deadline {by} predates emission at {}",
                                a.name, source.emission_time
                            )));
                        }
                        by
                    }
                    None => arrival(target_distance) + CONTINGENCY_SLACK,
                };
                match kind {
                    ActivationKind::NotFired => ContingencyPredicate::NotFired { reference, by },
                    ActivationKind::Fired => ContingencyPredicate::Fired { reference, by },
                    ActivationKind::Always => unreachable!(),
                }
            }
        };
        resolved.push(Absorber {
            name: a.name.clone(),
            channel: a.channel.clone(),
            distance: a.distance,
            activation,
        });
    }

    if let Some(path) = predicate_cycle(&resolved) {
        return Err(ScenarioError::PredicateCycle { path });
    }

    if detector_chain.len() > MAX_CHAIN {
        return Err(ScenarioError::Schema(format!(
            "detector chain of {} exceeds the maximum of {MAX_CHAIN}",
            detector_chain.len()
        )));
    }
    let mut detector_names = BTreeSet::new();
    for d in &detector_chain {
        if !detector_names.insert(d.name.as_str()) {
            return Err(ChainError::DuplicateDetector { name: d.name.clone() }.into());
        }
        let total = amplitude::weight(d.activate) + amplitude::weight(d.pass);
        if (total - 1.0).abs() > TOLERANCE {
            return Err(ChainError::NotUnitary { name: d.name.clone(), total }.into());
        }
    }

    let horizon = match horizon {
        Some(h) => {
            ensure_finite("horizon", h)?;
            if h <= 0.0 {
                return Err(ScenarioError::Schema(format!("horizon must be > 0, got {h}")));
            }
            h
        }
        None => DEFAULT_HORIZON_M,
    };

    Ok(Setup { label, source, channels, absorbers: resolved, boundary, detector_chain, horizon })
}

/// Finds a cycle in the predicate reference graph, if any.  Each
/// absorber references at most one other, so every cycle is a simple
/// chain that bites its own tail.
fn predicate_cycle(absorbers: &[Absorber]) -> Option<Vec<String>> {
    let index: BTreeMap<&str, usize> =
        absorbers.iter().enumerate().map(|(i, a)| (a.name.as_str(), i)).collect();
    let next =
        |i: usize| absorbers[i].activation.reference().map(|r| index[r]);
    let mut done = vec![false; absorbers.len()];
    for start in 0..absorbers.len() {
        if done[start] {
            continue;
        }
        let mut path: Vec<usize> = Vec::new();
        let mut cursor = Some(start);
        while let Some(i) = cursor {
            if done[i] {
                break;
            }
            if let Some(pos) = path.iter().position(|&p| p == i) {
                let mut cycle: Vec<String> =
                    path[pos..].iter().map(|&p| absorbers[p].name.clone()).collect();
                cycle.push(absorbers[i].name.clone());
                return Some(cycle);
            }
            path.push(i);
            cursor = next(i);
        }
        for i in path {
            done[i] = true;
        }
    }
    None
}
