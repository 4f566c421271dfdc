//! Offer amplitudes, confirmation strengths, echo profiles, and the
//! advanced-wave ledger.
//!
//! The source launches a retarded offer wave carrying each channel's
//! amplitude.  The first active absorber on a channel receives that full
//! amplitude — everyone behind it sits in its shadow and receives zero —
//! and answers with a confirmation whose strength back at the source is
//! the squared modulus of what arrived.  The [`EchoProfile`] collects
//! those strengths per channel: it is everything the source "hears" at
//! emission time, and Born sampling weights come straight from it.
//! Channels no real absorber covers are credited their full weight by a
//! perfect-absorber or big-bang boundary, or dropped into the profile's
//! `deficit` under an open one.
//!
//! The source also has an advanced half propagating into t < t₀.  The
//! [`AdvancedLedger`] audits its fate channel by channel: a confirming
//! absorber cancels it exactly; the perfect-absorber boundary does the
//! same for uncovered channels; a big-bang reflector lets it run back to
//! t = 0 and return phase-flipped so it cancels itself (the reflection
//! is recorded as its own row); an open boundary leaves an uncancelled
//! residue — the telltale of an ill-posed setup.
//!
//! Everything here is a pure function of `(setup, history)`, safe to
//! call concurrently.  The echo cycle is modeled as already converged:
//! one offer pass, one confirmation pass.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amplitude::{self, TOLERANCE};
use crate::scenario::{BoundaryCondition, History, Setup};

/// What the offer wave delivers to one absorber.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OfferAmplitude {
    pub absorber: String,
    /// The channel amplitude if this absorber is the channel's first
    /// active one; zero when shadowed or inactive.
    pub value: Complex64,
    /// When the wavefront passes this absorber's radius, firing or not.
    pub arrival: f64,
}

/// An absorber's confirmation strength as received at the source:
/// offer × conjugate(offer), a non-negative real.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfirmationStrength {
    pub absorber: String,
    pub value: f64,
}

/// Per-channel confirmation strengths at the source at emission time,
/// in declared channel order, plus the unconfirmed remainder.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EchoProfile {
    pub per_channel: Vec<(String, f64)>,
    /// Weight of offers nobody confirmed.  Zero except under an open
    /// boundary with uncovered channels.
    pub deficit: f64,
}

impl EchoProfile {
    pub fn value(&self, channel: &str) -> Option<f64> {
        self.per_channel.iter().find(|(name, _)| name == channel).map(|(_, v)| *v)
    }

    /// Total confirmed strength; with the deficit this sums to 1.
    pub fn confirmed_total(&self) -> f64 {
        self.per_channel.iter().map(|(_, v)| v).sum()
    }
}

/// One pre-t₀ interval on one channel and the net advanced amplitude
/// surviving there.  Serializes flat: `{t_start, t_end, channel, net_re,
/// net_im}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RegionDoc", into = "RegionDoc")]
pub struct LedgerRegion {
    pub t_start: f64,
    pub t_end: f64,
    pub channel: String,
    pub net: Complex64,
}

#[derive(Serialize, Deserialize)]
struct RegionDoc {
    t_start: f64,
    t_end: f64,
    channel: String,
    net_re: f64,
    net_im: f64,
}

impl From<RegionDoc> for LedgerRegion {
    fn from(doc: RegionDoc) -> Self {
        LedgerRegion {
            t_start: doc.t_start,
            t_end: doc.t_end,
            channel: doc.channel,
            net: Complex64::new(doc.net_re, doc.net_im),
        }
    }
}

impl From<LedgerRegion> for RegionDoc {
    fn from(r: LedgerRegion) -> Self {
        RegionDoc {
            t_start: r.t_start,
            t_end: r.t_end,
            channel: r.channel,
            net_re: r.net.re,
            net_im: r.net.im,
        }
    }
}

/// A big-bang reflection event: the advanced component that reached
/// t = 0 on `channel`, sent forward again with phase π.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reflection {
    pub channel: String,
    /// Reflected amplitude: −(advanced amplitude at t = 0).
    #[serde(with = "amplitude::rect")]
    pub amplitude: Complex64,
}

/// The fate of the source's advanced wave before emission.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdvancedLedger {
    pub regions: Vec<LedgerRegion>,
    /// Present only under [`BoundaryCondition::BigBangReflector`], one
    /// row per channel whose cancellation came from the reflection.
    pub reflections: Vec<Reflection>,
    pub boundary_used: BoundaryCondition,
}

impl AdvancedLedger {
    /// Regions where advanced amplitude survives, |net| > 1e-12.
    pub fn flagged(&self) -> Vec<&LedgerRegion> {
        self.regions.iter().filter(|r| r.net.norm() > TOLERANCE).collect()
    }

    /// True when every pre-t₀ region cancels.
    pub fn clean(&self) -> bool {
        self.flagged().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WaveError {
    #[error("unknown absorber `{name}`")]
    UnknownAbsorber { name: String },
}

/// What the offer wave delivers to the named absorber under `history`:
/// the channel amplitude if it is the first active absorber on its
/// channel, zero otherwise.  Arrival time is geometric either way.
pub fn offer_amplitude(
    setup: &Setup,
    history: &History,
    absorber: &str,
) -> Result<OfferAmplitude, WaveError> {
    let target = setup
        .absorber(absorber)
        .ok_or_else(|| WaveError::UnknownAbsorber { name: absorber.to_string() })?;
    let receives = setup
        .first_absorber(&target.channel, history)
        .is_some_and(|first| first.name == target.name);
    let value = if receives {
        setup.channel(&target.channel).expect("validated setup").amplitude
    } else {
        Complex64::new(0.0, 0.0)
    };
    Ok(OfferAmplitude { absorber: target.name.clone(), value, arrival: setup.arrival_time(target) })
}

/// Strength of the confirmation this offer provokes, measured at the
/// source: offer × conjugate(offer).  The product's imaginary part is
/// asserted below 1e-12 before being discarded.
pub fn confirmation_strength(offer: &OfferAmplitude) -> ConfirmationStrength {
    let product = offer.value * offer.value.conj();
    assert!(
        product.im.abs() < TOLERANCE,
        "offer × conjugate acquired an imaginary part: {}",
        product.im
    );
    ConfirmationStrength { absorber: offer.absorber.clone(), value: product.re }
}

/// The per-channel confirmation strengths the source receives at t₀
/// under `history`.
pub fn echo_profile(setup: &Setup, history: &History) -> EchoProfile {
    let mut per_channel = Vec::with_capacity(setup.channels.len());
    let mut deficit = 0.0;
    for channel in &setup.channels {
        let value = match setup.first_absorber(&channel.name, history) {
            Some(confirming) => {
                let offer = offer_amplitude(setup, history, &confirming.name)
                    .expect("absorber comes from this setup");
                confirmation_strength(&offer).value
            }
            None => match setup.boundary {
                // The stand-in confirms the full channel weight.
                BoundaryCondition::PerfectAbsorber | BoundaryCondition::BigBangReflector => {
                    amplitude::weight(channel.amplitude)
                }
                BoundaryCondition::Open => {
                    deficit += amplitude::weight(channel.amplitude);
                    0.0
                }
            },
        };
        per_channel.push((channel.name.clone(), value));
    }
    EchoProfile { per_channel, deficit }
}

/// Audits the source's advanced component per channel for t < t₀.
///
/// Per channel, the source contributes conjugate(c_k); a confirming
/// entity contributes −conjugate(c_k).  The subtraction is done
/// literally, so a cancelled channel nets exactly zero, not merely
/// something small.
pub fn advanced_ledger(setup: &Setup, history: &History) -> AdvancedLedger {
    let t0 = setup.source.emission_time;
    let t_start = match setup.boundary {
        // The advanced era runs all the way back to the reflector at t = 0.
        BoundaryCondition::BigBangReflector => 0.0,
        _ => t0 - setup.horizon / setup.source.speed,
    };
    let mut regions = Vec::with_capacity(setup.channels.len());
    let mut reflections = Vec::new();
    for channel in &setup.channels {
        let advanced = channel.amplitude.conj();
        let confirmed = setup.first_absorber(&channel.name, history).is_some();
        let net = match (confirmed, setup.boundary) {
            (true, _) | (false, BoundaryCondition::PerfectAbsorber) => advanced - advanced,
            (false, BoundaryCondition::BigBangReflector) => {
                reflections.push(Reflection { channel: channel.name.clone(), amplitude: -advanced });
                advanced - advanced
            }
            (false, BoundaryCondition::Open) => advanced,
        };
        regions.push(LedgerRegion { t_start, t_end: t0, channel: channel.name.clone(), net });
    }
    AdvancedLedger { regions, reflections, boundary_used: setup.boundary }
}
