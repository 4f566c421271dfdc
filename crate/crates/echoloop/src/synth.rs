//! Randomized scenario generation for stress and property tests.
//!
//! [`random_setup`] draws a valid [`Setup`] from a configurable family:
//! channel count, absorber count, allowed boundaries, and how contingency
//! references are wired.  Generated documents go through the same
//! [`build_scenario`] validation as user input, so anything this module
//! returns is schema-legal by construction.
//!
//! With [`SynthConfig::cross_channel_only`] set, every contingency
//! references an *earlier-declared* absorber on a *different* channel.
//! That wiring makes the active set of each channel independent of which
//! absorber on it completes the transaction (the reference never fires in
//! any candidate history for that channel), which forces exactly one
//! consistent history per channel.  Under a non-open boundary such setups
//! are therefore well-posed by construction — the family used to
//! exercise the solver and ledger at scale without hand-filtering
//! pathological draws.

use std::f64::consts::TAU;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rand::Rng;

use crate::scenario::{
    build_scenario, ActivationDoc, ActivationKind, AbsorberDoc, BoundaryCondition, Channel,
    ScenarioDoc, Setup, Source,
};

/// Bounds for [`random_setup`].
#[derive(Debug, Clone)]
pub struct SynthConfig {
    /// How many offer channels to draw (inclusive).
    pub channels: RangeInclusive<usize>,
    /// How many absorbers to draw (inclusive).
    pub absorbers: RangeInclusive<usize>,
    /// Boundary conditions to pick from, uniformly.
    pub boundaries: Vec<BoundaryCondition>,
    /// Restrict contingencies to earlier absorbers on other channels,
    /// guaranteeing well-posedness under non-open boundaries.
    pub cross_channel_only: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            channels: 1..=4,
            absorbers: 0..=10,
            boundaries: vec![
                BoundaryCondition::Open,
                BoundaryCondition::PerfectAbsorber,
                BoundaryCondition::BigBangReflector,
            ],
            cross_channel_only: false,
        }
    }
}

/// Draws one valid scenario from the configured family.
pub fn random_setup<R: Rng + ?Sized>(rng: &mut R, config: &SynthConfig) -> Setup {
    let source = Source { emission_time: 0.0, speed: 1000.0, position: 0.0 };

    let channel_count = rng.random_range(config.channels.clone()).max(1);
    let raw: Vec<f64> = (0..channel_count).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = raw.iter().sum();
    let channels: Vec<Channel> = raw
        .iter()
        .enumerate()
        .map(|(i, w)| Channel {
            name: format!("ch{i}"),
            direction: if i % 2 == 0 { 1.0 } else { -1.0 },
            amplitude: Complex64::from_polar((w / total).sqrt(), rng.random_range(0.0..TAU)),
        })
        .collect();

    let absorber_count = rng.random_range(config.absorbers.clone());
    let mut absorbers: Vec<AbsorberDoc> = Vec::with_capacity(absorber_count);
    for i in 0..absorber_count {
        let channel = &channels[rng.random_range(0..channel_count)].name;
        let distance = rng.random_range(0.5..50.0);
        let candidates: Vec<usize> = (0..i)
            .filter(|&j| !config.cross_channel_only || absorbers[j].channel != *channel)
            .collect();
        let activation = if candidates.is_empty() || rng.random::<f64>() < 0.45 {
            ActivationDoc { kind: ActivationKind::Always, reference: None, by: None }
        } else {
            let target = &absorbers[candidates[rng.random_range(0..candidates.len())]];
            let kind = if rng.random::<bool>() {
                ActivationKind::Fired
            } else {
                ActivationKind::NotFired
            };
            // Mostly lean on the default deadline (just past the
            // reference's arrival); sometimes pick an early one so the
            // deadline logic gets exercised too.
            let by = if rng.random::<f64>() < 0.7 {
                None
            } else {
                let arrival = source.emission_time + target.distance / source.speed;
                Some(source.emission_time + rng.random::<f64>() * (arrival - source.emission_time))
            };
            ActivationDoc { kind, reference: Some(target.name.clone()), by }
        };
        absorbers.push(AbsorberDoc {
            name: format!("d{i}"),
            channel: channel.clone(),
            distance,
            activation,
        });
    }

    let boundary = config.boundaries[rng.random_range(0..config.boundaries.len())];
    let doc = ScenarioDoc {
        label: format!("synth-{:08x}", rng.random::<u32>()),
        source,
        channels,
        absorbers,
        boundary,
        detector_chain: Vec::new(),
        horizon: None,
    };
    build_scenario(doc).expect("synthesized scenario is valid by construction")
}
