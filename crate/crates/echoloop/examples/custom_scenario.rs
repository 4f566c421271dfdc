//! Building scenarios of your own, from JSON or from document structs,
//! and what validation catches before the solver ever runs.
//!
//! The scenario here is a three-way split with a *fired*-contingency:
//! absorber `echo` on channel C participates only if `trigger` on
//! channel A has fired — the mirror image of Maudlin's `not_fired`
//! wiring — plus an always-on absorber behind it so channel C stays
//! covered either way.
//!
//! Run with: cargo run --example custom_scenario

use echoloop::{classify, resolve_transaction, run_trials, Setup};

const DOCUMENT: &str = r#"{
  "label": "three-way",
  "source": { "t0": 0.0, "v": 1000.0, "position": 0.0 },
  "channels": [
    { "name": "A", "direction": 1.0,  "amplitude": { "re": 0.5, "im": 0.0 } },
    { "name": "B", "direction": -1.0, "amplitude": { "re": 0.0, "im": 0.5 } },
    { "name": "C", "direction": 1.0,  "amplitude": { "re": 0.7071067811865476, "im": 0.0 } }
  ],
  "absorbers": [
    { "name": "trigger",  "channel": "A", "distance": 1.0, "activation": { "kind": "always" } },
    { "name": "sink",     "channel": "B", "distance": 2.0, "activation": { "kind": "always" } },
    { "name": "echo",     "channel": "C", "distance": 3.0, "activation": { "kind": "fired", "ref": "trigger" } },
    { "name": "backstop", "channel": "C", "distance": 4.0, "activation": { "kind": "always" } }
  ],
  "boundary": "perfect"
}"#;

fn main() {
    let setup = Setup::from_json_str(DOCUMENT).unwrap();
    println!("parsed `{}`: {} channels, {} absorbers", setup.label, setup.channels.len(), setup.absorbers.len());

    let report = classify(&setup).unwrap();
    println!("well-posed: {}\n", report.is_well_posed());

    // The fired-contingency makes absorber participation depend on the
    // outcome: `echo` only swings in when the particle went to A — in
    // which case it receives nothing anyway (C's offer is confirmed by
    // whoever is first).  Watch who completes what:
    for channel in &setup.channels {
        let transaction = resolve_transaction(&setup, &channel.name).unwrap();
        println!(
            "outcome {}: completed by {:<9} (echo active: {})",
            channel.name,
            transaction.completing_absorber,
            transaction.history.is_active("echo"),
        );
    }

    // Frequencies follow the declared weights: 0.25 / 0.25 / 0.5.
    let batch = run_trials(&setup, 50_000, 11).unwrap();
    println!("\n50000 trials:");
    for (channel, freq) in &batch.frequencies {
        let weight = setup.channel(channel).unwrap().amplitude.norm_sqr();
        println!("  {channel}: freq {freq:.4} vs weight {weight:.4}");
    }

    // Validation refuses malformed documents with a specific error, not
    // a repaired guess.  A few things it catches:
    println!("\nthings validation refuses:");
    for (what, text) in [
        (
            "unnormalized amplitudes",
            DOCUMENT.replace("\"re\": 0.7071067811865476", "\"re\": 0.9"),
        ),
        (
            "dangling contingency reference",
            DOCUMENT.replace("\"ref\": \"trigger\"", "\"ref\": \"ghost\""),
        ),
        (
            "reserved absorber name",
            DOCUMENT.replace("\"name\": \"backstop\"", "\"name\": \"boundary\""),
        ),
    ] {
        let err = Setup::from_json_str(&text).unwrap_err();
        println!("  {what}: {err}");
    }
}
