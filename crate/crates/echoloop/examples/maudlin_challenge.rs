//! Maudlin's contingent-absorber challenge, in its sharpest form.
//!
//! A particle leaves to the left or right with equal amplitude.  A fixed
//! absorber A waits on the right.  Absorber B starts on the right too,
//! but swings to the *left* if A has not fired shortly after the offer
//! would have reached it — so B confirms the left offer only in the very
//! histories where the particle went left.  The outcome decides the
//! configuration that was supposed to decide the outcome: a causal loop.
//!
//! With nothing behind B, a right-outcome history leaves the left offer
//! escaping forever: nobody confirms it, no echo returns, and the
//! "strength" of the left confirmation could not have guided the
//! probabilities.  This crate diagnoses that setup as pathological
//! rather than assigning it numbers.
//!
//! Run with: cargo run --example maudlin_challenge

use echoloop::sampler::SamplerError;
use echoloop::{
    advanced_ledger, classify, echo_profile, run_trials, scenarios, BoundaryCondition,
};

fn main() {
    let setup = scenarios::maudlin(BoundaryCondition::Open);
    println!("scenario: {} (no boundary absorber)\n", setup.label);

    // The loop itself still has exactly one consistent history per
    // outcome — B active iff A silent — so enumeration succeeds:
    let report = classify(&setup).unwrap();
    for history in &report.histories {
        let (firer, _) = history.firing().unwrap();
        println!(
            "history: outcome {}, completed by {firer}, B active: {}",
            history.outcome_channel,
            history.is_active("B"),
        );
    }

    // ... but the classification names the trouble.
    println!("\nwell-posed: {}", report.is_well_posed());
    for reason in report.reasons() {
        println!("  reason: {reason}");
    }

    // In the A-fires history the left offer reaches nobody: the echo
    // profile shows a deficit, and the advanced-wave ledger shows the
    // un-cancelled left component surviving before emission.
    let a_fires = report
        .histories
        .iter()
        .find(|h| h.outcome_channel == "R")
        .expect("A-fires history");
    let profile = echo_profile(&setup, a_fires);
    println!("\nA-fires history echo profile:");
    for (channel, strength) in &profile.per_channel {
        println!("  {channel}: {strength:.4}");
    }
    println!("  unconfirmed deficit: {:.4}", profile.deficit);

    let ledger = advanced_ledger(&setup, a_fires);
    for region in ledger.flagged() {
        println!(
            "  advanced residue on {} over [{}, {}] s: |net| = {:.4}",
            region.channel,
            region.t_start,
            region.t_end,
            region.net.norm()
        );
    }

    // Sampling refuses outright: probabilities are undefined here.
    match run_trials(&setup, 1000, 1) {
        Err(SamplerError::Consistency(e)) => println!("\nsampler refuses: {e}"),
        other => panic!("expected a refusal, got {other:?}"),
    }

    println!("\nthe fix: give the escaping offer something to hit —");
    println!("  cargo run --example maudlin_resolved");
}
