//! Maudlin's experiment made well-posed: complete the description.
//!
//! The challenge in `maudlin_challenge` only bites while the left offer
//! can escape without meeting anything.  Real experiments sit inside a
//! universe: add what the offer eventually hits — here a perfect
//! absorbing boundary — and every history returns a full set of
//! confirmations.  The causal loop then resolves the same way in every
//! trial: left outcomes are completed by the swung absorber B itself,
//! never by the faraway backstop, and the frequencies land on the Born
//! weights 1/2 : 1/2.
//!
//! Run with: cargo run --example maudlin_resolved

use echoloop::{classify, echo_profile, run_trials, scenarios, BoundaryCondition};

fn main() {
    let setup = scenarios::maudlin(BoundaryCondition::PerfectAbsorber);
    println!("scenario: {}\n", setup.label);

    let report = classify(&setup).unwrap();
    println!("well-posed: {}", report.is_well_posed());
    for history in &report.histories {
        let (firer, time) = history.firing().unwrap();
        println!(
            "  outcome {}: B active = {}, completed by {firer} at t = {time} s",
            history.outcome_channel,
            history.is_active("B"),
        );
    }

    // Every history echoes the full offer back: half from each side,
    // nothing missing (the boundary stands in for B's channel when B
    // never swings).
    for history in &report.histories {
        let profile = echo_profile(&setup, history);
        println!(
            "  {} history echo: L = {:.2}, R = {:.2}, deficit = {}",
            history.outcome_channel,
            profile.value("L").unwrap(),
            profile.value("R").unwrap(),
            profile.deficit,
        );
    }

    // 100000 seeded trials: the 50/50 split, and the loop's signature.
    let batch = run_trials(&setup, 100_000, 42).unwrap();
    println!("\n100000 trials (seed 42):");
    for (channel, frequency) in &batch.frequencies {
        println!("  freq({channel}) = {frequency:.4}");
    }

    let left: Vec<_> = batch.trials.iter().filter(|t| t.outcome_channel == "L").collect();
    let at_b = left.iter().filter(|t| t.completing_absorber == "B").count();
    println!(
        "\nleft outcomes completed by B: {at_b} / {} (the remote boundary: {})",
        left.len(),
        left.len() - at_b,
    );
    println!("B completes every left transaction — the contingency resolves identically");
    println!("in each trial, because only one history per outcome is consistent.");
}
