//! Renninger's negative-result experiment: a source inside a partial
//! shell E1 (a quarter of the solid angle, 1 m away) with a full shell
//! E2 behind it (2 m away).  Even when E1 does *not* fire, the state
//! changes — the offer is renormalized onto E2 — yet no interaction
//! happened.  In the transactional picture both absorbers always return
//! confirmations and the source picks one transaction by Born weight.
//!
//! Run with: cargo run --example renninger

use echoloop::{classify, echo_profile, run_trials, scenarios};

fn main() {
    let setup = scenarios::renninger();
    println!("scenario: {}", setup.label);
    for channel in &setup.channels {
        let absorber = setup.absorbers_on(&channel.name).next().unwrap();
        println!(
            "  channel {}: weight {:.2}, absorber {} at {} m (arrival t = {} s)",
            channel.name,
            channel.amplitude.norm_sqr(),
            absorber.name,
            absorber.distance,
            setup.arrival_time(absorber),
        );
    }

    // Two consistent histories: one per shell.  Nothing is contingent,
    // so both absorbers are active in both histories.
    let report = classify(&setup).unwrap();
    println!("\nwell-posed: {}", report.is_well_posed());
    for history in &report.histories {
        let (firer, time) = history.firing().unwrap();
        println!("  history: outcome {}, {firer} fires at t = {time} s", history.outcome_channel);
    }

    // The echo profile is the same in both histories: each shell echoes
    // its solid-angle share back at the source.
    let profile = echo_profile(&setup, &report.histories[0]);
    println!("\nconfirmation strengths (any history):");
    for (channel, strength) in &profile.per_channel {
        println!("  {channel}: {strength:.4}");
    }

    // Long-run frequencies reproduce |c|^2 = solid angle / 4 pi.
    let batch = run_trials(&setup, 100_000, 42).unwrap();
    println!("\n100000 seeded trials:");
    for (channel, frequency) in &batch.frequencies {
        println!("  freq({channel}) = {frequency:.4}");
    }
    println!("expected: E1 = 0.25 (quarter shell), E2 = 0.75 (the rest)");
}
