//! One experiment, three universes: how the boundary condition decides
//! whether a contingent-absorber setup is even well defined.
//!
//! - `open` — offers may escape forever; escaping channels make the
//!   setup pathological.
//! - `perfect` — a distant ideal absorber confirms whatever escapes.
//! - `bigbang` — nothing absorbs, but advanced waves reflect off t = 0
//!   with a 180° phase flip, cancelling themselves like an absorber
//!   echo would.
//!
//! A fourth option needs no boundary at all: cover every channel with
//! real absorbers (`maudlin-with-c`), and even the open case closes.
//!
//! Run with: cargo run --example boundary_conditions

use echoloop::{advanced_ledger, classify, scenarios, BoundaryCondition, Setup};

fn describe(setup: &Setup) {
    let report = classify(setup).unwrap();
    println!("{} ->", setup.label);
    if report.is_well_posed() {
        println!("  well-posed ({} consistent histories)", report.histories.len());
    } else {
        for reason in report.reasons() {
            println!("  pathological: {reason}");
        }
    }
    for history in &report.histories {
        let ledger = advanced_ledger(setup, history);
        let flagged = ledger.flagged();
        let verdict = if flagged.is_empty() {
            "all advanced waves cancel".to_string()
        } else {
            let channels: Vec<&str> =
                flagged.iter().map(|region| region.channel.as_str()).collect();
            format!("advanced residue on {}", channels.join(", "))
        };
        let reflections = ledger.reflections.len();
        let (firer, _) = history.firing().unwrap();
        print!("    outcome {} (by {firer}): {verdict}", history.outcome_channel);
        if reflections > 0 {
            print!(" via {reflections} big-bang reflection(s)");
        }
        println!();
    }
}

fn main() {
    for boundary in [
        BoundaryCondition::Open,
        BoundaryCondition::PerfectAbsorber,
        BoundaryCondition::BigBangReflector,
    ] {
        describe(&scenarios::maudlin(boundary));
        println!();
    }

    println!("and with a real backstop C behind B, no boundary is needed:");
    describe(&scenarios::maudlin_with_c(BoundaryCondition::Open));
}
