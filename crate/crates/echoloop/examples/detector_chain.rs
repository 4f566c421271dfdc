//! Downstream detector chains: when does a measurement actually happen?
//!
//! After absorption the particle can thread a chain of detectors, each
//! splitting every branch into "activated" and "ready" with fixed
//! complex couplings.  Branch weights always sum to 1 — entanglement
//! conserves the unit trace — but only branches where some *irreversible*
//! detector activated can seed a transaction.  Reversible (microscopic)
//! entanglement alone never emits a confirmation: the classical-quantum
//! cut is an explicit input here, not a derived quantity.
//!
//! Run with: cargo run --example detector_chain

use std::f64::consts::FRAC_1_SQRT_2;

use echoloop::chain::BranchTree;
use echoloop::Detector;
use num_complex::Complex64;

fn main() {
    let split = Complex64::new(FRAC_1_SQRT_2, 0.0);

    // A reversible micro-detector followed by an irreversible counter
    // with a biased, complex coupling (|0.6|^2 + |0.8i|^2 = 1).
    let chain = vec![
        Detector::new("amplifier", split, split, false).unwrap(),
        Detector::new("counter", Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), true)
            .unwrap(),
    ];

    // Watch the tree grow one interaction at a time.
    let mut tree = BranchTree::root();
    println!("start: 1 branch (root), weight 1");
    for detector in &chain {
        tree = tree.interact(detector.clone()).unwrap();
        println!("after {}:", detector.name);
        for leaf in &tree.leaves {
            println!("  {:<22} weight {:.4}", leaf.label(), leaf.weight);
        }
    }

    let distribution = tree.terminal_distribution().unwrap();
    let total: f64 = distribution.values().sum();
    println!("\ntotal weight: {total} (unit trace, enforced to 1e-12)");

    let capable = tree.transaction_capable_leaves();
    println!("\nbranches that can seed a transaction (counter activated):");
    for leaf in &capable {
        println!("  {:<22} weight {:.4}", leaf.label(), leaf.weight);
    }
    println!(
        "the amplifier alone settles nothing: reversible entanglement sends no confirmation"
    );

    // The same chain ships inside a scenario document.
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/maudlin-chained.json");
    let setup = echoloop::Setup::from_json_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let embedded = BranchTree::from_chain(setup.detector_chain.clone()).unwrap();
    println!(
        "\n{} embeds the same chain: {} leaves, {} transaction-capable",
        setup.label,
        embedded.leaves.len(),
        embedded.transaction_capable_leaves().len(),
    );
}
