//! The release gate: ten checks covering every capability the crate
//! promises.  Each test prints one `PASS criterion N` line with the
//! measured values (visible under `cargo test -- --nocapture`).
//!
//! Tolerances are pinned here and nowhere else: statistical checks at
//! n = 100000 use ±0.01 (≫ binomial σ ≈ 0.0016), exact structural
//! claims use equality, and floating-point conservation uses 1e-12.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use echoloop::accounting::{AccountingReport, EnsembleCell, RunEnsemble};
use echoloop::chain::{BranchTree, Detector};
use echoloop::consistency::{enumerate_histories, PathologyReason};
use echoloop::scenario::{
    Channel, ContingencyPredicate, ScenarioDoc, BOUNDARY_NAME,
};
use echoloop::synth::{random_setup, SynthConfig};
use echoloop::{
    advanced_ledger, build_scenario, classify, echo_profile, run_trials, scenarios,
    BoundaryCondition, History, Setup, TrialBatch,
};
use num_complex::Complex64;

fn rebuild_with_boundary(setup: &Setup, boundary: BoundaryCondition) -> Setup {
    let mut doc = ScenarioDoc::from(setup.clone());
    doc.boundary = boundary;
    build_scenario(doc).expect("boundary swap preserves validity")
}

#[test]
fn criterion_01_maudlin_outcomes_split_evenly() {
    let setup = scenarios::maudlin(BoundaryCondition::PerfectAbsorber);
    let start = Instant::now();
    let batch = run_trials(&setup, 100_000, 42).unwrap();
    let elapsed = start.elapsed();
    let left = batch.frequencies["L"];
    let right = batch.frequencies["R"];
    assert!((left - 0.5).abs() < 0.01, "freq(L) = {left}");
    assert!((right - 0.5).abs() < 0.01, "freq(R) = {right}");
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "PASS criterion 1: maudlin-perfect n=100000 seed=42 -> freq(L)={left:.5} \
         freq(R)={right:.5} (0.5 +/- 0.01) in {elapsed:?}"
    );
}

#[test]
fn criterion_02_left_outcomes_always_complete_at_b() {
    let setup = scenarios::maudlin(BoundaryCondition::PerfectAbsorber);
    let batch = run_trials(&setup, 100_000, 42).unwrap();
    let left_trials: Vec<_> =
        batch.trials.iter().filter(|t| t.outcome_channel == "L").collect();
    assert!(!left_trials.is_empty());
    let at_b = left_trials.iter().filter(|t| t.completing_absorber == "B").count();
    let at_boundary =
        left_trials.iter().filter(|t| t.completing_absorber == BOUNDARY_NAME).count();
    assert_eq!(at_b, left_trials.len(), "every L outcome completes at B");
    assert_eq!(at_boundary, 0, "no L outcome completes at the boundary");
    println!(
        "PASS criterion 2: {} of {} left outcomes completed at B, 0 at the boundary (exact)",
        at_b,
        left_trials.len()
    );
}

#[test]
fn criterion_03_renninger_frequencies_match_solid_angles() {
    let batch = run_trials(&scenarios::renninger(), 100_000, 42).unwrap();
    let e1 = batch.frequencies["E1"];
    assert!((e1 - 0.25).abs() < 0.01, "freq(E1) = {e1}");
    println!("PASS criterion 3: renninger n=100000 -> freq(E1)={e1:.5} (0.25 +/- 0.01)");
}

#[test]
fn criterion_04_pathology_detection() {
    let open = classify(&scenarios::maudlin(BoundaryCondition::Open)).unwrap();
    assert!(!open.is_well_posed());
    assert_eq!(
        open.reasons(),
        &[PathologyReason::EscapingOffer { channel: "L".into() }]
    );

    let with_c_open = classify(&scenarios::maudlin_with_c(BoundaryCondition::Open)).unwrap();
    assert!(with_c_open.is_well_posed());

    let bigbang = classify(&scenarios::maudlin(BoundaryCondition::BigBangReflector)).unwrap();
    assert!(bigbang.is_well_posed());

    println!(
        "PASS criterion 4: maudlin+open pathological (escaping offer on L); \
         maudlin-with-c+open and maudlin+bigbang well-posed"
    );
}

#[test]
fn criterion_05_echo_profiles_are_history_invariant() {
    let cases = [
        scenarios::maudlin(BoundaryCondition::PerfectAbsorber),
        scenarios::maudlin(BoundaryCondition::BigBangReflector),
        scenarios::maudlin_with_c(BoundaryCondition::Open),
        scenarios::maudlin_with_c(BoundaryCondition::PerfectAbsorber),
    ];
    let mut worst = 0.0_f64;
    for setup in &cases {
        let histories = enumerate_histories(setup).unwrap();
        assert!(histories.len() >= 2, "{} has one history only", setup.label);
        let reference = echo_profile(setup, &histories[0]);
        for history in &histories[1..] {
            let profile = echo_profile(setup, history);
            for (channel, value) in &profile.per_channel {
                let base = reference.value(channel).unwrap();
                worst = worst.max((value - base).abs());
            }
            worst = worst.max((profile.deficit - reference.deficit).abs());
        }
    }
    assert!(worst <= 1e-12, "max per-channel spread {worst}");
    println!(
        "PASS criterion 5: echo profiles agree across histories on {} setups \
         (max spread {worst:.2e} <= 1e-12)",
        cases.len()
    );
}

#[test]
fn criterion_06_advanced_waves_cancel_before_emission() {
    // The three shipped scenario families under both closed boundaries.
    let shipped = [
        scenarios::renninger(),
        scenarios::maudlin(BoundaryCondition::PerfectAbsorber),
        scenarios::maudlin_with_c(BoundaryCondition::PerfectAbsorber),
    ];
    let mut checked = 0usize;
    for base in &shipped {
        for boundary in
            [BoundaryCondition::PerfectAbsorber, BoundaryCondition::BigBangReflector]
        {
            let setup = rebuild_with_boundary(base, boundary);
            for history in enumerate_histories(&setup).unwrap() {
                let ledger = advanced_ledger(&setup, &history);
                assert!(ledger.clean(), "{} under {boundary} not clean", setup.label);
                checked += 1;
            }
        }
    }

    // A thousand randomized well-posed setups on top.
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let config = SynthConfig {
        cross_channel_only: true,
        boundaries: vec![
            BoundaryCondition::PerfectAbsorber,
            BoundaryCondition::BigBangReflector,
        ],
        ..SynthConfig::default()
    };
    for _ in 0..1000 {
        let setup = random_setup(&mut rng, &config);
        let report = classify(&setup).unwrap();
        assert!(report.is_well_posed(), "{}: {:?}", setup.label, report.reasons());
        for history in &report.histories {
            let ledger = advanced_ledger(&setup, history);
            assert!(ledger.clean(), "{} leaves advanced residue", setup.label);
            checked += 1;
        }
    }

    // Open boundary, A-fires history: the left advanced wave survives.
    let open = scenarios::maudlin(BoundaryCondition::Open);
    let histories = enumerate_histories(&open).unwrap();
    let a_fires = histories
        .iter()
        .find(|h| h.outcome_channel == "R")
        .expect("A-fires history exists");
    let ledger = advanced_ledger(&open, a_fires);
    let flagged = ledger.flagged();
    assert_eq!(flagged.len(), 1);
    assert_eq!(flagged[0].channel, "L");
    let residual = flagged[0].net.norm();
    assert!(residual > 1e-12);

    println!(
        "PASS criterion 6: {checked} histories clean under closed boundaries; \
         open A-fires history leaves |net|={residual:.6} on L"
    );
}

#[test]
fn criterion_07_detector_chains_conserve_unit_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0_f64;
    for round in 0..1000 {
        let length = rng.random_range(0..=10);
        let chain: Vec<Detector> = (0..length)
            .map(|i| {
                let share = rng.random::<f64>();
                let activate =
                    Complex64::from_polar(share.sqrt(), rng.random_range(0.0..std::f64::consts::TAU));
                let pass = Complex64::from_polar(
                    (1.0 - share).sqrt(),
                    rng.random_range(0.0..std::f64::consts::TAU),
                );
                Detector::new(format!("det{round}-{i}"), activate, pass, i % 2 == 0).unwrap()
            })
            .collect();
        let tree = BranchTree::from_chain(chain).unwrap();
        let distribution = tree.terminal_distribution().unwrap();
        let total: f64 = distribution.values().sum();
        worst = worst.max((total - 1.0).abs());
    }
    assert!(worst <= 1e-12, "worst |sum - 1| = {worst:e}");
    println!(
        "PASS criterion 7: 1000 random chains (length <= 10) keep unit trace \
         (worst |sum-1| = {worst:.2e} <= 1e-12)"
    );
}

/// Brute-force reference enumerator: every (outcome channel, activation
/// bitmask, firer) triple is generated and filtered by the consistency
/// rules written out independently of the library's solver.
fn oracle_enumerate(setup: &Setup) -> Vec<History> {
    let n = setup.absorbers.len();
    assert!(n <= 16, "oracle is exponential; keep it small");
    let mut rows: Vec<(usize, u64, History)> = Vec::new();
    for (channel_index, channel) in setup.channels.iter().enumerate() {
        for mask in 0u64..(1 << n) {
            let mut firers: Vec<Option<usize>> = (0..n).map(Some).collect();
            if setup.boundary != BoundaryCondition::Open {
                firers.push(None);
            }
            for firer in firers {
                if let Some(history) = oracle_history(setup, channel, mask, firer) {
                    rows.push((channel_index, mask, history));
                }
            }
        }
    }
    rows.sort_by_key(|(channel_index, mask, _)| (*channel_index, *mask));
    rows.into_iter().map(|(_, _, history)| history).collect()
}

fn oracle_history(
    setup: &Setup,
    channel: &Channel,
    mask: u64,
    firer: Option<usize>,
) -> Option<History> {
    let active = |i: usize| mask & (1 << i) != 0;

    // Rule 1: the firer must be the entity that receives this channel's
    // offer — the nearest active absorber (first declared on ties), or
    // the boundary exactly when no absorber on the channel is active.
    let (firer_name, fire_time) = match firer {
        Some(i) => {
            let a = &setup.absorbers[i];
            if a.channel != channel.name || !active(i) {
                return None;
            }
            for (j, other) in setup.absorbers.iter().enumerate() {
                if j == i || other.channel != channel.name || !active(j) {
                    continue;
                }
                if other.distance < a.distance || (other.distance == a.distance && j < i) {
                    return None;
                }
            }
            (a.name.clone(), setup.arrival_time(a))
        }
        None => {
            let covered = setup
                .absorbers
                .iter()
                .enumerate()
                .any(|(j, a)| a.channel == channel.name && active(j));
            if covered {
                return None;
            }
            (BOUNDARY_NAME.to_string(), setup.boundary_arrival_time())
        }
    };

    // Rule 2: every activation bit matches its predicate evaluated
    // against the firing record, spelled out here by hand.
    for (j, absorber) in setup.absorbers.iter().enumerate() {
        let holds = match &absorber.activation {
            ContingencyPredicate::Always => true,
            ContingencyPredicate::NotFired { reference, by } => {
                !(*reference == firer_name && fire_time <= *by)
            }
            ContingencyPredicate::Fired { reference, by } => {
                *reference == firer_name && fire_time <= *by
            }
        };
        if holds != active(j) {
            return None;
        }
    }

    let activations: BTreeMap<String, bool> = setup
        .absorbers
        .iter()
        .enumerate()
        .map(|(j, a)| (a.name.clone(), active(j)))
        .collect();
    let mut firing_times: BTreeMap<String, Option<f64>> =
        setup.absorbers.iter().map(|a| (a.name.clone(), None)).collect();
    firing_times.insert(firer_name, Some(fire_time));
    Some(History { activations, outcome_channel: channel.name.clone(), firing_times })
}

#[test]
fn criterion_08_solver_matches_the_brute_force_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let config = SynthConfig::default(); // any wiring, pathological included
    let mut total = 0usize;
    for _ in 0..500 {
        let setup = random_setup(&mut rng, &config);
        let fast = enumerate_histories(&setup).unwrap();
        let slow = oracle_enumerate(&setup);
        assert_eq!(fast, slow, "solver diverges from oracle on {}", setup.label);
        total += fast.len();
    }
    println!(
        "PASS criterion 8: candidate-scan solver equals the 2^n brute force on \
         500 random setups ({total} histories, exact)"
    );
}

#[test]
fn criterion_09_accounting_modes_agree() {
    let maudlin = scenarios::maudlin(BoundaryCondition::PerfectAbsorber);
    let renninger = scenarios::renninger();
    let cell = |setup: &Setup, state: &str, prior: f64, batch: TrialBatch| EnsembleCell {
        setup_id: setup.label.clone(),
        state_id: state.into(),
        prior,
        batch,
    };

    // Shared batches: the two accountings are the same tables.
    let shared = RunEnsemble {
        cells: vec![
            cell(&maudlin, "psi", 0.5, run_trials(&maudlin, 50_000, 7).unwrap()),
            cell(&renninger, "psi", 0.5, run_trials(&renninger, 50_000, 8).unwrap()),
        ],
    };
    let report = AccountingReport::build(&shared).unwrap();
    assert_eq!(report.conditionals, report.many_spaces);
    assert_eq!(report.max_divergence, 0.0);

    // Independently sampled batches: only statistical daylight.
    let independent = RunEnsemble {
        cells: vec![
            cell(&maudlin, "psi", 0.5, run_trials(&maudlin, 50_000, 107).unwrap()),
            cell(&renninger, "psi", 0.5, run_trials(&renninger, 50_000, 108).unwrap()),
        ],
    };
    let pair = AccountingReport::build_pair(&shared, &independent).unwrap();
    assert!(pair.max_divergence > 0.0);
    assert!(pair.max_divergence < 0.02, "divergence {}", pair.max_divergence);

    println!(
        "PASS criterion 9: shared batches agree exactly; independent 50000-trial \
         batches diverge by {:.5} < 0.02",
        pair.max_divergence
    );
}

#[test]
fn criterion_10_full_pipeline_stays_fast() {
    // End-to-end pass over every shipped document: parse, classify,
    // sample, ledger, account.  The suite-wide < 60 s budget is enforced
    // by keeping its single heaviest path well under a tenth of that.
    let start = Instant::now();
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut setups = Vec::new();
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        setups.push(Setup::from_json_str(&text).unwrap());
    }
    assert_eq!(setups.len(), 6);
    let mut sampled = 0u64;
    for setup in &setups {
        let report = classify(setup).unwrap();
        for history in &report.histories {
            let _ = advanced_ledger(setup, history);
            let _ = echo_profile(setup, history);
        }
        if report.is_well_posed() {
            let batch = run_trials(setup, 10_000, 1).unwrap();
            sampled += batch.trials.len() as u64;
            let ensemble = RunEnsemble {
                cells: vec![EnsembleCell {
                    setup_id: setup.label.clone(),
                    state_id: "psi".into(),
                    prior: 1.0,
                    batch,
                }],
            };
            let report = AccountingReport::build(&ensemble).unwrap();
            assert_eq!(report.max_divergence, 0.0);
        }
    }
    let elapsed = start.elapsed();
    assert!(sampled >= 40_000);
    assert!(elapsed.as_secs_f64() < 6.0, "pipeline took {elapsed:?}");
    println!(
        "PASS criterion 10: parse+classify+sample+ledger+account over all shipped \
         documents ({sampled} trials) in {elapsed:?}"
    );
}
