//! Two ways to account for probabilities when the setup itself varies.
//!
//! Run several experiments (cells), each with its own prior.  The
//! *big-space* view builds one probability space over everything:
//! joint P(setup, state, outcome), then conditionals.  The *many-spaces*
//! view gives each cell its own independent space and never multiplies
//! by a prior.  On shared data the conditional algebra collapses to the
//! per-cell frequencies, so the two views agree *exactly* — rerun a cell
//! with fresh samples and only statistical daylight appears.
//!
//! A second diagnostic answers the loop sceptic who suspects a
//! contingent absorber's long-run completion rate need not match its
//! channel weight |c|²: tabulate both and look.
//!
//! Run with: cargo run --example accounting_modes

use echoloop::accounting::{weight_check, AccountingReport, EnsembleCell, RunEnsemble};
use echoloop::{run_trials, scenarios, BoundaryCondition};

fn main() {
    let maudlin = scenarios::maudlin(BoundaryCondition::PerfectAbsorber);
    let renninger = scenarios::renninger();

    // Two cells, equal priors, one batch each.
    let ensemble = RunEnsemble {
        cells: vec![
            EnsembleCell {
                setup_id: maudlin.label.clone(),
                state_id: "psi".into(),
                prior: 0.5,
                batch: run_trials(&maudlin, 20_000, 7).unwrap(),
            },
            EnsembleCell {
                setup_id: renninger.label.clone(),
                state_id: "psi".into(),
                prior: 0.5,
                batch: run_trials(&renninger, 20_000, 8).unwrap(),
            },
        ],
    };

    let report = AccountingReport::build(&ensemble).unwrap();
    println!("shared batches:");
    for (setup, states) in &report.conditionals {
        for (state, outcomes) in states {
            for (outcome, p) in outcomes {
                let joint = report.joint[setup][state][outcome];
                let many = report.many_spaces[setup][state][outcome];
                println!(
                    "  ({setup}, {state}) {outcome}: joint {joint:.4}, \
                     conditional {p:.4}, many-spaces {many:.4}"
                );
            }
        }
    }
    println!("  max divergence: {} (exactly zero on shared data)\n", report.max_divergence);

    // Resample the many-spaces side independently: divergence becomes a
    // measurement of sampling noise, nothing more.
    let resampled = RunEnsemble {
        cells: ensemble
            .cells
            .iter()
            .map(|cell| EnsembleCell {
                setup_id: cell.setup_id.clone(),
                state_id: cell.state_id.clone(),
                prior: cell.prior,
                batch: run_trials(
                    if cell.setup_id == maudlin.label { &maudlin } else { &renninger },
                    20_000,
                    cell.batch.seed + 100,
                )
                .unwrap(),
            })
            .collect(),
    };
    let pair = AccountingReport::build_pair(&ensemble, &resampled).unwrap();
    println!("independently resampled batches:");
    println!("  max divergence: {:.5} (statistical only)\n", pair.max_divergence);

    // The sceptic's table: declared channel weights vs who actually
    // completed, per absorber.
    let batch = run_trials(&maudlin, 20_000, 7).unwrap();
    println!("weight check, {} (20000 trials):", maudlin.label);
    println!("  {:<10} {:<8} {:>7} {:>10} {:>8} {:>9}", "absorber", "channel", "count", "freq", "|c|^2", "gap");
    for row in weight_check(&maudlin, &batch) {
        println!(
            "  {:<10} {:<8} {:>7} {:>10.4} {:>8.4} {:>+9.4}",
            row.absorber, row.channel, row.completions, row.frequency, row.declared_weight, row.gap
        );
    }
    println!("the contingent absorber B tracks |c_L|^2 = 0.5 like any fixed detector would");
}
