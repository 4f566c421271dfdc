//! Command-line front end: `check`, `run`, `ledger`, and `compare`.
//!
//! Exit status contract, stable across subcommands:
//!
//! - `0` — success (including a clean report),
//! - `1` — usage, I/O, or schema errors,
//! - `2` — the scenario itself is pathological (`check` on a
//!   pathological setup; `run`/`compare` refusing to sample one).
//!
//! Text output is human-oriented and may change; `--format json` and
//! `--format csv` are the stable machine contracts, and identical
//! invocations over identical files produce byte-identical output.
//! `--out PATH` writes the report to a file instead of stdout.
//!
//! Ensemble manifests for `compare` look like:
//!
//! ```json
//! {
//!   "cells": [
//!     { "setup": "scenarios/maudlin-perfect.json", "state": "psi",
//!       "prior": 0.5, "trials": 20000, "seed": 7 },
//!     { "setup": "scenarios/renninger.json", "state": "psi",
//!       "prior": 0.5, "trials": 20000, "seed": 8, "independent_seed": 108 }
//!   ]
//! }
//! ```
//!
//! Scenario paths are resolved relative to the manifest's directory.
//! When `independent_seed` is present the many-spaces tables are built
//! from a fresh batch under that seed; otherwise both accountings share
//! one batch and agree exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::json;

use crate::accounting::{weight_check, AccountingReport, EnsembleCell, RunEnsemble};
use crate::amplitude;
use crate::chain::BranchTree;
use crate::consistency::{classify, ConsistencyError, ConsistencyReport};
use crate::sampler::{run_trials, SamplerError, TrialBatch};
use crate::scenario::Setup;
use crate::wave::advanced_ledger;

#[derive(Debug, Parser)]
#[command(
    name = "echoloop",
    version,
    about = "Offer/confirmation-wave simulator and causal-loop consistency checker"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a scenario as well-posed or pathological
    Check(ScenarioArgs),
    /// Sample transactions and tabulate outcome frequencies
    Run(RunArgs),
    /// Account for the advanced wave before emission, per history
    Ledger(ScenarioArgs),
    /// Compare big-space and many-spaces accounting over an ensemble
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Path to a scenario JSON document
    #[arg(value_name = "SCENARIO")]
    scenario_pos: Option<PathBuf>,
    /// Path to a scenario JSON document (alternative to the positional)
    #[arg(long, value_name = "PATH")]
    scenario: Option<PathBuf>,
    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to this file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// How many trials to sample
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// RNG seed; equal seeds reproduce batches bit for bit
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Path to an ensemble manifest JSON document
    #[arg(value_name = "ENSEMBLE")]
    ensemble_pos: Option<PathBuf>,
    /// Path to an ensemble manifest (alternative to the positional)
    #[arg(long, value_name = "PATH")]
    ensemble: Option<PathBuf>,
    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to this file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

/// One cell of an ensemble manifest.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestCell {
    setup: PathBuf,
    state: String,
    prior: f64,
    trials: u64,
    seed: u64,
    /// Seed for a second, independently sampled batch feeding the
    /// many-spaces tables; without it both accountings share one batch.
    #[serde(default)]
    independent_seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    cells: Vec<ManifestCell>,
}

/// A failed command: exit code plus the message for stderr.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure { code: 1, message: message.into() }
    }
}

/// Parses arguments and runs the selected subcommand.
pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Check(args) => cmd_check(args),
        Command::Run(args) => cmd_run(args),
        Command::Ledger(args) => cmd_ledger(args),
        Command::Compare(args) => cmd_compare(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("{}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn pick_path(
    positional: Option<PathBuf>,
    flag: Option<PathBuf>,
    what: &str,
) -> Result<PathBuf, Failure> {
    match (positional, flag) {
        (Some(p), None) | (None, Some(p)) => Ok(p),
        (Some(_), Some(_)) => {
            Err(Failure::usage(format!("error: give the {what} path once, not twice")))
        }
        (None, None) => Err(Failure::usage(format!("error: no {what} path given"))),
    }
}

fn load_setup(path: &Path) -> Result<Setup, Failure> {
    let text = fs::read_to_string(path).map_err(|e| {
        Failure::usage(format!("error: cannot read {}: {e}", path.display()))
    })?;
    Setup::from_json_str(&text).map_err(|e| {
        Failure::usage(format!("error: invalid scenario {}: {e}", path.display()))
    })
}

/// Writes the rendered report to `--out` or stdout.
fn emit(out: Option<&Path>, rendered: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, rendered).map_err(|e| {
            Failure::usage(format!("error: cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn fmt_complex(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn classify_loaded(setup: &Setup) -> Result<ConsistencyReport, Failure> {
    classify(setup).map_err(|e| Failure::usage(format!("error: {e}")))
}

fn cmd_check(args: ScenarioArgs) -> Result<u8, Failure> {
    if args.format == Format::Csv {
        return Err(Failure::usage("error: check has no csv form; use text or json"));
    }
    let path = pick_path(args.scenario_pos, args.scenario, "scenario")?;
    let setup = load_setup(&path)?;
    let report = classify_loaded(&setup)?;

    let chain_summary = if setup.detector_chain.is_empty() {
        None
    } else {
        let tree = BranchTree::from_chain(setup.detector_chain.iter().cloned())
            .map_err(|e| Failure::usage(format!("error: {e}")))?;
        let distribution = tree
            .terminal_distribution()
            .map_err(|e| Failure::usage(format!("error: {e}")))?;
        let capable: Vec<String> =
            tree.transaction_capable_leaves().iter().map(|b| b.label()).collect();
        Some((distribution, capable))
    };

    let rendered = match args.format {
        Format::Json => {
            let mut value = serde_json::to_value(&report).expect("report serializes");
            value["scenario"] = json!(setup.label);
            value["boundary"] = json!(setup.boundary.token());
            if let Some((distribution, capable)) = &chain_summary {
                value["detector_chain"] = json!({
                    "terminal_distribution": distribution,
                    "transaction_capable": capable,
                });
            }
            to_json_text(&value)
        }
        _ => {
            let mut text = String::new();
            let w = &mut text;
            writeln!(w, "scenario: {}", setup.label).unwrap();
            writeln!(w, "boundary: {}", setup.boundary).unwrap();
            let verdict = if report.is_well_posed() { "well-posed" } else { "pathological" };
            writeln!(w, "classification: {verdict}").unwrap();
            for reason in report.reasons() {
                writeln!(w, "  reason: {reason}").unwrap();
            }
            writeln!(w, "consistent histories: {}", report.histories.len()).unwrap();
            for (channel, count) in &report.per_outcome {
                writeln!(w, "  outcome {channel}: {count}").unwrap();
            }
            if let Some((distribution, capable)) = &chain_summary {
                writeln!(w, "detector chain: {} detectors", setup.detector_chain.len()).unwrap();
                for (leaf, weight) in distribution {
                    writeln!(w, "  leaf {leaf}: {weight}").unwrap();
                }
                if capable.is_empty() {
                    writeln!(w, "  transaction-capable leaves: none").unwrap();
                } else {
                    writeln!(w, "  transaction-capable leaves: {}", capable.join(", ")).unwrap();
                }
            }
            text
        }
    };
    emit(args.out.as_deref(), &rendered)?;
    Ok(if report.is_well_posed() { 0 } else { 2 })
}

fn cmd_run(args: RunArgs) -> Result<u8, Failure> {
    let path = pick_path(args.scenario.scenario_pos, args.scenario.scenario, "scenario")?;
    let setup = load_setup(&path)?;
    let batch = run_trials(&setup, args.trials, args.seed).map_err(|e| match e {
        SamplerError::Consistency(ConsistencyError::NotWellPosed { .. }) => {
            Failure { code: 2, message: format!("error: {e}") }
        }
        other => Failure::usage(format!("error: {other}")),
    })?;
    let completions = weight_check(&setup, &batch);

    let rendered = match args.scenario.format {
        Format::Csv => {
            let mut bytes = Vec::new();
            batch
                .write_csv(&mut bytes)
                .map_err(|e| Failure::usage(format!("error: cannot render csv: {e}")))?;
            String::from_utf8(bytes).expect("csv output is utf-8")
        }
        Format::Json => to_json_text(&json!({
            "scenario": setup.label,
            "boundary": setup.boundary.token(),
            "trials": args.trials,
            "seed": args.seed,
            "frequencies": batch.frequencies,
            "completions": completions,
        })),
        Format::Text => {
            let mut text = String::new();
            let w = &mut text;
            writeln!(w, "scenario: {}", setup.label).unwrap();
            writeln!(w, "boundary: {}", setup.boundary).unwrap();
            writeln!(w, "trials: {}", args.trials).unwrap();
            writeln!(w, "seed: {}", args.seed).unwrap();
            writeln!(w).unwrap();
            writeln!(w, "{:<12} {:>10} {:>10}", "outcome", "weight", "frequency").unwrap();
            for channel in &setup.channels {
                let weight = amplitude::weight(channel.amplitude);
                let frequency = batch.frequencies.get(&channel.name).copied().unwrap_or(0.0);
                writeln!(w, "{:<12} {:>10.6} {:>10.6}", channel.name, weight, frequency)
                    .unwrap();
            }
            if !completions.is_empty() {
                writeln!(w).unwrap();
                writeln!(
                    w,
                    "{:<12} {:<12} {:>8} {:>10} {:>10} {:>10}",
                    "absorber", "channel", "count", "frequency", "weight", "gap"
                )
                .unwrap();
                for row in &completions {
                    writeln!(
                        w,
                        "{:<12} {:<12} {:>8} {:>10.6} {:>10.6} {:>+10.6}",
                        row.absorber,
                        row.channel,
                        row.completions,
                        row.frequency,
                        row.declared_weight,
                        row.gap
                    )
                    .unwrap();
                }
            }
            text
        }
    };
    emit(args.scenario.out.as_deref(), &rendered)?;
    Ok(0)
}

fn cmd_ledger(args: ScenarioArgs) -> Result<u8, Failure> {
    if args.format == Format::Csv {
        return Err(Failure::usage("error: ledger has no csv form; use text or json"));
    }
    let path = pick_path(args.scenario_pos, args.scenario, "scenario")?;
    let setup = load_setup(&path)?;
    let report = classify_loaded(&setup)?;
    let ledgers: Vec<_> =
        report.histories.iter().map(|h| (h, advanced_ledger(&setup, h))).collect();
    let all_clean = ledgers.iter().all(|(_, ledger)| ledger.clean());

    let rendered = match args.format {
        Format::Json => {
            let histories: Vec<_> = ledgers
                .iter()
                .map(|(history, ledger)| {
                    let (firer, _) = history.firing().expect("exactly one firer");
                    json!({
                        "outcome": history.outcome_channel,
                        "completed_by": firer,
                        "clean": ledger.clean(),
                        "ledger": ledger,
                    })
                })
                .collect();
            to_json_text(&json!({
                "scenario": setup.label,
                "boundary": setup.boundary.token(),
                "all_clean": all_clean,
                "histories": histories,
            }))
        }
        _ => {
            let mut text = String::new();
            let w = &mut text;
            writeln!(w, "scenario: {}", setup.label).unwrap();
            writeln!(w, "boundary: {}", setup.boundary).unwrap();
            writeln!(w, "histories: {}", ledgers.len()).unwrap();
            for (i, (history, ledger)) in ledgers.iter().enumerate() {
                let (firer, _) = history.firing().expect("exactly one firer");
                writeln!(
                    w,
                    "history {}: outcome {}, completed by {firer}",
                    i + 1,
                    history.outcome_channel
                )
                .unwrap();
                for region in &ledger.regions {
                    let status =
                        if region.net.norm() > amplitude::TOLERANCE { "FLAGGED" } else { "clean" };
                    writeln!(
                        w,
                        "  [{}, {}] channel {}: net {}  {status}",
                        region.t_start,
                        region.t_end,
                        region.channel,
                        fmt_complex(region.net)
                    )
                    .unwrap();
                }
                for reflection in &ledger.reflections {
                    writeln!(
                        w,
                        "  reflection on {}: amplitude {}",
                        reflection.channel,
                        fmt_complex(reflection.amplitude)
                    )
                    .unwrap();
                }
            }
            writeln!(w, "all clean: {all_clean}").unwrap();
            text
        }
    };
    emit(args.out.as_deref(), &rendered)?;
    Ok(0)
}

fn cmd_compare(args: CompareArgs) -> Result<u8, Failure> {
    let path = pick_path(args.ensemble_pos, args.ensemble, "ensemble")?;
    let text = fs::read_to_string(&path).map_err(|e| {
        Failure::usage(format!("error: cannot read {}: {e}", path.display()))
    })?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| {
        Failure::usage(format!("error: invalid ensemble manifest {}: {e}", path.display()))
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));

    let mut shared_cells = Vec::with_capacity(manifest.cells.len());
    let mut independent_cells = Vec::with_capacity(manifest.cells.len());
    for cell in &manifest.cells {
        let scenario_path =
            if cell.setup.is_absolute() { cell.setup.clone() } else { base.join(&cell.setup) };
        let setup = load_setup(&scenario_path)?;
        let sample = |seed: u64| -> Result<TrialBatch, Failure> {
            run_trials(&setup, cell.trials, seed).map_err(|e| match e {
                SamplerError::Consistency(ConsistencyError::NotWellPosed { .. }) => {
                    Failure { code: 2, message: format!("error: cell {}: {e}", setup.label) }
                }
                other => Failure::usage(format!("error: cell {}: {other}", setup.label)),
            })
        };
        let batch = sample(cell.seed)?;
        let second = match cell.independent_seed {
            Some(seed) => sample(seed)?,
            None => batch.clone(),
        };
        shared_cells.push(EnsembleCell {
            setup_id: setup.label.clone(),
            state_id: cell.state.clone(),
            prior: cell.prior,
            batch,
        });
        independent_cells.push(EnsembleCell {
            setup_id: setup.label,
            state_id: cell.state.clone(),
            prior: cell.prior,
            batch: second,
        });
    }
    let big = RunEnsemble { cells: shared_cells };
    let many = RunEnsemble { cells: independent_cells };
    let report = AccountingReport::build_pair(&big, &many)
        .map_err(|e| Failure::usage(format!("error: {e}")))?;

    let rendered = match args.format {
        Format::Json => to_json_text(&report),
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            let csv_failure = |e: csv::Error| Failure::usage(format!("error: cannot render csv: {e}"));
            writer
                .write_record(["setup", "state", "outcome", "mode", "probability"])
                .map_err(csv_failure)?;
            let sections = [
                ("joint", &report.joint),
                ("conditional", &report.conditionals),
                ("many_spaces", &report.many_spaces),
            ];
            for (mode, tables) in sections {
                for (setup, states) in tables {
                    for (state, outcomes) in states {
                        for (outcome, p) in outcomes {
                            let probability = p.to_string();
                            writer
                                .write_record([
                                    setup.as_str(),
                                    state.as_str(),
                                    outcome.as_str(),
                                    mode,
                                    probability.as_str(),
                                ])
                                .map_err(csv_failure)?;
                        }
                    }
                }
            }
            let bytes = writer
                .into_inner()
                .map_err(|e| Failure::usage(format!("error: cannot render csv: {e}")))?;
            String::from_utf8(bytes).expect("csv output is utf-8")
        }
        Format::Text => {
            let mut text = String::new();
            let w = &mut text;
            writeln!(w, "ensemble: {} cells", manifest.cells.len()).unwrap();
            for cell in &big.cells {
                writeln!(
                    w,
                    "cell ({}, {}): prior {}, {} trials",
                    cell.setup_id,
                    cell.state_id,
                    cell.prior,
                    cell.batch.trials.len()
                )
                .unwrap();
                let conditional = &report.conditionals[&cell.setup_id][&cell.state_id];
                let many_table = &report.many_spaces[&cell.setup_id][&cell.state_id];
                for (outcome, p) in conditional {
                    let q = many_table.get(outcome).copied().unwrap_or(0.0);
                    writeln!(w, "  {outcome}: conditional {p:.6}, many-spaces {q:.6}").unwrap();
                }
            }
            writeln!(w, "max divergence: {}", report.max_divergence).unwrap();
            text
        }
    };
    emit(args.out.as_deref(), &rendered)?;
    Ok(0)
}

fn to_json_text<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}
