//! End-to-end tests of the `echoloop` binary: the exit-status contract,
//! output determinism, `--out` plumbing, and each subcommand's stable
//! (JSON/CSV) surface.

use std::path::PathBuf;
use std::process::{Command, Output};

fn repo_path(relative: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(relative)
}

fn echoloop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_echoloop"))
        .args(args)
        .output()
        .expect("binary launches")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn check_exits_two_on_pathological_scenarios() {
    let path = repo_path("scenarios/maudlin-open.json");
    let out = echoloop(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let text = stdout(&out);
    assert!(text.contains("pathological"), "{text}");
    assert!(text.contains("escaping offer"), "{text}");
}

#[test]
fn check_exits_zero_on_well_posed_scenarios() {
    let path = repo_path("scenarios/maudlin-perfect.json");
    let out = echoloop(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("well-posed"));
}

#[test]
fn missing_and_malformed_files_exit_one() {
    let out = echoloop(&["check", "definitely-missing.json"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("cannot read"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = echoloop(&["check", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("invalid scenario"));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    let out = echoloop(&["check"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("no scenario path"));

    let path = repo_path("scenarios/renninger.json");
    let p = path.to_str().unwrap();
    let out = echoloop(&["check", p, "--scenario", p]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("once, not twice"));

    let out = echoloop(&["check", p, "--format", "csv"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("no csv form"));

    let out = echoloop(&["frobnicate"]);
    assert_eq!(code(&out), 1);

    let out = echoloop(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("check"));

    let out = echoloop(&["--version"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn run_refuses_pathological_scenarios_with_exit_two() {
    let path = repo_path("scenarios/maudlin-open.json");
    let out = echoloop(&["run", path.to_str().unwrap(), "--trials", "10"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("not well-posed"));
}

#[test]
fn run_with_zero_trials_succeeds_with_an_empty_table() {
    let path = repo_path("scenarios/maudlin-perfect.json");
    let out = echoloop(&["run", path.to_str().unwrap(), "--trials", "0", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "index,outcome,absorber\n");
}

#[test]
fn identical_invocations_produce_byte_identical_output() {
    let path = repo_path("scenarios/maudlin-perfect.json");
    let p = path.to_str().unwrap();
    for format in ["json", "csv"] {
        let args = ["run", p, "--trials", "500", "--seed", "9", "--format", format];
        let first = echoloop(&args);
        let second = echoloop(&args);
        assert_eq!(code(&first), 0);
        assert_eq!(first.stdout, second.stdout, "{format} output drifts");
    }
    let reseeded = echoloop(&["run", p, "--trials", "500", "--seed", "10", "--format", "csv"]);
    let original = echoloop(&["run", p, "--trials", "500", "--seed", "9", "--format", "csv"]);
    assert_ne!(reseeded.stdout, original.stdout, "seed must matter");
}

#[test]
fn run_csv_has_a_header_plus_one_row_per_trial() {
    let path = repo_path("scenarios/renninger.json");
    let out = echoloop(&["run", path.to_str().unwrap(), "--trials", "25", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 26);
    assert_eq!(lines[0], "index,outcome,absorber");
    assert!(lines[1].starts_with("0,"));
}

#[test]
fn run_json_reports_frequencies_and_completions() {
    let path = repo_path("scenarios/maudlin-perfect.json");
    let out = echoloop(&[
        "run",
        path.to_str().unwrap(),
        "--trials",
        "2000",
        "--seed",
        "42",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["scenario"], "maudlin-perfect");
    assert_eq!(value["trials"], 2000);
    let l = value["frequencies"]["L"].as_f64().unwrap();
    assert!((l - 0.5).abs() < 0.05);
    let completions = value["completions"].as_array().unwrap();
    assert_eq!(completions.len(), 2);
    assert_eq!(completions[0]["absorber"], "A");
    assert_eq!(completions[0]["channel"], "R");
}

#[test]
fn out_flag_writes_the_report_to_a_file_and_prints_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let path = repo_path("scenarios/maudlin-bigbang.json");
    let out = echoloop(&[
        "ledger",
        path.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(value["all_clean"], true);
    // The big-bang reflector shows up as an explicit phase-flipped row.
    let histories = value["histories"].as_array().unwrap();
    let reflections: usize = histories
        .iter()
        .map(|h| h["ledger"]["reflections"].as_array().unwrap().len())
        .sum();
    assert_eq!(reflections, 1);
}

#[test]
fn ledger_flags_the_open_boundary_residue() {
    let path = repo_path("scenarios/maudlin-open.json");
    let out = echoloop(&["ledger", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["all_clean"], false);
    let histories = value["histories"].as_array().unwrap();
    let dirty: Vec<_> = histories.iter().filter(|h| h["clean"] == false).collect();
    assert_eq!(dirty.len(), 1);
    assert_eq!(dirty[0]["outcome"], "R");
    // Regions serialize flat, with net split into re/im columns.
    let region = &dirty[0]["ledger"]["regions"][0];
    assert!(region["net_re"].is_number());
    assert!(region["net_im"].is_number());
}

#[test]
fn compare_on_shared_batches_reports_zero_divergence() {
    let path = repo_path("ensembles/shared.json");
    let out = echoloop(&["compare", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["max_divergence"], 0.0);
    let l = value["conditionals"]["maudlin-perfect"]["psi"]["L"].as_f64().unwrap();
    assert!((l - 0.5).abs() < 0.05);
    assert_eq!(value["conditionals"], value["many_spaces"]);
    // Joint entries carry the 0.5 prior.
    let joint = value["joint"]["maudlin-perfect"]["psi"]["L"].as_f64().unwrap();
    assert!((joint - 0.5 * l).abs() < 1e-12);
}

#[test]
fn compare_on_independent_batches_reports_small_divergence() {
    let path = repo_path("ensembles/independent.json");
    let out = echoloop(&["compare", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let divergence = value["max_divergence"].as_f64().unwrap();
    assert!(divergence > 0.0);
    assert!(divergence < 0.02, "divergence {divergence}");
}

#[test]
fn compare_csv_flattens_all_three_tables() {
    let path = repo_path("ensembles/shared.json");
    let out = echoloop(&["compare", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "setup,state,outcome,mode,probability");
    // 2 cells x 2 outcomes x 3 modes.
    assert_eq!(lines.len(), 1 + 12);
    assert!(lines.iter().any(|l| l.contains(",joint,")));
    assert!(lines.iter().any(|l| l.contains(",conditional,")));
    assert!(lines.iter().any(|l| l.contains(",many_spaces,")));
}

#[test]
fn compare_rejects_manifests_with_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("bad.json");
    std::fs::write(
        &manifest,
        r#"{"cells":[{"setup":"x.json","state":"s","prior":1.0,"trials":1,"seed":1,"oops":true}]}"#,
    )
    .unwrap();
    let out = echoloop(&["compare", manifest.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("invalid ensemble manifest"));
}

#[test]
fn compare_exits_two_when_a_cell_is_pathological() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = repo_path("scenarios/maudlin-open.json");
    let manifest = dir.path().join("ensemble.json");
    std::fs::write(
        &manifest,
        format!(
            r#"{{"cells":[{{"setup":{:?},"state":"psi","prior":1.0,"trials":10,"seed":1}}]}}"#,
            scenario.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = echoloop(&["compare", manifest.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("not well-posed"));
}

#[test]
fn scenario_flag_is_equivalent_to_the_positional() {
    let path = repo_path("scenarios/renninger.json");
    let p = path.to_str().unwrap();
    let positional = echoloop(&["check", p, "--format", "json"]);
    let flagged = echoloop(&["check", "--scenario", p, "--format", "json"]);
    assert_eq!(code(&positional), 0);
    assert_eq!(positional.stdout, flagged.stdout);
}
