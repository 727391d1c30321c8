//! End-to-end tests of the `gbt` binary: exit codes, report files,
//! determinism under a fixed seed, and diagnostics for malformed input.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn gbt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gbt"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    gbt().args(args).output().expect("binary runs")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn json_at(path: &Path) -> Value {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("reading {}: {e}", path.display()));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("parsing {}: {e}", path.display()))
}

#[test]
fn help_lists_every_subcommand() {
    let output = run(&["--help"]);
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    for subcommand in ["fit", "check-embedding", "monotonicity-audit", "experiment", "hunt-violation"]
    {
        assert!(text.contains(subcommand), "--help should mention {subcommand}");
    }
}

#[test]
fn fit_writes_antisymmetric_scores_for_a_single_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fit.json");
    let output = run(&[
        "fit",
        "--dataset",
        fixture("demo_pair.csv").to_str().unwrap(),
        "--config",
        fixture("demo_pair_config.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));

    let report = json_at(&out);
    let thetas: Vec<f64> = report["theta_star"]
        .as_array()
        .expect("theta_star array")
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(thetas.len(), 2);
    // One comparison between two identical alternatives: the winner's gain
    // mirrors the loser's loss exactly.
    assert!((thetas[0] + thetas[1]).abs() < 1e-9, "scores should be antisymmetric: {thetas:?}");
    assert!((thetas[0] - 0.620388).abs() < 1e-4, "unexpected winner score {}", thetas[0]);
    assert!(report["grad_norm"].as_f64().unwrap() < 1e-6);
}

#[test]
fn fit_root_law_override_changes_the_scores() {
    let dir = tempfile::tempdir().unwrap();
    let uniform_out = dir.path().join("uniform.json");
    let gaussian_out = dir.path().join("gaussian.json");
    for (law, out) in [("uniform", &uniform_out), ("gaussian", &gaussian_out)] {
        let output = run(&[
            "fit",
            "--dataset",
            fixture("demo_pair.csv").to_str().unwrap(),
            "--config",
            fixture("demo_pair_config.json").to_str().unwrap(),
            "--root-law",
            law,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    }
    let uniform = json_at(&uniform_out)["theta_star"][0].as_f64().unwrap();
    let gaussian = json_at(&gaussian_out)["theta_star"][0].as_f64().unwrap();
    assert!(
        (uniform - gaussian).abs() > 1e-3,
        "different laws should fit different scores ({uniform} vs {gaussian})"
    );
}

#[test]
fn check_embedding_diffusion_passes_shifted_one_hot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let output = run(&[
        "check-embedding",
        "--embedding",
        fixture("one_hot_shift_a5.csv").to_str().unwrap(),
        "--mode",
        "diffusion",
        "--expect-pass",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    let report = json_at(&out);
    assert_eq!(report["predicate"], "diffusion");
    assert_eq!(report["result"], Value::Bool(true));
}

#[test]
fn check_embedding_goodness_flags_the_bad_concatenation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let embedding = fixture("concat_not_good_a3.csv");
    let args = [
        "check-embedding",
        "--embedding",
        embedding.to_str().unwrap(),
        "--mode",
        "good",
        "--out",
        out.to_str().unwrap(),
    ];

    // Reporting alone succeeds; the verdict lives in the JSON.
    let output = run(&args);
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    let report = json_at(&out);
    assert_eq!(report["result"], Value::Bool(false));
    assert_eq!(report["goodness"]["verdict"], "not_good");
    assert!(report["goodness"]["witness"].is_object(), "refutation should carry a witness");

    // Under --expect-pass the same check is an audit failure.
    let strict = gbt().args(args).arg("--expect-pass").output().expect("binary runs");
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn check_embedding_is_deterministic_under_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for name in ["first.json", "second.json"] {
        let out = dir.path().join(name);
        let output = run(&[
            "check-embedding",
            "--embedding",
            fixture("identity_2.csv").to_str().unwrap(),
            "--mode",
            "good",
            "--trials",
            "50",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(output.status.success(), "stderr: {}", stderr_of(&output));
        reports.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(reports[0], reports[1], "same seed must produce byte-identical reports");
}

#[test]
fn audit_passes_a_certified_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("audit.json");
    let output = run(&[
        "monotonicity-audit",
        "--config",
        fixture("demo_pair_config.json").to_str().unwrap(),
        "--dataset",
        fixture("demo_pair.csv").to_str().unwrap(),
        "--trials",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    let report = json_at(&out);
    assert_eq!(report["pass"], Value::Bool(true));
    assert_eq!(report["violations"], 0);
    assert_eq!(report["trials"], 20);
    assert!(
        !out.with_extension("witness.json").exists(),
        "no witness bundle should be written on a clean audit"
    );
}

#[test]
fn audit_reports_the_collinear_violation_with_a_replayable_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("audit.json");
    let output = run(&[
        "monotonicity-audit",
        "--config",
        fixture("collinear_config.json").to_str().unwrap(),
        "--dataset",
        fixture("empty.csv").to_str().unwrap(),
        "--trials",
        "50",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1), "violations must exit 1");
    let report = json_at(&out);
    assert_eq!(report["pass"], Value::Bool(false));
    assert!(report["violations"].as_u64().unwrap() > 0);
    assert!(report["witness"]["drop"].as_f64().unwrap() > 0.0);

    let witness_path = out.with_extension("witness.json");
    assert!(witness_path.exists(), "sibling witness bundle should exist");
    let bundle = json_at(&witness_path);
    assert_eq!(bundle["d"], report["witness"]["d"]);
}

#[test]
fn hunt_finds_collinear_violations_and_clears_identity() {
    let dir = tempfile::tempdir().unwrap();

    let found = dir.path().join("witness.json");
    let output = run(&[
        "hunt-violation",
        "--family",
        "collinear",
        "--budget",
        "50",
        "--out",
        found.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1), "a found violation exits 1");
    let bundle = json_at(&found);
    assert!(bundle["drop"].as_f64().unwrap() > 0.0);
    assert!(bundle["ops"].as_array().unwrap().len() >= 1);

    let clean = dir.path().join("none.json");
    let output = run(&[
        "hunt-violation",
        "--family",
        "identity",
        "--budget",
        "20",
        "--out",
        clean.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "identity family should survive the hunt");
    assert!(!clean.exists(), "no bundle should be written when nothing is found");
}

#[test]
fn experiment_writes_results_meta_and_figure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("heatmap");
    let output = run(&[
        "experiment",
        "goodness-heatmap",
        "--a-min",
        "2",
        "--a-max",
        "3",
        "--d-min",
        "1",
        "--d-max",
        "2",
        "--embeddings",
        "5",
        "--trials",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    for file in ["results.csv", "meta.json", "figure.svg"] {
        assert!(out.join(file).exists(), "{file} missing from experiment directory");
    }
    let results = std::fs::read_to_string(out.join("results.csv")).unwrap();
    let mut lines = results.lines();
    assert_eq!(lines.next(), Some("a,d,series,estimate,stderr,n_seeds,discarded"));
    // 2 modes x 2 alternative counts x 2 dimensions.
    assert_eq!(lines.count(), 8);
    let meta = json_at(&out.join("meta.json"));
    assert_eq!(meta["experiment"], "goodness-heatmap");
}

#[test]
fn malformed_csv_is_a_usage_error_with_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "a,b,r\n1,xyz,0.5\n").unwrap();
    let out = dir.path().join("fit.json");
    let output = run(&[
        "fit",
        "--dataset",
        bad.to_str().unwrap(),
        "--config",
        fixture("demo_pair_config.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2), "parse failures are usage errors");
    let stderr = stderr_of(&output);
    assert!(stderr.contains("line 2"), "diagnostic should name the line: {stderr}");
    assert!(stderr.contains("xyz"), "diagnostic should quote the offending field: {stderr}");
    assert!(!out.exists(), "no output should be written on failure");
}

#[test]
fn missing_input_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(&[
        "fit",
        "--dataset",
        dir.path().join("nope.csv").to_str().unwrap(),
        "--config",
        fixture("demo_pair_config.json").to_str().unwrap(),
        "--out",
        dir.path().join("fit.json").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).contains("nope.csv"));
}

#[test]
fn inputs_are_never_modified() {
    let dataset = fixture("demo_pair.csv");
    let config = fixture("demo_pair_config.json");
    let before = (std::fs::read(&dataset).unwrap(), std::fs::read(&config).unwrap());

    let dir = tempfile::tempdir().unwrap();
    let output = run(&[
        "fit",
        "--dataset",
        dataset.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("fit.json").to_str().unwrap(),
    ]);
    assert!(output.status.success());

    let after = (std::fs::read(&dataset).unwrap(), std::fs::read(&config).unwrap());
    assert_eq!(before, after, "fit must not rewrite its inputs");
}
