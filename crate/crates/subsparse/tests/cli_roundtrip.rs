//! End-to-end exercises of the `subsparse` binary: exit codes for bad input,
//! report round-trips, content-hash verification, tampering detection,
//! seed overrides, and run-to-run determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_subsparse")
}

/// A config small enough for debug-mode test runs: two orthogonal planes in
/// 8 dimensions, a handful of query trials, and the two solver-free tail
/// checks at reduced trial counts.
fn write_config(dir: &Path) -> PathBuf {
    let path = dir.join("tiny.toml");
    std::fs::write(
        &path,
        r#"
[dataset]
ambient_dim = 8
subspace_dims = [2, 2]
points_per_subspace = [10, 10]
angle_degrees = 90.0
seed = 42

[noise]
epsilon = 0.004
rho = 0.1

[verify]
checks = ["theorem1", "lemma2", "appendix"]
trials = 6
lemma2_trials = 500
appendix_trials = 500
"#,
    )
    .unwrap();
    path
}

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args);
    cmd.env_remove("SUBSPARSE_BUDGET");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary should spawn")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process should exit normally")
}

fn read_report(dir: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join("report.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn missing_config_file_is_a_configuration_error() {
    let out = run(&["verify", "--config", "/nonexistent/subsparse.toml"], &[]);
    assert_eq!(exit_code(&out), 2, "stderr: {}", stderr_of(&out));
    assert!(stderr_of(&out).contains("error:"));
}

#[test]
fn unknown_config_field_is_named_in_the_error() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("typo.toml");
    std::fs::write(
        &path,
        r#"
[dataset]
ambient_dim = 8
subspace_dims = [2, 2]
points_per_subspace = [10, 10]
seed = 1
ambiant_dim_typo = 3

[noise]
epsilon = 0.004
rho = 0.1

[verify]
checks = ["lemma2"]
"#,
    )
    .unwrap();
    let out = run(&["verify", "--config", path.to_str().unwrap()], &[]);
    assert_eq!(exit_code(&out), 2, "stderr: {}", stderr_of(&out));
    assert!(
        stderr_of(&out).contains("ambiant_dim_typo"),
        "error should name the unknown field, got: {}",
        stderr_of(&out)
    );
}

#[test]
fn unknown_check_name_is_rejected_with_the_available_list() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path());
    let out = run(
        &[
            "verify",
            "--config",
            config.to_str().unwrap(),
            "--check",
            "theorem9",
        ],
        &[],
    );
    assert_eq!(exit_code(&out), 2, "stderr: {}", stderr_of(&out));
    let err = stderr_of(&out);
    assert!(err.contains("theorem9"), "got: {err}");
    assert!(err.contains("available"), "got: {err}");
}

#[test]
fn malformed_budget_env_is_a_configuration_error() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path());
    let out = run(
        &["verify", "--config", config.to_str().unwrap()],
        &[("SUBSPARSE_BUDGET", "abc")],
    );
    assert_eq!(exit_code(&out), 2, "stderr: {}", stderr_of(&out));
    assert!(stderr_of(&out).contains("SUBSPARSE_BUDGET"));
}

#[test]
fn exhausted_budget_stops_before_any_work() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path());
    let out_dir = tmp.path().join("out");
    let out = run(
        &[
            "verify",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ],
        &[("SUBSPARSE_BUDGET", "1")],
    );
    assert_eq!(exit_code(&out), 2, "stderr: {}", stderr_of(&out));
    assert!(stderr_of(&out).contains("budget exceeded"));
    assert!(
        !out_dir.join("report.json").exists(),
        "a budget refusal must not write a report"
    );
}

#[test]
fn gen_exports_a_dataset_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path());
    let out_dir = tmp.path().join("out");
    let out = run(
        &[
            "gen",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));
    let dataset = out_dir.join("dataset");
    for name in ["meta.toml", "clean.ssmx", "noise.ssmx", "observed.ssmx"] {
        assert!(dataset.join(name).exists(), "missing {name}");
    }
}

#[test]
fn verify_report_roundtrip_determinism_and_tamper_detection() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path());
    let dir_a = tmp.path().join("a");
    let dir_b = tmp.path().join("b");
    let dir_c = tmp.path().join("c");

    // Two runs of the same config and seed.
    for dir in [&dir_a, &dir_b] {
        let out = run(
            &[
                "verify",
                "--config",
                config.to_str().unwrap(),
                "--out",
                dir.to_str().unwrap(),
            ],
            &[],
        );
        assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));
        assert!(dir.join("report.json").exists());
        assert!(dir.join("trials.jsonl").exists());
    }
    let report_a = read_report(&dir_a);
    let report_b = read_report(&dir_b);
    let hash_a = report_a["header"]["content_hash"].as_str().unwrap();
    let hash_b = report_b["header"]["content_hash"].as_str().unwrap();
    assert!(hash_a.starts_with("sha256:"));
    assert_eq!(hash_a, hash_b, "same config and seed must reproduce the body");
    assert_eq!(report_a["body"]["effective_seed"], 42);
    assert_eq!(report_a["body"]["all_pass"], true);
    // theorem1 contributes two summaries, appendix two, lemma2 one.
    let names: Vec<&str> = report_a["body"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "theorem1_residual",
            "theorem1_off_support",
            "lemma2",
            "appendix_chi2",
            "appendix_lemma7"
        ],
        "unexpected check summaries"
    );

    // Trial records parse line by line and name their producing check.
    let trials_text = std::fs::read_to_string(dir_a.join("trials.jsonl")).unwrap();
    let mut trial_lines = 0;
    for line in trials_text.lines() {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(record["check"].is_string(), "trial line missing check name");
        trial_lines += 1;
    }
    assert!(trial_lines > 0, "trials.jsonl should not be empty");

    // A seed override changes the effective seed and the content hash.
    let out = run(
        &[
            "verify",
            "--config",
            config.to_str().unwrap(),
            "--seed",
            "123",
            "--out",
            dir_c.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));
    let report_c = read_report(&dir_c);
    assert_eq!(report_c["body"]["effective_seed"], 123);
    assert_eq!(report_c["body"]["config"]["dataset"]["seed"], 123);
    let hash_c = report_c["header"]["content_hash"].as_str().unwrap();
    assert_ne!(hash_a, hash_c, "a different seed must change the body hash");

    // The report subcommand re-verifies the stored hash from disk.
    let out = run(&["report", "--out", dir_b.to_str().unwrap()], &[]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));
    assert!(stdout_of(&out).contains("hash verified"));

    // Tampering with one body value is caught.
    let path = dir_a.join("report.json");
    let original = std::fs::read_to_string(&path).unwrap();
    let tampered = original.replace("\"effective_seed\": 42", "\"effective_seed\": 41");
    assert_ne!(original, tampered, "tamper target not found in report");
    std::fs::write(&path, tampered).unwrap();
    let out = run(&["report", "--out", dir_a.to_str().unwrap()], &[]);
    assert_eq!(exit_code(&out), 1, "stderr: {}", stderr_of(&out));
    assert!(
        stderr_of(&out).contains("content hash mismatch"),
        "got: {}",
        stderr_of(&out)
    );
}
