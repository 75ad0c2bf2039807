//! CLI contract tests: subcommands, exit codes, artifact emission, and the
//! data-directory environment override.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_retail-ml-bench"))
}

fn run_ok(output: &Output) {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn datagen_writes_the_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["datagen", "--sf", "0.01", "--seed", "7", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    run_ok(&output);
    for file in [
        "customers.csv",
        "products.csv",
        "sales.csv",
        "reviews.csv",
        "weblog.jsonl",
        "gen_manifest.json",
    ] {
        assert!(dir.path().join(file).exists(), "{file} missing");
    }
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("10 customers"));
}

#[test]
fn datagen_rejects_invalid_config() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["datagen", "--sf", "0", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("sf must be > 0"));
}

#[test]
fn run_happy_path_emits_csv_on_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args([
            "run",
            "--workload",
            "m1",
            "--algorithm",
            "fp_growth",
            "--sf",
            "0.01",
            "--reps",
            "3",
            "--regenerate",
            "--data-dir",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    run_ok(&output);
    let stdout = String::from_utf8(output.stdout).unwrap();
    let header = stdout.lines().next().unwrap();
    assert!(header.starts_with("workload,algorithm,sf,rep,seconds"));
    assert!(stdout.lines().skip(1).all(|l| l.is_empty() || l.starts_with("m1,fp_growth")));
}

#[test]
fn invalid_workload_algorithm_pair_is_usage_error() {
    let output = bin()
        .args(["run", "--workload", "m2", "--algorithm", "kmeans"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("--algorithm"), "stderr: {stderr}");
}

#[test]
fn unknown_flag_is_usage_error() {
    let output = bin().args(["run", "--frobnicate"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn failed_cell_exits_one_but_still_reports() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args([
            "run",
            "--workload",
            "q26",
            "--sf",
            "0.01",
            "--reps",
            "1",
            "--regenerate",
            "--param",
            "k=999999",
            "--data-dir",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("error,"), "failure rows still rendered");
}

#[test]
fn report_renders_markdown_grid(){
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("results.csv");
    let output = bin()
        .args([
            "run",
            "--workload",
            "m1",
            "--sf",
            "0.01",
            "--reps",
            "2",
            "--regenerate",
        ])
        .args(["--data-dir".as_ref(), dir.path().as_os_str()])
        .args(["--out".as_ref(), csv_path.as_os_str()])
        .output()
        .unwrap();
    run_ok(&output);

    let output = bin()
        .args(["report", "--format", "markdown"])
        .args(["--in".as_ref(), csv_path.as_os_str()])
        .output()
        .unwrap();
    run_ok(&output);
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.starts_with("| workload | algorithm | sf=0.01 |"));
    assert!(stdout.contains("| m1 | fp_growth |"));
    assert!(stdout.contains("| m1 | eclat |"));
    assert!(stdout.contains("| m1 | pairs_baseline |"));
}

#[test]
fn emit_artifacts_writes_cell_documents() {
    let dir = tempfile::tempdir().unwrap();
    let artifacts = dir.path().join("artifacts");
    let output = bin()
        .args([
            "run",
            "--workload",
            "m2",
            "--sf",
            "0.01",
            "--reps",
            "1",
            "--regenerate",
            "--param",
            "iterations=20",
        ])
        .args(["--data-dir".as_ref(), dir.path().join("data").as_os_str()])
        .args(["--emit-artifacts".as_ref(), artifacts.as_os_str()])
        .output()
        .unwrap();
    run_ok(&output);
    let doc = std::fs::read_to_string(artifacts.join("m2_lda_sf0.01.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&doc).unwrap();
    assert_eq!(parsed["workload"], "m2");
    assert_eq!(parsed["algorithm"], "lda");
    assert_eq!(parsed["artifact"]["kind"], "topics");
    assert_eq!(parsed["artifact"]["top_terms"].as_array().unwrap().len(), 3);
}

#[test]
fn data_dir_env_var_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let env_dir = dir.path().join("from-env");
    let flag_dir = dir.path().join("from-flag");
    let output = bin()
        .args([
            "run",
            "--workload",
            "m1",
            "--algorithm",
            "eclat",
            "--sf",
            "0.01",
            "--reps",
            "1",
            "--regenerate",
        ])
        .args(["--data-dir".as_ref(), flag_dir.as_os_str()])
        .env("RETAIL_ML_BENCH_DATA", &env_dir)
        .output()
        .unwrap();
    run_ok(&output);
    assert!(env_dir.join("sf_0.01").exists());
    assert!(!flag_dir.exists());
}

#[test]
fn help_documents_defaults() {
    let output = bin().args(["run", "--help"]).output().unwrap();
    run_ok(&output);
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("default: 3"), "reps default documented");
    assert!(stdout.contains("default: 42"), "seed default documented");
}
