use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_photonic-vqa"))
        .args(args)
        .arg("--output-dir")
        .arg(dir)
        .env_remove("PHOTONIC_VQA_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn results(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("results.json")).unwrap()).unwrap()
}

#[test]
fn factoring_35() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["vqf", "--n", "35", "--exact", "--seed", "7"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(results(tmp.path())["factors"], serde_json::json!([7, 5]));
    for f in ["results.json", "metadata.json", "trace.jsonl", "trajectory.csv"] {
        assert!(tmp.path().join(f).exists(), "{f}");
    }
}

#[test]
fn bayesian_vqe_reaches_table_minimum() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["vqe-h2", "--r", "0.736", "--exact", "--optimizer", "bayes"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let best = results(tmp.path())["best"]["cost"].as_f64().unwrap();
    assert!((best + 1.1373).abs() <= 5e-4, "{best}");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["vqf", "--bogus"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn config_errors_are_all_reported_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("never");
    let out = run(&["vqf", "--n", "34", "--epsilon", "1.2"], &dir);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("N must be an odd semiprime"));
    assert!(err.contains("epsilon"));
    assert!(!dir.exists());

    let out = run(&["vqe-h2", "--r", "0.75"], &dir);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("0.736"));
    assert!(!dir.exists());
}

#[test]
fn sampled_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["vqe-h2", "--r", "0.736", "--counts", "2000", "--seed", "11"];
    assert_eq!(run(&args, a.path()).status.code(), Some(0));
    let mut with_threads = args.to_vec();
    with_threads.extend(["--threads", "1"]);
    assert_eq!(run(&with_threads, b.path()).status.code(), Some(0));
    for f in ["results.json", "trace.jsonl", "trajectory.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let trace = std::fs::read_to_string(a.path().join("trace.jsonl")).unwrap();
    let first: Value = serde_json::from_str(trace.lines().next().unwrap()).unwrap();
    assert_eq!(first["counts"][0]["seed_path"], "11/0/0");
    assert_eq!(first["counts"][0]["cc"].as_array().unwrap().len(), 16);
}

#[test]
fn toml_config_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "experiment = \"certify-dim\"\nd = 3\nsources = \"1-3-4\"\nepsilon = 0.5\n").unwrap();
    let out_dir = tmp.path().join("out");
    let out = run(&["--config", cfg.to_str().unwrap(), "certify-dim", "--epsilon", "1.0"], &out_dir);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = results(&out_dir);
    assert_eq!(r["config"]["epsilon"], 1.0);
    let d = r["results"][0]["certified_dimension"].as_f64().unwrap();
    assert!((d - 3.0).abs() < 1e-9);

    let out = run(&["--config", cfg.to_str().unwrap(), "vqf"], &out_dir);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn other_experiments_write_csv() {
    for (args, csv) in [
        (vec!["scan-h2", "--r", "0.736"], "scan.csv"),
        (vec!["dissociation", "--r-values", "0.5,0.736,1.5"], "dissociation.csv"),
        (vec!["interference", "--pair", "1-3"], "fringes.csv"),
        (vec!["fidelity", "--source", "2", "--counts", "4000", "--car", "100"], "fidelity.csv"),
    ] {
        let tmp = tempfile::tempdir().unwrap();
        let out = run(&args, tmp.path());
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(tmp.path().join(csv).exists(), "{csv}");
    }
}

#[test]
fn dump_tables_writes_data_files() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(&["--dump-tables"], tmp.path()).status.code(), Some(0));
    for f in ["phase_tables.json", "h2_sto3g.json", "vqf_2x2.json"] {
        let text = std::fs::read_to_string(tmp.path().join("tables").join(f)).unwrap();
        let _: Value = serde_json::from_str(&text).unwrap();
    }
}
