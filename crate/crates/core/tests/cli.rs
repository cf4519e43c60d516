use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn dii(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dii"))
        .args(args)
        .env_remove("DII_LOG")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generate(dir: &Path, benchmark: &str, n: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(format!("gen-{benchmark}-{n}"));
    let mut args = vec!["generate", "--benchmark", benchmark, "--n", n, "--out", s(&out)];
    args.extend_from_slice(extra);
    let res = dii(&args);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    out.join("data.csv")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn identical_runs_give_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate(tmp.path(), "gaussian", "120", &[]);
    let run = |name: &str, cmd: &str, jobs: &str| {
        let out = tmp.path().join(name);
        let res = dii(&[cmd, "--data", s(&data), "--epochs", "6", "--l1", "1e-3", "--seed", "5",
            "--rows", "frac:0.5", "--jobs", jobs, "--out", s(&out)]);
        assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
        out
    };
    for cmd in ["optimize", "lasso"] {
        let a = run(&format!("{cmd}-a"), cmd, "1");
        let b = run(&format!("{cmd}-b"), cmd, "2");
        for file in ["weights.csv", "path.csv"] {
            if a.join(file).exists() {
                assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{cmd} {file}");
            }
        }
    }
}

#[test]
fn missing_input_is_a_usage_error_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("never");
    let res = dii(&["optimize", "--data", s(&tmp.path().join("nope.csv")), "--out", s(&out)]);
    assert_eq!(code(&res), 2);
    assert!(!out.exists());
}

#[test]
fn bad_flags_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate(tmp.path(), "gaussian", "50", &[]);
    for extra in [
        &["--epochs", "0"][..],
        &["--schedule", "linear"],
        &["--rows", "frac:1.5"],
        &["--lambda", "-1"],
        &["--l1", "-0.1"],
        &["--bogus"],
    ] {
        let mut args = vec!["optimize", "--data", s(&data)];
        args.extend_from_slice(extra);
        assert_eq!(code(&dii(&args)), 2, "{extra:?}");
    }
    assert_eq!(code(&dii(&["--help"])), 0);
}

#[test]
fn exhaustive_refuses_eleven_features() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate(tmp.path(), "gaussian", "40", &["--gt-weights", "1,1,1,1,1,1,1,1,1,1,1"]);
    let out = tmp.path().join("ex");
    let res = dii(&["exhaustive", "--data", s(&data), "--out", s(&out)]);
    assert_eq!(code(&res), 2);
    assert!(!out.exists());
}

#[test]
fn exhaustive_small_input_covers_every_subset() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate(tmp.path(), "gaussian", "40", &["--gt-weights", "2,1,0.5"]);
    let out = tmp.path().join("ex");
    let res = dii(&["exhaustive", "--data", s(&data), "--epochs", "3", "--eta0", "1", "--out", s(&out)]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let rows = fs::read_to_string(out.join("path.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 7);
}

#[test]
fn over_regularization_exits_three_and_keeps_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate(tmp.path(), "gaussian", "60", &[]);
    let out = tmp.path().join("o");
    let res = dii(&["optimize", "--data", s(&data), "--l1", "1e6", "--eta0", "1", "--out", s(&out)]);
    assert_eq!(code(&res), 3);
    let m = manifest(&out);
    assert!(m["status"].as_str().unwrap().starts_with("failed"));
    assert!(!out.join("weights.csv").exists());
}

#[test]
fn gradcheck_passes_and_catches_a_broken_gradient() {
    let ok = dii(&["gradcheck", "--instances", "4", "--points", "40", "--features", "5"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));
    let broken = dii(&["gradcheck", "--instances", "4", "--points", "40", "--features", "5", "--mutate", "sign-flip"]);
    assert_eq!(code(&broken), 1);
    assert_eq!(code(&dii(&["gradcheck", "--features", "21"])), 2);
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate(tmp.path(), "gaussian", "60", &[]);
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"epochs": 7, "seed": 3, "eta0": "2"}"#).unwrap();
    let out = tmp.path().join("o");
    let res = dii(&["optimize", "--config", s(&cfg), "--data", s(&data), "--seed", "9", "--out", s(&out)]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let m = manifest(&out);
    assert_eq!(m["status"], "ok");
    assert_eq!(m["config"]["optimizer"]["n_epochs"], 7);
    assert_eq!(m["seed"], 9);
    let trace = fs::read_to_string(out.join("trace.jsonl")).unwrap();
    assert_eq!(trace.lines().count(), 8);

    fs::write(&cfg, r#"{"epochz": 7}"#).unwrap();
    assert_eq!(code(&dii(&["optimize", "--config", s(&cfg), "--data", s(&data)])), 2);
}

#[test]
fn manifest_lists_inputs_and_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let mono = generate(tmp.path(), "monomial", "50", &[]);
    let header = fs::read_to_string(&mono).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header.split(',').filter(|c| !c.starts_with("gt_")).count(), 285);
    let too_small = dii(&["generate", "--benchmark", "monomial", "--base-features", "3", "--out", s(&tmp.path().join("x"))]);
    assert_eq!(code(&too_small), 2);

    let data = generate(tmp.path(), "gaussian", "80", &["--gt-weights", "2,1,1,0"]);
    let out = tmp.path().join("o");
    let res = dii(&["greedy", "--data", s(&data), "--epochs", "3", "--eta0", "1", "--out", s(&out)]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let m = manifest(&out);
    assert_eq!(m["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    for f in m["outputs"].as_array().unwrap() {
        assert!(out.join(f.as_str().unwrap()).exists(), "{f}");
    }
    let stdout = String::from_utf8(res.stdout).unwrap();
    assert!(stdout.contains("n_nonzero"), "{stdout}");
}

#[test]
fn eval_reports_dii_of_given_weights() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate(tmp.path(), "gaussian", "80", &["--gt-weights", "3,1,0"]);
    let res = dii(&["eval", "--data", s(&data), "--weights", "3,1,0"]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let v: Value = serde_json::from_slice(&res.stdout).unwrap();
    let exact = v["dii"].as_f64().unwrap();
    assert!(exact < 0.05, "{v}");
    let res = dii(&["eval", "--data", s(&data), "--weights", "0,0,1"]);
    let v: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert!(v["dii"].as_f64().unwrap() > 0.5, "{v}");
}
