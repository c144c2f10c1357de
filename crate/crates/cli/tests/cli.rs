use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn idjc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_idjc")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn purity_run_writes_expected_csv() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("purity.csv");
    let res = idjc(&["run", "--scenario", "purity-mixture", "--tau-steps", "5", "--self-check", "--out", path_str(&out)]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("tau,zeta_numeric,zeta_closed"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert!((first[1] - 0.5).abs() < 1e-10);
    assert_eq!(lines.count(), 4);
}

#[test]
fn config_file_and_flag_override() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("w.json");
    fs::write(
        &cfg,
        format!(
            r#"{{"scenario": "inversion-cat", "alpha": 3, "parity_r": 1, "tau_steps": 50, "output_path": {:?}}}"#,
            path_str(&dir.path().join("ignored.csv"))
        ),
    )
    .unwrap();
    let res = idjc(&[
        "run", "--config", path_str(&cfg), "--tau-steps", "3", "--parity-r", "-1", "--format", "json", "--out", path_str(&out),
    ]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["metadata"]["config"]["alpha"], 3.0);
    assert_eq!(doc["metadata"]["config"]["parity_r"], -1);
    assert_eq!(doc["metadata"]["dim"], doc["metadata"]["config"]["dim"]);
    assert!(doc["metadata"]["tail_mass"].as_f64().unwrap() < 1e-12);
    let w = doc["columns"]["W_numeric"].as_array().unwrap();
    assert_eq!(w.len(), 3);
    assert!((w[0].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn qfunc_writes_one_file_per_time() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("q.csv");
    let res = idjc(&["run", "--scenario", "qfunc-mixture", "--grid", "-8,8,-8,8,21,21", "--out", path_str(&out)]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    for k in 0..3 {
        let text = fs::read_to_string(dir.path().join(format!("q_tau{k}.csv"))).unwrap();
        assert!(text.starts_with("x,y,Q\n"));
        assert_eq!(text.lines().count(), 1 + 21 * 21);
    }
}

#[test]
fn config_errors_exit_2_and_name_the_field() {
    let res = idjc(&["run", "--scenario", "purity-mixture", "--tau-steps", "1", "--out", "x.csv"]);
    assert_eq!(code(&res), 2);
    assert!(stderr(&res).contains("tau_steps"), "{}", stderr(&res));

    let res = idjc(&["run", "--scenario", "qfunc-mixture", "--out", "x.csv"]);
    assert_eq!(code(&res), 2);
    assert!(stderr(&res).contains("grid"));

    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("typo.json");
    fs::write(&cfg, r#"{"scenario": "purity-mixture", "alhpa": 5}"#).unwrap();
    let res = idjc(&["run", "--config", path_str(&cfg)]);
    assert_eq!(code(&res), 2);
    assert!(stderr(&res).contains("alhpa"));
}

#[test]
fn truncation_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("p.csv");
    let res = idjc(&["run", "--scenario", "purity-mixture", "--dim", "30", "--tau-steps", "3", "--out", path_str(&out)]);
    assert_eq!(code(&res), 3);
    assert!(stderr(&res).contains("dim = 30"), "{}", stderr(&res));
    assert!(!out.exists());
}

#[test]
fn io_errors_exit_4() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("missing").join("p.csv");
    let res = idjc(&["run", "--scenario", "purity-mixture", "--tau-steps", "3", "--out", path_str(&out)]);
    assert_eq!(code(&res), 4, "{}", stderr(&res));

    let res = idjc(&["run", "--config", path_str(&dir.path().join("nope.json"))]);
    assert_eq!(code(&res), 4);
}

#[test]
fn output_is_identical_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let run = |threads: &str, name: &str| {
        let out = dir.path().join(name);
        let res = idjc(&[
            "run", "--scenario", "cat-transition", "--tau-steps", "64", "--threads", threads, "--out", path_str(&out),
        ]);
        assert_eq!(code(&res), 0, "{}", stderr(&res));
        fs::read(out).unwrap()
    };
    let one = run("1", "a.csv");
    assert_eq!(one, run("4", "b.csv"));
    assert_eq!(one, run("1", "c.csv"));
}
