use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn hmhd(args: &[&str]) -> (i32, Value) {
    hmhd_env(args, &[])
}

fn hmhd_env(args: &[&str], env: &[(&str, &str)]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_hmhd"))
        .args(args)
        .envs(env.iter().copied())
        .output()
        .expect("spawn hmhd");
    let doc = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    });
    (out.status.code().expect("exit code"), doc)
}

fn write_config(dir: &Path, amplitude: f64) -> String {
    let path = dir.join("run.toml");
    let text = format!(
        r#"output_dir = "{}"
[grid]
n = 16
M = 1.0
[physics]
mu = 1.0
nu = 1.0
kappa = 1.0
[integrator]
dt = 0.01
scheme = "IF-RK3"
t_end = 0.2
[data]
amplitude = {amplitude}
spectrum_slope = 0.0
band = [0.0, 2.0]
seed = 5
[diagnostics]
sample_dt = 0.01
norms = [{{ kind = "l2" }}, {{ kind = "h", s = 1.5 }}]
besov = [{{ s = -1.5, p = 2, r = "inf" }}]
"#,
        dir.join("out").display()
    );
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn verify_lp_on_default_grid() {
    let (code, doc) = hmhd(&["verify", "lp"]);
    assert_eq!(code, 0, "{doc}");
    assert_eq!(doc["command"], "verify lp");
    assert_eq!(doc["report"]["n"], 64);
    assert!(doc["report"]["reconstruction_residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn oracle_decay_slope() {
    let (code, doc) = hmhd(&["oracle", "decay", "--s", "0", "--gamma", "1.5"]);
    assert_eq!(code, 0, "{doc}");
    let slope = doc["report"]["slope"].as_f64().unwrap();
    assert!((slope + 0.75).abs() <= 0.02, "{slope}");
}

#[test]
fn zero_amplitude_run_then_fit_refused() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), 0.0);
    let (code, doc) = hmhd(&["run", "--config", &cfg]);
    assert_eq!(code, 0, "{doc}");
    let text = std::fs::read_to_string(tmp.path().join("out/diagnostics.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 21);
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["E"], 0.0);
        for group in ["Hs_norms", "besov_neg"] {
            assert!(
                v[group].as_object().unwrap().values().all(|x| *x == 0.0),
                "{line}"
            );
        }
    }
    // a fit of an all-zero series is an error, not a tolerance failure
    let series = tmp.path().join("out/diagnostics.jsonl");
    let (code, doc) = hmhd(&[
        "fit-decay",
        "--series",
        series.to_str().unwrap(),
        "--window",
        "0.05,0.2",
    ]);
    assert_eq!(code, 2, "{doc}");
    assert_eq!(doc["ok"], false);
    assert!(doc["error"]["message"].is_string());
}

#[test]
fn run_is_reproducible_and_resumable() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), 0.3);
    let (code, doc) = hmhd(&["run", "--config", &cfg]);
    assert_eq!(code, 0, "{doc}");
    let first = std::fs::read(tmp.path().join("out/diagnostics.jsonl")).unwrap();
    let (code, _) = hmhd_env(&["run", "--config", &cfg], &[("HMHD_THREADS", "1")]);
    assert_eq!(code, 0);
    assert_eq!(
        first,
        std::fs::read(tmp.path().join("out/diagnostics.jsonl")).unwrap()
    );
}

#[test]
fn errors_are_machine_readable() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "output_dir = \"x\"\nextra = 1\n").unwrap();
    let (code, doc) = hmhd(&["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(doc["command"], "run");
    assert!(doc["error"]["message"].as_str().unwrap().contains("bad.toml"));

    let (code, doc) = hmhd_env(
        &["oracle", "decay", "--s", "0", "--gamma", "1.5"],
        &[("HMHD_THREADS", "many")],
    );
    assert_eq!(code, 2);
    assert!(doc["error"]["message"].as_str().unwrap().contains("HMHD_THREADS"));
}

#[test]
fn tolerance_failure_exits_one() {
    // a window far from the asymptotic regime misses the slope by more than 0.02
    let (code, doc) = hmhd(&[
        "oracle", "decay", "--s", "0", "--gamma", "1.5", "--t-lo", "1", "--t-hi", "4",
    ]);
    assert_eq!(code, 1, "{doc}");
    assert_eq!(doc["ok"], false);
    assert!(doc["report"]["slope"].is_number());
}
