use std::path::Path;
use std::process::{Command, Output};

fn deltabound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deltabound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const CLEAN: &str = r#"{
    "axis1": {"integers": {"lo": 0, "hi": 4}},
    "axis2": {"integers": {"lo": 0, "hi": 4}},
    "functions": {"p": "1", "k": "1"},
    "task": "constant",
    "tolerances": {"relative": 1e-9},
    "seed": 3
}"#;

#[test]
fn verify_clean_scenario_exits_zero_with_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "clean.json", CLEAN);
    let out = deltabound(&["verify", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("x,y,actual,bound,margin"));
    let row = lines
        .find(|l| l.starts_with("2.0000000000000000e0,2.0000000000000000e0,"))
        .unwrap();
    assert_eq!(
        row,
        "2.0000000000000000e0,2.0000000000000000e0,3.0000000000000000e0,3.0000000000000000e0,0.0000000000000000e0"
    );
    assert!(stdout.contains("violations 0"));
}

#[test]
fn verify_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let body = CLEAN
        .replace(
            r#""p": "1", "k": "1""#,
            r#""g": "1", "h": "0.5", "L": "u / (1 + u)", "H": "1 / (1 + v)^2""#,
        )
        .replace("constant", "nonlinear");
    let cfg = write_config(dir.path(), "nl.json", &body);
    let a = deltabound(&["verify", &cfg]);
    let b = deltabound(&["verify", &cfg]);
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stderr)
    );
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "clean.json", CLEAN);
    let csv = dir.path().join("rows.csv");
    let out = deltabound(&["verify", &cfg, "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 26);
    assert!(!String::from_utf8(out.stdout)
        .unwrap()
        .contains("x,y,actual"));
}

#[test]
fn hypothesis_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "neg.json",
        &CLEAN.replace(r#""p": "1""#, r#""p": "-1""#),
    );
    let out = deltabound(&["verify", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("FAIL p >= 0"), "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.contains(',')).count(), 1);
}

#[test]
fn bad_configs_exit_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        &CLEAN.replace(r#""p": "1""#, r#""p": "1 + * x""#),
    );
    let out = deltabound(&["verify", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("at byte 4"), "{stderr}");

    let cfg = write_config(
        dir.path(),
        "missing.json",
        r#"{"axis1": {"integers": {"lo": 0, "hi": 2}}}"#,
    );
    assert_eq!(deltabound(&["verify", &cfg]).status.code(), Some(2));
    assert_eq!(
        deltabound(&["verify", "/nonexistent/config.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn fuzz_is_deterministic_and_clean() {
    let args = [
        "fuzz", "--trials", "8", "--seed", "17", "--family", "integer", "--family", "random",
    ];
    let a = deltabound(&args);
    let b = deltabound(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("fuzz trials 8 seed 17 families integer,random"));
    assert!(text.trim_end().ends_with("violations 0"));
    assert_eq!(
        deltabound(&["fuzz", "--trials", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn converge_prints_table() {
    let out = deltabound(&["converge", "--task", "constant", "--levels", "16,32,64"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n,value,error,order\n16,"));
    assert_eq!(text.lines().filter(|l| l.contains(',')).count(), 4);
    let bad = deltabound(&["converge", "--task", "solve", "--levels", "8,4"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn demo_runs_clean() {
    let out = deltabound(&["demo"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}
