//! End-to-end checks of the binary: JSON certificates, exit codes, and the
//! recheck round-trip.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_selftile"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("valid JSON certificate")
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("selftile-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn classify4_positive_certificate() {
    let out = run(&["classify4", "--digits", "0,1,8,9"]);
    assert!(out.status.success());
    let cert = json_of(&out);
    assert_eq!(cert["verdicts"]["is_tile"], true);
    assert_eq!(cert["verdicts"]["is_spectral"], true);
    assert_eq!(cert["verdicts"]["k"], 1);
    assert_eq!(cert["spectrum"], serde_json::json!(["0", "1/4"]));
    assert_eq!(cert["measure"], "2");
    let checks = cert["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["pass"] == true));
    assert!(checks.iter().any(|c| c["name"] == "orthogonality"));
    assert!(checks.iter().any(|c| c["name"] == "completeness"));
}

#[test]
fn classify4_negative_verdict_exits_zero() {
    let out = run(&["classify4", "--digits", "0,1,4,5"]);
    assert!(out.status.success(), "negative verdicts still classify");
    let cert = json_of(&out);
    assert_eq!(cert["verdicts"]["is_tile"], false);
    assert!(cert["verdicts"]["reason"]
        .as_str()
        .unwrap()
        .contains("even"));
}

#[test]
fn classify4_normalizes_and_reports_shift_scale() {
    let out = run(&["classify4", "--digits", "3,5,19,21"]);
    assert!(out.status.success());
    let cert = json_of(&out);
    assert_eq!(cert["input"]["normalized"], "0,1,8,9");
    assert_eq!(cert["input"]["shift"], "3");
    assert_eq!(cert["input"]["scale"], "2");
    assert_eq!(cert["verdicts"]["is_tile"], true);
}

#[test]
fn inttile_verify_base72_vectors() {
    let out = run(&[
        "inttile",
        "verify",
        "--a",
        "0,8,16,18,26,34",
        "--b",
        "0,5,6,9,12,29,33,36,42,48,53,57",
        "--n",
        "72",
    ]);
    assert!(out.status.success());
    let cert = json_of(&out);
    assert_eq!(cert["verdicts"]["tiles"], true);
}

#[test]
fn failed_verification_exits_one() {
    let out = run(&["inttile", "verify", "--a", "0,1", "--b", "0,1", "--n", "4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_error_exits_two() {
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn recheck_reproduces_certificates() {
    for (name, args) in [
        (
            "classify",
            vec!["classify4", "--digits", "0,1,8,9"],
        ),
        (
            "spectrum",
            vec![
                "spectrum",
                "--base",
                "4",
                "--factors",
                "0,1;0,2",
                "--exponents",
                "2",
            ],
        ),
        (
            "modform",
            vec![
                "modulo-form",
                "--base",
                "4",
                "--factors",
                "0,1;0,2",
                "--exponents",
                "1",
                "--targets",
                "0,1;0,1,24,25",
            ],
        ),
        (
            "factor",
            vec!["factor", "--digits", "0,8,16,18,26,34"],
        ),
    ] {
        let path = tmp(name);
        let path_str = path.to_str().unwrap();
        let mut full = args.clone();
        full.extend_from_slice(&["--out", path_str]);
        let out = run(&full);
        assert!(
            out.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let re = run(&["recheck", path_str]);
        assert!(
            re.status.success(),
            "recheck {name}: {}",
            String::from_utf8_lossy(&re.stderr)
        );
        std::fs::remove_file(&path).ok();
    }
}

#[test]
fn deterministic_output() {
    let a = run(&["classify4", "--digits", "0,1,32,33"]);
    let b = run(&["classify4", "--digits", "0,1,32,33"]);
    assert_eq!(a.stdout, b.stdout);
    let cert = json_of(&a);
    assert_eq!(
        cert["spectrum"],
        serde_json::json!(["0", "1/16", "1/4", "5/16"])
    );
}

#[test]
fn render_emits_csv_and_svg() {
    let csv = run(&[
        "render", "--digits", "0,2", "--base", "4", "--depth", "1", "--format", "csv",
    ]);
    assert!(csv.status.success());
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("point,decimal"));
    assert!(text.contains("1/2,0.5"));

    let svg = run(&[
        "render",
        "--factors",
        "0,2;0,1,4,5",
        "--base",
        "8",
        "--exponents",
        "1",
        "--format",
        "svg",
    ]);
    assert!(svg.status.success());
    assert!(String::from_utf8(svg.stdout).unwrap().starts_with("<svg"));
}

#[test]
fn inttile_spectrum_certificate() {
    let out = run(&["inttile", "spectrum", "--a", "0,2,8,10"]);
    assert!(out.status.success());
    let cert = json_of(&out);
    assert_eq!(
        cert["spectrum"],
        serde_json::json!(["0", "1/16", "1/4", "5/16"])
    );
    assert_eq!(cert["verdicts"]["verified"], true);
}
