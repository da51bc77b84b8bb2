//! End-to-end checks of the binary: exit codes, JSON determinism and
//! structure-constant import.

use std::io::Write;
use std::process::{Command, Output};

fn curvlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvlab"))
        .args(args)
        .env_remove("CURVLAB_SEED")
        .output()
        .expect("binary runs")
}

#[test]
fn identity_suites_exit_zero() {
    for structure in ["g2", "su3"] {
        let out = curvlab(&["identities", "--structure", structure]);
        assert!(out.status.success(), "{structure} suite failed");
    }
}

#[test]
fn usage_errors_exit_one() {
    let out = curvlab(&["identities", "--structure", "so5"]);
    assert_eq!(out.status.code(), Some(1));
    let out = curvlab(&["bounds", "--theorem", "hat-special", "--delta", "3", "--Delta", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = curvlab(&["spectrum", "--space", "no-such-space", "--operator", "rhat"]);
    assert_eq!(out.status.code(), Some(1));
    let out = curvlab(&["identities"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_output_is_byte_deterministic() {
    let args = [
        "spectrum",
        "--space",
        "aw-su3xsu2",
        "--operator",
        "rring",
        "--format",
        "json",
    ];
    let first = curvlab(&args);
    let second = curvlab(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let parsed: serde_json::Value = serde_json::from_slice(&first.stdout).expect("valid JSON");
    assert_eq!(parsed["status"], "ok");
    let reemitted = serde_json::to_value(&parsed).unwrap();
    assert_eq!(parsed, reemitted);
}

#[test]
fn betti_verdicts_are_data_not_failures() {
    let out = curvlab(&["betti", "--space", "aw-su3xsu2", "--mode", "spectral", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["results"]["b2"], "no_conclusion");
    assert_eq!(parsed["results"]["b3"], "no_conclusion");

    let out = curvlab(&["betti", "--space", "s3xs3", "--mode", "spectral", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["results"]["b2"], "zero");
    assert_eq!(parsed["results"]["b3"], "no_conclusion");
}

#[test]
fn pretty_spectrum_uses_multiplicity_subscripts() {
    let out = curvlab(&["spectrum", "--space", "s3xs3", "--operator", "rhat"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("-7 ×3"), "missing cluster line in: {text}");
    assert!(text.contains("-2 ×7"));
    assert!(text.contains("1 ×5"));
}

#[test]
fn csv_spectrum_has_fixed_columns() {
    let out = curvlab(&[
        "spectrum", "--space", "s3xs3", "--operator", "rring", "--subspace", "s2_minus",
        "--format", "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("value,multiplicity,rational"));
    assert_eq!(lines.next(), Some("-4.0,2,-4"));
    assert_eq!(lines.next(), Some("2.0,10,2"));
}

#[test]
fn custom_space_import_round_trips() {
    let space = curvlab_core::homogeneous::s3xs3_space().unwrap();
    let spec = space.model.to_spec();
    let mut file = tempfile::Builder::new()
        .suffix(".json")
        .tempfile()
        .unwrap();
    file.write_all(serde_json::to_string(&spec).unwrap().as_bytes())
        .unwrap();
    let path = file.path().to_str().unwrap();
    let out = curvlab(&["spectrum", "--space", path, "--operator", "rhat", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("-7.0,3"), "unexpected spectrum: {text}");
    assert!(text.contains("-2.0,7"));
    assert!(text.contains("1.0,5"));
}

#[test]
fn verify_all_skips_sampling_when_requested() {
    let out = curvlab(&["verify-all", "--samples", "0", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let criteria = parsed["results"]["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 11);
    assert_eq!(criteria[4]["status"], "skipped");
    for row in criteria {
        assert_ne!(row["status"], "fail", "{row}");
    }
}
