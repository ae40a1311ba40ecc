//! End-to-end runs of the `arithcurv` binary.

use std::path::PathBuf;
use std::process::Command;

fn run(name: &str, config: &str, args: &[&str]) -> (i32, String, String) {
    let dir = std::env::temp_dir().join(format!("arithcurv-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path: PathBuf = dir.join("config.json");
    std::fs::write(&path, config).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_arithcurv"))
        .arg("--config")
        .arg(&path)
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn delta_of_two_at_three() {
    let (code, out, _) = run("delta", r#"{"command": "delta", "a": "2", "p": 3}"#, &[]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["results"][0]["delta_p"], "-2");
}

#[test]
fn rank_one_lift_is_flagged_not_global() {
    let (code, out, _) = run("lift", r#"{"command": "lift", "n": 1, "form": {"q": [[2]]}, "p": 3}"#, &[]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let lift = &v["lifts"][0];
    assert_eq!(lift["padic"]["constant_term"][0][0], "-2");
    assert_eq!(lift["padic"]["global_along_identity"], false);
    assert_eq!(lift["global"]["status"], "not-certified");
}

#[test]
fn sp2_lift_is_certified() {
    let (code, out, _) = run("lift-sp2", r#"{"command": "lift", "form": "sp(2)", "p": 3, "D": 3}"#, &[]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["lifts"][0]["global"]["status"], "certified");
    assert_eq!(v["lifts"][0]["global"]["lift"]["certificate"]["identity_one"], true);
}

#[test]
fn sp2_theorem_check_passes() {
    let cfg = r#"{"command": "verify-theorems", "form": "sp(2)", "primes": [3, 5]}"#;
    let (code, out, _) = run("sp2", cfg, &["--format", "markdown"]);
    assert_eq!(code, 0);
    assert!(out.contains("vanishing (n = 2, antisymmetric): pass"));
}

#[test]
fn rank_four_search_window_is_inconclusive() {
    let cfg = r#"{"command": "verify-theorems", "form": "sp(4)", "primes": [3, 5]}"#;
    let (code, out, _) = run("sp4", cfg, &["--escalate"]);
    assert_eq!(code, 3);
    assert!(out.contains("\"inconclusive\""));
}

#[test]
fn rank_four_nonvanishing_found_in_degree_six() {
    let cfg = r#"{"command": "curvature", "form": "so(4)", "primes": [3, 5], "D": 6}"#;
    let (code, out, _) = run("so4", cfg, &["--format", "markdown"]);
    assert_eq!(code, 0);
    assert!(out.contains("T12^3*T21^2*T34 = 1/4"));
    assert!(out.contains("| entry | monomial | v_p | v_p' |"));
}

#[test]
fn curvature_report_has_divisibility_table() {
    let cfg = r#"{"command": "curvature", "form": "sp(4)", "primes": [3, 5], "D": 4}"#;
    let (code, out, _) = run("sp4-json", cfg, &[]);
    assert_eq!(code, 3);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["reports"][0]["divisibility"].is_array());
}

#[test]
fn reports_are_byte_identical() {
    let cfg = r#"{"command": "curvature", "form": "so(3)", "primes": [3, 5, 7], "D": 6}"#;
    for fmt in ["json", "csv", "markdown"] {
        let a = run("det-a", cfg, &["--format", fmt]);
        let b = run("det-b", cfg, &["--format", fmt, "--jobs", "3"]);
        assert_eq!(a, b);
        assert!(!a.1.is_empty());
    }
}

#[test]
fn input_errors_exit_one() {
    let bad = [
        r#"{"command": "verify-theorems", "primes": []}"#,
        r#"{"command": "lift", "form": "sp(2)", "primes": [9]}"#,
        r#"{"command": "explode"}"#,
        "not json",
    ];
    for (i, cfg) in bad.iter().enumerate() {
        let (code, _, err) = run(&format!("bad{i}"), cfg, &[]);
        assert_eq!(code, 1, "{cfg}");
        assert!(err.starts_with("arithcurv: "));
    }
}

#[test]
fn output_path_is_written() {
    let dir = std::env::temp_dir().join(format!("arithcurv-cli-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let target = dir.join("report.csv");
    let (code, out, _) = run("out", r#"{"command": "classical", "samples": 5}"#, &["--output", target.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(std::fs::read_to_string(&target).unwrap(), "identity,held,samples\nchern,5,5\nlevi_civita,5,5\ncurvature,5,5\n");
}
