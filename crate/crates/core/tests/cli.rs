use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use nls_rotation::spectral::io;

fn nlsrot(root: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlsrot")).args(args).env("NLSROT_OUTPUT_ROOT", root).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn without_runtime(mut v: Value) -> Value {
    if let Some(reports) = v.get_mut("reports").and_then(Value::as_array_mut) {
        for r in reports {
            r.as_object_mut().unwrap().remove("runtime");
        }
    }
    v
}

#[test]
fn eigenstate_writes_field_and_sidecar() {
    let root = tempfile::tempdir().unwrap();
    let out = nlsrot(root.path(), &["eigenstate", "--nu", "2.5", "--output", "eig/phi.field"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, phi) = io::load_field(root.path().join("eig/phi.field")).unwrap();
    assert_eq!((header.d, header.points), (1, 1024));
    let side: Value =
        serde_json::from_str(&std::fs::read_to_string(root.path().join("eig/phi.json")).unwrap()).unwrap();
    for key in ["nu", "mu", "delta", "residual", "iterations", "l2", "grad_l2"] {
        assert!(side.get(key).is_some(), "missing {key}");
    }
    assert_eq!(side["nu"], 2.5);
    assert!(side["mu"].as_f64().unwrap() < 0.0);
    assert!((side["l2"].as_f64().unwrap() - phi.l2()).abs() < 1e-12);
}

#[test]
fn empty_experiment_succeeds_with_no_reports() {
    let root = tempfile::tempdir().unwrap();
    let cfg = root.path().join("empty.json");
    std::fs::write(&cfg, r#"{"name": "empty", "theta_over_pi": [], "js": []}"#).unwrap();
    let out = nlsrot(root.path(), &["rotate-check", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["reports"].as_array().unwrap().len(), 0);
    assert!(root.path().join("empty/reports.json").exists());
}

#[test]
fn rotate_check_is_deterministic_and_matches_its_fields() {
    let root = tempfile::tempdir().unwrap();
    let args = ["rotate-check", "--name", "run", "--theta-over-pi", "0.5", "--js", "1"];
    let first = nlsrot(root.path(), &args);
    assert!(first.status.success());
    let a = std::fs::read_to_string(root.path().join("run/reports.json")).unwrap();
    let u_plus_a = std::fs::read(root.path().join("run/theta0.5_j1_u_plus.field")).unwrap();
    let second = nlsrot(root.path(), &args);
    assert!(second.status.success());
    let b = std::fs::read_to_string(root.path().join("run/reports.json")).unwrap();
    let u_plus_b = std::fs::read(root.path().join("run/theta0.5_j1_u_plus.field")).unwrap();
    let parse = |s: &str| without_runtime(serde_json::from_str(s).unwrap());
    assert_eq!(parse(&a), parse(&b));
    assert_eq!(u_plus_a, u_plus_b);

    let report = &parse(&a)["reports"][0];
    let (_, u_minus) = io::load_field(root.path().join("run/theta0.5_j1_u_minus.field")).unwrap();
    let (_, u_plus) = io::load_field(root.path().join("run/theta0.5_j1_u_plus.field")).unwrap();
    let theta = report["theta"].as_f64().unwrap();
    let offline = u_plus.relative_distance(&u_minus.rotate(theta)).unwrap();
    assert!((offline - report["defect"].as_f64().unwrap()).abs() < 1e-12);
    assert!(report["passed"].as_bool().unwrap());
}

#[test]
fn threshold_violation_sets_exit_code() {
    let root = tempfile::tempdir().unwrap();
    let out = nlsrot(
        root.path(),
        &[
            "rotate-check",
            "--name",
            "strict",
            "--theta-over-pi",
            "0",
            "--js",
            "1",
            "--defect-threshold",
            "1e-12",
            "--no-fields",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!root.path().join("strict/theta0_j1_u_plus.field").exists());
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let root = tempfile::tempdir().unwrap();
    let cfg = root.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"name": "from-config", "theta_over_pi": [1.0], "js": [2], "write_fields": false}"#)
        .unwrap();
    let out = nlsrot(root.path(), &["rotate-check", "--config", cfg.to_str().unwrap(), "--js", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["name"], "from-config");
    let r = &v["reports"][0];
    assert_eq!(r["j"], 1);
    assert_eq!(r["nu"], 1.5);
    assert!(!root.path().join("from-config/theta1_j1_u_plus.field").exists());
}

#[test]
fn linear_resolution_study_stays_at_round_off() {
    let root = tempfile::tempdir().unwrap();
    let out = nlsrot(root.path(), &["resolution-study", "--name", "res", "--linear", "--levels", "2"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(root.path().join("res/resolution.csv")).unwrap();
    let mut rows = csv::Reader::from_reader(csv.as_bytes());
    let defects: Vec<f64> = rows.records().map(|r| r.unwrap()[5].parse().unwrap()).collect();
    assert_eq!(defects.len(), 2);
    assert!(defects.iter().all(|d| *d < 1e-11));
}

#[test]
fn scatter_and_propagate_round_trip_through_files() {
    let root = tempfile::tempdir().unwrap();
    let out = nlsrot(root.path(), &["scatter", "--amplitude", "0.3", "--output", "s.field"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!(v["results"][0]["l2_defect"].as_f64().unwrap() < 1e-7);
    let input = root.path().join("s.field");
    let out = nlsrot(
        root.path(),
        &[
            "propagate",
            "--input",
            input.to_str().unwrap(),
            "--equation",
            "free",
            "--t0",
            "0",
            "--t1",
            "-0.5",
            "--dt",
            "0.01",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout_json(&out)["mass_drift"].as_f64().unwrap() < 1e-12);
}

#[test]
fn bad_input_is_reported() {
    let root = tempfile::tempdir().unwrap();
    let out = nlsrot(root.path(), &["scatter", "--method", "sideways"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sideways"));
    let out = nlsrot(root.path(), &["eigenstate", "--nu", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    let out = nlsrot(root.path(), &["propagate", "--input", "missing.field"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_do_not_look_like_failed_checks() {
    let root = tempfile::tempdir().unwrap();
    let out = nlsrot(root.path(), &["rotate-check", "--js", "one"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(nlsrot(root.path(), &["--help"]).status.success());
}

#[test]
fn short_flag_spellings_are_accepted() {
    let root = tempfile::tempdir().unwrap();
    let out = nlsrot(root.path(), &["eigenstate", "--d", "1", "--nu", "2.5", "--grid", "10,512", "--out", "e.field"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, _) = io::load_field(root.path().join("e.field")).unwrap();
    assert_eq!((header.half_width, header.points), (10.0, 512));
    let input = root.path().join("e.field");
    let out = nlsrot(
        root.path(),
        &["propagate", "--eq", "harmonic", "--in", input.to_str().unwrap(), "--t1", "0.1", "--out", "p.field"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(root.path().join("p.field").exists());
}
