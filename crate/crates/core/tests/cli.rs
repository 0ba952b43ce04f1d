use std::path::Path;
use std::process::{Command, Output};

use finhilbert::chebrep::{SpectralFunction, WeightClass};
use finhilbert::transform::{fht_hat_spectral, fht_spectral};
use finhilbert::verify::{run, VerifyConfig};

fn finhilbert(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finhilbert"))
        .args(args)
        .current_dir(dir)
        .env_remove("FINHILBERT_CONFIG")
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn transform_of_arcsine_is_zero_and_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.json", r#"{"weight":"inv_sqrt","coeffs":[1]}"#);
    let o = finhilbert(&["transform", "a.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let f = SpectralFunction::new(WeightClass::InvSqrt, vec![1.0]).unwrap();
    let lib = fht_spectral(&f).unwrap();
    assert_eq!(stdout(&o), format!("{}\n", lib.to_json()));
    assert!(lib.spectral().unwrap().coeffs.iter().all(|&c| c == 0.0));
}

#[test]
fn hat_of_constant_is_x_over_sqrt() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "one.json", r#"{"weight":"flat_u","coeffs":[1]}"#);
    let o = finhilbert(&["transform", "--hat", "one.json", "--output", "out.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("out.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["output"]["weight"], "inv_sqrt");
    assert_eq!(v["output"]["coeffs"], serde_json::json!([0.0, 1.0]));
    let g = SpectralFunction::new(WeightClass::Flat, vec![1.0]).unwrap();
    assert_eq!(text, fht_hat_spectral(&g).unwrap().to_json());
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.json", "{not json");
    let o = finhilbert(&["transform", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    assert!(o.stdout.is_empty());
}

#[test]
fn spectral_transform_of_flat_input_is_unsupported() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "one.json", r#"{"weight":"flat_u","coeffs":[1]}"#);
    let o = finhilbert(&["transform", "--method", "spectral", "one.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn quadrature_transform_of_grid_csv() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "g.csv", "node,value\n-0.5,0.25\n0,0\n0.5,0.25\n");
    let o = finhilbert(&["transform", "g.csv", "--points", "uniform:3", "--format", "csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("node,value\n"), "{text}");
    assert_eq!(text.trim_end().lines().count(), 4);
}

#[test]
fn invert_zero_gives_arcsine() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "zero.json", r#"{"weight":"flat_u","coeffs":[0]}"#);
    let o = finhilbert(&["invert", "zero.json", "--c", "1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["c"], 1.0);
    assert_eq!(v["residual_l1"], 0.0);
    assert!(v["particular"]["coeffs"].as_array().unwrap().iter().all(|c| c == 0.0));
}

#[test]
fn llogl_of_constant_is_four() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "one.json", r#"{"weight":"flat_u","coeffs":[1]}"#);
    let o = finhilbert(&["norm", "one.json", "--space", "llogl"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let n = v["norms"]["llogl"]["value"].as_f64().unwrap();
    assert!((n - 4.0).abs() < 1e-10, "{n}");
}

#[test]
fn unknown_names_exit_2_with_choices() {
    let dir = tempfile::tempdir().unwrap();
    let o = finhilbert(&["verify", "--suite", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("poincare_bertrand") && err.contains("all"), "{err}");
    let o = finhilbert(&["witness", "--case", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("range-gap"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(finhilbert(&[], dir.path()).status.code(), Some(2));
    assert_eq!(finhilbert(&["transform"], dir.path()).status.code(), Some(2));
    assert_eq!(finhilbert(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn verify_report_matches_library_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let o = finhilbert(&["verify", "--suite", "appendix", "--seed", "3", "--report", "r.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
    let lib = run("appendix", &VerifyConfig { seed: 3, ..VerifyConfig::default() }).unwrap();
    assert_eq!(text, lib.to_json());
    assert!(text.contains("\"seed\": 3"));
}

#[test]
fn config_from_environment_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.toml", "resolution = 8\n");
    write(dir.path(), "one.json", r#"{"weight":"flat_u","coeffs":[1]}"#);
    let run_with_env = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_finhilbert"))
            .args(args)
            .current_dir(dir.path())
            .env("FINHILBERT_CONFIG", "bad.toml")
            .output()
            .unwrap()
    };
    let o = run_with_env(&["norm", "one.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resolution"));
    // The flag overrides the file value.
    let o = run_with_env(&["norm", "one.json", "--resolution", "128"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["resolution"], 128);
}

#[test]
fn csv_is_rejected_for_json_only_commands() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "zero.json", r#"{"weight":"flat_u","coeffs":[0]}"#);
    let o = finhilbert(&["invert", "zero.json", "--format", "csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn arcsine_witness_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = finhilbert(&["witness", "--case", "arcsine", "--resolution", "1024"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["case"], "arcsine");
    assert_eq!(v["pass"], true);
}
