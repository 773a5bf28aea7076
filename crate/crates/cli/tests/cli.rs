use std::process::{Command, Output};

use serde_json::Value;

fn cdga(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdga")).args(args).env_remove("CDGA_TRUNCATION").output().unwrap()
}

fn json_ok(args: &[&str]) -> Value {
    let out = cdga(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_of(args: &[&str], code: i32) -> Value {
    let out = cdga(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}");
    assert!(out.stdout.is_empty());
    serde_json::from_slice(&out.stderr).unwrap()
}

#[test]
fn cohomology_of_s4_in_degree_4() {
    let v = json_ok(&["cohomology", "--model", "s4", "--degree", "4"]);
    assert_eq!(v["dimension"], 1);
    assert_eq!(v["representatives"][0], "a");
}

#[test]
fn torsion_count_for_d_7() {
    let v = json_ok(&["count", "torsion", "--d", "7"]);
    assert_eq!(v["count"], 14);
    let v = json_ok(&["count", "torsion", "--d", "0"]);
    assert_eq!(v["unbounded"], true);
}

#[test]
fn growth_count_for_d_2() {
    let v = json_ok(&["count", "growth", "--D", "2"]);
    assert_eq!(v["count"], 24);
    assert_eq!(v["terms"], serde_json::json!([8, 8, 8]));
}

#[test]
fn density_with_oracle() {
    let v = json_ok(&["count", "density", "--a1", "-1", "--a2", "2", "--radius", "10", "--oracle"]);
    assert_eq!(v["count"], v["oracle"]);
}

#[test]
fn rationals_are_printed_exactly() {
    let v = json_ok(&["ballbound", "--radius", "5/2"]);
    assert_eq!(v["bound"], "225/4");
    let v = json_ok(&["fourlemma", "predict", "--kind", "surjective", "--constants", "1/2,1,1,1", "--tau", "1/3", "--ranks", "1,1,1"]);
    assert!(v["predicted"].is_string());
}

#[test]
fn extend_reports_nonzero_obstruction_as_computation_error() {
    let dir = std::env::temp_dir().join(format!("cdga-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("free4.model");
    std::fs::write(&path, "name free4\ngen y 4 1\n").unwrap();
    let file = path.to_str().unwrap();
    let v = json_ok(&["--model-file", file, "obstruct", "--model", "s4", "--target", "free4", "--image", "y"]);
    assert_eq!(v["zero"], false);
    let e = error_of(&["--model-file", file, "extend", "--model", "s4", "--target", "free4", "--image", "y"], 2);
    assert_eq!(e["error"], "NonzeroObstruction");
    let v = json_ok(&["extend", "--model", "s4", "--target", "s3xs4", "--image", "2*y"]);
    assert_eq!(v["map"]["b"], "4*z");
}

#[test]
fn validation_errors_exit_1() {
    assert_eq!(error_of(&["cohomology", "--model", "cp2", "--degree", "2"], 1)["error"], "UnknownSchema");
    assert_eq!(error_of(&["cohomology", "--model", "s4", "--degree", "9"], 1)["error"], "DegreeOutOfRange");
    assert_eq!(error_of(&["count", "density", "--a1", "1", "--a2", "1", "--radius=-1"], 1)["error"], "Validation");
    assert_eq!(error_of(&["classify", "--pair", "s3xs4->s4", "--image", "y"], 1)["error"], "Validation");
    assert_eq!(cdga(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cdga(&["--help"]).status.code(), Some(0));
}

#[test]
fn homotopy_check_finds_rational_homotopy() {
    let v = json_ok(&["homotopy-check", "--source", "s4", "--target", "s3xs4", "--start", "y", "--start", "z + 2*x*y", "--end", "y", "--end", "z"]);
    assert_eq!(v["homotopic"], true);
}

#[test]
fn classify_and_into_w() {
    let v = json_ok(&["classify", "--pair", "s3xs4->s4", "--image", "3*y", "--image", "9*z + 7*x*y"]);
    assert_eq!(v["canonical"], serde_json::json!(["3", "1"]));
    let v = json_ok(&["into-w", "--pair", "s3xs4->s4", "--image", "3*y", "--image", "9*z + 7*x*y"]);
    assert_eq!(v["trace"].as_array().unwrap().len(), 2);
}

#[test]
fn finite_to_one_bounds() {
    assert_eq!(json_ok(&["fto1-bound", "--complex", "rp2", "--coeff", "1:2", "--coeff", "2:2"])["bound"], "4");
    assert_eq!(json_ok(&["fto1-bound", "--complex", "torus", "--coeff", "1:3,3"])["bound"], "81");
}

#[test]
fn repro_example1_passes() {
    let v = json_ok(&["repro", "example1"]);
    assert_eq!(v["pass"], true);
}

#[test]
fn output_is_deterministic_for_a_seed() {
    for args in [
        &["fourlemma", "verify", "--kind", "injective", "--runs", "40", "--seed", "3"][..],
        &["repro", "example1"][..],
        &["count", "growth", "--D", "50", "--fit", "64,128"][..],
    ] {
        assert_eq!(cdga(args).stdout, cdga(args).stdout, "{args:?}");
    }
}

#[test]
fn csv_and_text_renderings() {
    let out = cdga(&["models", "list", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("id,kind\n"));
    assert!(text.contains("s3xs4->s4,pair"));
    let out = cdga(&["count", "torsion", "--d", "7", "--format", "text"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("count: 14\n"));
}

#[test]
fn truncation_override_reaches_builtins() {
    let out = Command::new(env!("CARGO_BIN_EXE_cdga")).args(["cohomology", "--model", "s4", "--degree", "11"]).env("CDGA_TRUNCATION", "12").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}
