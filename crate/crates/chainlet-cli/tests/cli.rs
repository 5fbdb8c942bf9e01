use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

const SQUARE: &str = r#"{"n":2,"k":2,"terms":[{"c":1.0,"kind":"pp","base":[0.0,0.0],"edges":[[1.0,0.0],[0.0,1.0]]}]}"#;
const X_DY: &str = r#"{"n":2,"k":1,"terms":[{"H":[2],"poly":[{"exps":[1,0],"c":1.0}]}]}"#;

fn chainlet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainlet")).args(args).output().expect("binary runs")
}

fn fixture(name: &str, body: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-fixtures");
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn experiment_list_names_every_experiment() {
    let o = chainlet(&["experiment", "list"]);
    assert_eq!(o.status.code(), Some(0));
    let names: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(names.len(), 8);
    assert!(names.contains(&"staircase".to_string()) && names.contains(&"whitney-koch".to_string()));
}

#[test]
fn staircase_csv() {
    let o = chainlet(&["experiment", "run", "staircase", "--depth", "8", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 10);
    assert!(lines[0].starts_with("i,upper,"));
    let last: Vec<&str> = lines[9].split(',').collect();
    assert_eq!(last[0], "8");
    assert_eq!(last[1].parse::<f64>().unwrap(), 0.5f64.powi(9));
}

#[test]
fn json_report_to_file() {
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("dipole.json");
    let o = chainlet(&["experiment", "run", "dipole", "--depth", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert_eq!(v["verdict"]["pass"], true);
}

#[test]
fn failing_verdict_exits_one() {
    let o = chainlet(&["experiment", "run", "quantize", "--depth", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("check failed"));
}

#[test]
fn unknown_experiment_exits_two() {
    let o = chainlet(&["experiment", "run", "nosuch"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("nosuch") && err.contains("staircase") && err.contains("cantor-boundary"), "{err}");
}

#[test]
fn stokes_check_and_integrate() {
    let sq = fixture("sq.json", SQUARE);
    let w = fixture("xdy.json", X_DY);
    let o = chainlet(&["stokes-check", "--chain", sq.to_str().unwrap(), "--form", w.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["lhs"].as_f64().unwrap() - 1.0).abs() < 1e-14);
    assert!((v["rhs"].as_f64().unwrap() - 1.0).abs() < 1e-14);
    let boundary = r#"{"n":2,"k":1,"terms":[{"c":1.0,"kind":"simplex","pts":[[1.0,0.0],[1.0,1.0]]}]}"#;
    let e = fixture("edge.json", boundary);
    let o = chainlet(&["integrate", "--chain", e.to_str().unwrap(), "--form", w.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["integral"].as_f64().unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn norm_bound_with_and_without_form() {
    let sq = fixture("sq_norm.json", SQUARE);
    let o = chainlet(&["norm-bound", "--chain", sq.to_str().unwrap(), "--r", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["kind"], "upper");
    assert_eq!(v[0]["value"], 1.0);
    let vol = fixture("vol.json", r#"{"n":2,"k":2,"terms":[{"H":[1,2],"poly":[{"exps":[0,0],"c":1.0}]}]}"#);
    let o = chainlet(&[
        "norm-bound",
        "--chain",
        sq.to_str().unwrap(),
        "--form",
        vol.to_str().unwrap(),
        "--certified-norm",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[1]["kind"], "lower");
    assert!((v[1]["value"].as_f64().unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn malformed_json_reports_location() {
    let bad = fixture("bad.json", "{\n  \"n\": 2,\n  \"k\": 2,\n  \"terms\": [oops]\n}\n");
    let w = fixture("xdy_bad.json", X_DY);
    let o = chainlet(&["stokes-check", "--chain", bad.to_str().unwrap(), "--form", w.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains(&format!("{}:4:", bad.display())), "{err}");
}

#[test]
fn missing_file_exits_two() {
    let o = chainlet(&["integrate", "--chain", "/nonexistent/chain.json", "--form", "/nonexistent/form.json"]);
    assert_eq!(o.status.code(), Some(2));
}
