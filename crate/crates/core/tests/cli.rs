use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_helton-howe");

const SHIFT: &str = r#"{"type":"finite_band","coeffs":[{"k":1,"re":1.0,"im":0.0}]}"#;
const THREE_TERM: &str = r#"{"type":"finite_band","coeffs":[{"k":1,"re":1.0,"im":0.0},{"k":2,"re":0.4,"im":0.0},{"k":-1,"re":0.2,"im":0.0}]}"#;

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn json_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn measure_csv_for_the_shift() {
    let dir = TempDir::new().unwrap();
    let sym = write(&dir, "shift.json", SHIFT);
    let out = dir.path().join("m.csv");
    let o = run(&["measure", "--symbol", s(&sym), "--grid", "-1.5,1.5,-1.5,1.5,200,200", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 200 * 200);
    let mut inside = 0;
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        let (x, y, im): (f64, f64, f64) = (f[0].parse().unwrap(), f[1].parse().unwrap(), f[3].parse().unwrap());
        if f[4] == "1" && (x * x + y * y).sqrt() < 0.98 {
            inside += 1;
            assert!((im + 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
        }
    }
    assert!(inside > 10_000);
}

#[test]
fn trace_check_json() {
    let dir = TempDir::new().unwrap();
    let sym = write(&dir, "shift.json", SHIFT);
    let v = json_stdout(&run(&["trace-check", "--symbol", s(&sym), "--p", "x", "--q", "y"]));
    assert!(v["abs_err"].as_f64().unwrap() < 1e-3);
    assert_eq!(v["ok"], Value::Bool(true));
    assert!((v["lhs"]["im"].as_f64().unwrap() + 0.5).abs() < 1e-12);
}

#[test]
fn malformed_symbol_is_a_schema_error() {
    let dir = TempDir::new().unwrap();
    let sym = write(&dir, "bad.json", r#"{"type":"finite_band","coeffs":[{"k":1,"re":"one","im":0}]}"#);
    let o = run(&["trace-check", "--symbol", s(&sym), "--p", "x", "--q", "y"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema"));
}

#[test]
fn usage_errors_exit_two() {
    let o = run(&["trace-check", "--p", "x"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(v["error"], "usage");
}

#[test]
fn bad_grid_is_rejected() {
    let dir = TempDir::new().unwrap();
    let sym = write(&dir, "shift.json", SHIFT);
    let o = run(&["measure", "--symbol", s(&sym), "--grid", "1,0,-1,1,10,10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let sym = write(&dir, "three.json", THREE_TERM);
    let args = ["trace-check", "--symbol", s(&sym), "--p", "x^2", "--q", "y", "--grid", "-2,2,-2,2,120,120"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let m = ["measure", "--symbol", s(&sym), "--grid", "-2,2,-2,2,60,60"];
    assert_eq!(run(&m).stdout, run(&m).stdout);
}

#[test]
fn winding_and_index() {
    let dir = TempDir::new().unwrap();
    let sym = write(&dir, "three.json", THREE_TERM);
    let v = json_stdout(&run(&["winding", "--symbol", s(&sym), "--lambda", "0.1,0.05", "--lambda", "3,0"]));
    let rows = v["points"].as_array().unwrap();
    assert_eq!(rows[0]["winding"], 1);
    assert_eq!(rows[1]["winding"], 0);
    let v = json_stdout(&run(&["index-check", "--symbol", s(&sym), "--lambda", "0.1,0.05"]));
    assert_eq!(v["ok"], Value::Bool(true));
    assert_eq!(v["points"][0]["index"], -1);
}

#[test]
fn besov_report() {
    let dir = TempDir::new().unwrap();
    let sym = write(&dir, "three.json", THREE_TERM);
    let v = json_stdout(&run(&["besov", "--symbol", s(&sym), "--p", "2", "--q", "2"]));
    assert!(v["f"]["seminorm_partial"].is_number());
    assert_eq!(v["sufficiency"], "met");
    assert_eq!(v["jacobian"]["holds"], Value::Bool(true));
}

#[test]
fn smooth_limit_moments() {
    let dir = TempDir::new().unwrap();
    let sym = write(&dir, "shift.json", SHIFT);
    let v = json_stdout(&run(&[
        "smooth-limit", "--symbol", s(&sym), "--p", "x", "--q", "y", "--grid", "-1.2,1.2,-1.2,1.2,200,200",
    ]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn gallery_csv() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("g.csv");
    let o = run(&["gallery", "--format", "csv", "--out", s(&out)]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().count() > 10);
    assert!(text.contains("cesaro"));
}
