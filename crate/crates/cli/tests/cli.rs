use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_approxdual"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("approxdual-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

const INDICATOR: &str = r#"{"kind":"shift","params":{"window":{"kind":"bspline","params":{"order":1}},"offset":0.5}}"#;

#[test]
fn reproduce_spline_case() {
    let out = run(&["reproduce", "e1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    let walnut = v["result"]["walnut_bound"].as_f64().unwrap();
    assert!(walnut <= 0.0027 * 1.15);
    let t1 = v["result"]["perturbed_dual_bound"].as_f64().unwrap();
    assert!((t1 - 0.025).abs() <= 0.025 * 0.15, "{t1}");
    assert!(v["policy"]["grid_points"].is_u64());
}

#[test]
fn reproduce_finite_cases() {
    let v = json(&run(&["reproduce", "r1"]));
    assert_eq!(v["result"]["non_transitive"], true);
    let out = run(&["reproduce", "a1", "--c", "100"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["upper_bound"].as_f64(), Some(10001.0));
}

#[test]
fn unknown_case_is_a_usage_error() {
    assert_eq!(run(&["reproduce", "x9"]).status.code(), Some(2));
}

#[test]
fn malformed_window_spec_is_a_usage_error() {
    let out = run(&["bounds", "--window", r#"{"kind":"gaussian","params":{"amp":1}}"#, "--b", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid window spec"));
    let out = run(&["bounds", "--window", r#"{"kind":"gaussian","params":{"amplitude":1,"width":-1}}"#, "--b", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missed_target_exits_one() {
    let cfg = scratch("coarse.toml");
    std::fs::write(&cfg, "[policy]\ngrid_points = 8\nmax_grid_points = 8\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "reproduce", "e1"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn bounds_of_the_gaussian_system() {
    let out = run(&["bounds", "--window", r#"{"kind":"gaussian","params":{"amplitude":1,"width":0.5}}"#, "--a", "1", "--b", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    assert!((r["lower"].as_f64().unwrap() - 2.6).abs() < 0.3);
    assert!((r["upper"].as_f64().unwrap() - 10.1).abs() < 1.0);
}

#[test]
fn walnut_of_orthonormal_basis_is_zero() {
    let out = run(&["walnut", "--analysis", INDICATOR, "--synthesis", INDICATOR, "--a", "1", "--b", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["value"].as_f64(), Some(0.0));
}

#[test]
fn residuals_and_iterate_emit_json() {
    let out = run(&["residuals", "--analysis", INDICATOR, "--synthesis", INDICATOR, "--b", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["r0"].as_f64(), Some(0.0));
    let out = run(&["iterate", "--analysis", INDICATOR, "--synthesis", INDICATOR, "--b", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["squared_bound"].as_f64(), Some(0.0));
    assert!(v["result"]["gamma"]["terms"].is_array());
}

#[test]
fn sample_window_csv() {
    let out = run(&["sample-window", "--window", r#"{"kind":"bspline","params":{"order":8}}"#, "--from", "-4", "--to", "4", "--step", "0.01"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,value"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 801);
    let (x, v) = rows[400].split_once(',').unwrap();
    assert_eq!(x, "0.00");
    assert!((v.parse::<f64>().unwrap() - 151.0 / 315.0).abs() < 1e-15);
}

#[test]
fn output_is_byte_identical_across_runs_and_threads() {
    let a = run(&["reproduce", "e2"]);
    let b = run(&["--threads", "1", "reproduce", "e2"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_and_out_file() {
    let cfg = scratch("bad.toml");
    std::fs::write(&cfg, "[policy]\ngrid_pts = 4\n").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "reproduce", "a1"]).status.code(), Some(2));

    let cfg = scratch("good.toml");
    let report = scratch("a1.json");
    std::fs::write(&cfg, format!("out = {:?}\n[policy]\nlattice_cutoff_N = 8\n", report.to_str().unwrap())).unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "reproduce", "a1", "--c", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["result"]["upper_bound"].as_f64(), Some(5.0));
    assert_eq!(v["policy"]["lattice_cutoff_N"], 8);
}

#[test]
fn finite_check_on_frame_files() {
    let f = scratch("f.json");
    let g = scratch("g.json");
    std::fs::write(&f, r#"{"dim":2,"vectors":[[0,0],[0,0],[1,0],[0,0],[0,0],[1,0]]}"#).unwrap();
    std::fs::write(&g, r#"{"dim":2,"vectors":[[5,0],[0,0],[1,0],[0,0],[0,0],[1,0]]}"#).unwrap();
    let out = run(&["finite-check", "--analysis", f.to_str().unwrap(), "--synthesis", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["result"]["defect"].as_f64(), Some(0.0));
}
