use std::process::{Command, Output};

fn ncalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncalc")).args(args).output().expect("spawn ncalc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = ncalc(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn derive_matches_finite_difference() {
    let v = json(&["derive", "-p", "x^3", "-x", "1+i", "-h", "j", "--order", "2"]);
    assert!(v["residual"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["value"]["coords"], serde_json::json!([-6.0, -2.0, 0.0, 0.0]));
}

#[test]
fn path_dependence_demo_gap() {
    let v = json(&["integrate-path", "--demo", "path-dependence"]);
    assert!(v["gap_residual"].as_f64().unwrap() < 1e-9);
    let v = json(&["integrate-path", "--demo", "integrable"]);
    assert!(v["gap_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn open_loop_is_usage_error() {
    let o = ncalc(&["integrate-path", "--form", "3⊗x^2", "--waypoints", "0;i;j", "--loop"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ncalc(&["integrate-path", "--form", "3⊗x^2", "--waypoints", "0;i;j;0", "--loop"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn path_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("ncalc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("path.json");
    std::fs::write(&file, r#"{"waypoints": [[0,0,0,0], [1,0,0,0]], "closed": false}"#).unwrap();
    let v = json(&["integrate-path", "--form", "1⊗x^2 + x⊗x + x^2⊗1", "--path", file.to_str().unwrap()]);
    let c = v["integral"]["value"]["coords"][0].as_f64().unwrap();
    assert!((c - 1.0).abs() < 1e-9);
    std::fs::write(&file, "{not json").unwrap();
    assert_eq!(ncalc(&["integrate-path", "--form", "3⊗x^2", "--path", file.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn exp_of_half_pi_i() {
    let v = json(&["series", "exp", "-x", "pi/2*i"]);
    let c: Vec<f64> = v["value"]["coords"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(c[0].abs() < 1e-12 && (c[1] - 1.0).abs() < 1e-12);
}

#[test]
fn form_verdicts() {
    let v = json(&["forms", "check", "--form", "1⊗x^2 + x⊗x + x^2⊗1"]);
    assert_eq!(v["verdict"]["certified"], true);
    let v = json(&["forms", "check", "--form", "3⊗x^2"]);
    assert_eq!(v["verdict"]["certified"], false);
}

#[test]
fn complex_integrate_and_refusal() {
    let v = json(&["-A", "complex", "complex", "integrate", "--a", "3*x0^2 + 6*x0*x1*i", "--b", "-3*x1^2"]);
    assert!(v["variation_quarter"].as_f64().unwrap() < 1e-9);
    let o = ncalc(&["-A", "complex", "complex", "integrate", "--a", "3*x0^2", "--b", "0"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bad_input_exit_codes() {
    assert_eq!(ncalc(&["derive", "-p", "x^^", "-x", "1", "-h", "1"]).status.code(), Some(2));
    assert_eq!(ncalc(&["-A", "octonion", "demo", "norms"]).status.code(), Some(2));
    assert_eq!(ncalc(&["series", "tan"]).status.code(), Some(2));
    assert_eq!(ncalc(&["--spec", "/nonexistent.json", "demo", "norms"]).status.code(), Some(2));
    assert_eq!(ncalc(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn json_output_is_deterministic() {
    let args = ["demo", "forms", "--format", "json", "--seed", "7"];
    let (a, b) = (ncalc(&args), ncalc(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = ncalc(&["demo", "forms", "--format", "json", "--seed", "8"]);
    assert_ne!(stdout(&a), stdout(&c));
}

#[test]
fn demo_all_reports_every_criterion() {
    let o = ncalc(&["demo", "all"]);
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]") || l.starts_with("[FAIL]")).count(), 11);
}
