use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn qgraded(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgraded")).args(args).output().unwrap()
}

fn run_with_report(scenario: &Path, extra: &[&str]) -> (i32, Vec<u8>) {
    let dir = tempfile::tempdir().unwrap();
    let rp = dir.path().join("report.json");
    let mut args = vec!["run", scenario.to_str().unwrap(), "--report", rp.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = qgraded(&args);
    let code = out.status.code().unwrap();
    (code, std::fs::read(&rp).unwrap_or_default())
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const POISSON_SO3: &str = r#"
schema_version = 1
name = "t"
workflow = "check-q"

[instance]
kind = "poisson"
pi = [
  ["0", "x3", "-x2"],
  ["-x3", "0", "x1"],
  ["x2", "-x1", "0"],
]
"#;

#[test]
fn shipped_scenarios_pass() {
    let mut names: Vec<_> = std::fs::read_dir(scenarios())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    names.sort();
    assert!(names.len() >= 2);
    for p in names {
        let out = qgraded(&["run", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}: {}", p.display(), String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn tpsm_wz4_report() {
    let (code, bytes) = run_with_report(&scenarios().join("tpsm-wz4.toml"), &[]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["workflow"], "tpsm");
    assert_eq!(r["facts"]["unique"], true);
    assert_eq!(r["facts"]["residual_zero"], true);
    assert_eq!(r["data"]["pullback_residual"], "0");
    // a = 1: E is the identity and F is pi
    let e = &r["data"]["E"];
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(e[i][j], if i == j { "1" } else { "0" });
        }
    }
    assert_eq!(r["data"]["F"][0][1], "-1");
    assert_eq!(r["data"]["space"]["dimension"], 0);
}

#[test]
fn ce_so3_is_a_q_structure() {
    let (code, bytes) = run_with_report(&scenarios().join("ce-so3.toml"), &[]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(r["facts"]["q_structure"], true);
}

#[test]
fn reports_are_byte_stable() {
    for name in ["courant-standard.toml", "wz4-equivariance.toml", "so3-derived-bracket.toml"] {
        let p = scenarios().join(name);
        let (c1, a) = run_with_report(&p, &[]);
        let (c2, b) = run_with_report(&p, &[]);
        assert_eq!((c1, c2), (0, 0));
        assert!(!a.is_empty());
        assert_eq!(a, b, "{}", name);
    }
}

#[test]
fn seed_override_changes_the_samples() {
    let p = scenarios().join("so3-derived-bracket.toml");
    let (_, a) = run_with_report(&p, &[]);
    let (code, b) = run_with_report(&p, &["--seed", "12"]);
    assert_eq!(code, 0);
    assert_ne!(a, b);
    let r: Value = serde_json::from_slice(&b).unwrap();
    assert_eq!(r["parameters"]["seed"], 12);
}

#[test]
fn malformed_tensor_arity_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = POISSON_SO3.replace(r#"["-x3", "0", "x1"]"#, r#"["-x3", "0"]"#);
    let p = write(dir.path(), "bad.toml", &bad);
    let out = qgraded(&["run", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("instance.pi[1]"), "{}", err);
    assert!(err.contains("expected 3 entries, found 2"), "{}", err);
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        // unknown variable inside a tensor entry
        POISSON_SO3.replace(r#""x1"]"#, r#""y1"]"#),
        // TOML syntax
        POISSON_SO3.replace("kind = \"poisson\"", "kind = poisson"),
        // unknown field
        POISSON_SO3.replace("name = \"t\"", "name = \"t\"\ncolour = 1"),
        // wrong schema version
        POISSON_SO3.replace("schema_version = 1", "schema_version = 9"),
        // assertion on a fact the workflow does not produce
        format!("{}\n[expect]\nunique = true\n", POISSON_SO3),
        // seeded workflow without a seed
        POISSON_SO3.replace("check-q", "derived-bracket"),
        // instance kind the workflow cannot use
        POISSON_SO3.replace("check-q", "courant-axioms"),
    ];
    for (k, body) in cases.iter().enumerate() {
        let p = write(dir.path(), &format!("c{}.toml", k), body);
        let out = qgraded(&["run", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "case {}: {}", k, String::from_utf8_lossy(&out.stderr));
    }
    let out = qgraded(&["run", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn syntax_errors_report_a_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "s.toml", &POISSON_SO3.replace("kind = \"poisson\"", "kind = poisson"));
    let err = String::from_utf8_lossy(&qgraded(&["run", p.to_str().unwrap()]).stderr).to_string();
    assert!(err.contains("line 7"), "{}", err);
}

#[test]
fn failed_assertion_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "a.toml", &format!("{}\n[expect]\nq_structure = false\n", POISSON_SO3));
    let (code, bytes) = run_with_report(&p, &[]);
    assert_eq!(code, 1);
    let r: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(r["passed"], false);
    assert_eq!(r["assertions"][0]["actual"], true);
}

#[test]
fn failing_checks_without_expectations_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let body = std::fs::read_to_string(scenarios().join("wz4-wrong-sign.toml")).unwrap();
    let body = body.split("[expect]").next().unwrap().to_string();
    let p = write(dir.path(), "w.toml", &body);
    let out = qgraded(&["run", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("certificate: [Q,Q]("));
}

#[test]
fn courant_equivariance_detects_non_horizontal_generators() {
    let dir = tempfile::tempdir().unwrap();
    let body = std::fs::read_to_string(scenarios().join("courant-equivariance.toml"))
        .unwrap()
        .replace(r#"{ v = ["0", "0", "0"], eta = ["x2", "0", "1"] }"#, r#"{ v = ["1", "0", "0"], eta = ["0", "0", "0"] }"#);
    let p = write(dir.path(), "ce.toml", &body);
    let (code, bytes) = run_with_report(&p, &[]);
    assert_eq!(code, 1);
    let r: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(r["facts"]["horizontal"], false);
    assert!(r["checks"][0]["certificate"].as_str().unwrap().starts_with("generator 1:"));
}

#[test]
fn empty_solution_space_reports_its_witness() {
    // The three translations of R^3 cannot gauge the volume form.
    let dir = tempfile::tempdir().unwrap();
    let body = r#"
schema_version = 1
name = "translations"
workflow = "stanciu"
degree_bound = 1

[instance]
kind = "wz"
n = 3
h = [{ at = [1, 2, 3], value = "1" }]
dim = 3
action = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]

[expect]
valid = true
unobstructed = false
"#;
    let p = write(dir.path(), "d.toml", body);
    let (code, bytes) = run_with_report(&p, &[]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(r["data"]["space"]["dimension"], Value::Null);
    let w = r["data"]["space"]["witness"].as_str().unwrap();
    assert!(w.starts_with("horizontal"), "{}", w);
    assert!(r["checks"][1]["certificate"].as_str().unwrap() == w);
}

#[test]
fn low_degree_bound_misses_the_extension() {
    let (code, bytes) = run_with_report(&scenarios().join("tpsm-wz4.toml"), &["--degree-bound", "0"]);
    assert_eq!(code, 1);
    let r: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(r["parameters"]["degree_bound"], 0);
    assert_eq!(r["facts"]["matches_display"], false);
    assert_eq!(r["facts"]["residual_zero"], false);
}

#[test]
fn help_lists_the_flags() {
    let out = qgraded(&["run", "--help"]);
    let s = String::from_utf8_lossy(&out.stdout);
    for f in ["--report", "--seed", "--degree-bound", "--verbose"] {
        assert!(s.contains(f), "{}", f);
    }
}
