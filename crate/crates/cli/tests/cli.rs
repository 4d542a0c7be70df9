use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

struct Run {
    code: i32,
    report: Value,
    raw: String,
}

fn write_job(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run_with_env(cmd: &str, job: &Path, env: &[(&str, &str)]) -> Run {
    let mut c = Command::new(env!("CARGO_BIN_EXE_affmod"));
    c.arg(cmd).arg("--job").arg(job);
    for (k, v) in env {
        c.env(k, v);
    }
    let out = c.output().expect("binary runs");
    let raw = String::from_utf8(out.stdout).unwrap();
    let report = serde_json::from_str(&raw).unwrap_or(Value::Null);
    Run {
        code: out.status.code().unwrap_or(-1),
        report,
        raw,
    }
}

fn run(cmd: &str, job: &Path) -> Run {
    run_with_env(cmd, job, &[])
}

#[test]
fn gallery_russell() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(dir.path(), "g.json", r#"{"command": "gallery", "name": "russell"}"#);
    let r = run("gallery", &job);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["outputs"]["golden"]["numerator"], "x + x^2*y + z^2 + t^3");
    assert_eq!(r.report["outputs"]["golden"]["matches"], true);
    assert_eq!(r.report["outputs"]["golden"]["unit"], "-1");
}

#[test]
fn malformed_polynomial_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(dir.path(), "m.json", r#"{"vars": ["x", "y"], "f": "x+", "center": ["y"]}"#);
    let r = run("modify", &job);
    assert_eq!(r.code, 2);
    assert_eq!(r.report["status"], "input-error");
    assert_eq!(r.report["error"]["kind"], "Syntax");
    assert_eq!(r.report["error"]["position"], 2);
}

#[test]
fn unknown_keys_and_missing_files_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(dir.path(), "u.json", r#"{"vars": ["x"], "f": "x", "center": ["x"], "colour": 1}"#);
    assert_eq!(run("modify", &job).code, 2);
    assert_eq!(run("modify", &dir.path().join("absent.json")).code, 2);
    let job = write_job(dir.path(), "c.json", r#"{"command": "count", "name": "russell"}"#);
    assert_eq!(run("gallery", &job).code, 2);
}

#[test]
fn transitivity_plan_verifies_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(
        dir.path(),
        "t.json",
        r#"{"vars": ["x", "y"], "p": "x + x^2*y",
            "sources": [["1", "1", "2", "1"], ["0", "5", "0", "3"]],
            "targets": [["1", "0", "1", "1"], ["2", "1/4", "3", "1"]]}"#,
    );
    let r = run("transitivity", &job);
    assert_eq!(r.code, 0, "{}", r.raw);
    let word = r.report["outputs"]["word"].as_str().unwrap().to_string();
    std::fs::write(dir.path().join("plan.txt"), &word).unwrap();
    let verify = r#"{"vars": ["x", "y"], "kind": "transitivity", "p": "x + x^2*y",
            "sources": [["1", "1", "2", "1"], ["0", "5", "0", "3"]],
            "targets": [["1", "0", "1", "1"], ["2", "1/4", "3", "1"]], "word_file": "plan.txt"}"#;
    let vjob = write_job(dir.path(), "v.json", verify);
    assert_eq!(run("verify", &vjob).code, 0);

    // drop one generator
    let mut lines: Vec<&str> = word.lines().collect();
    lines.remove(lines.len() / 2);
    std::fs::write(dir.path().join("plan.txt"), lines.join("\n")).unwrap();
    let tampered = run("verify", &vjob);
    assert_eq!(tampered.code, 1);
    assert_eq!(tampered.report["status"], "verify-failed");

    std::fs::remove_file(dir.path().join("plan.txt")).unwrap();
    assert_eq!(run("verify", &vjob).code, 2);
}

#[test]
fn simple_transitivity_job() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(
        dir.path(),
        "t.json",
        r#"{"vars": ["x", "y"], "p": "x", "sources": [["0", "0", "0", "1"]], "targets": [["1", "1", "1", "1"]]}"#,
    );
    let r = run("transitivity", &job);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["outputs"]["verified"], true);
    let trace = r.report["outputs"]["trace"].as_array().unwrap();
    assert_eq!(trace.first().unwrap()["stage"], "sources");
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(
        dir.path(),
        "t.json",
        r#"{"vars": ["x", "y"], "p": "x*y + x^3",
            "sources": [["1", "1", "1", "2"], ["0", "0", "0", "7"]],
            "targets": [["2", "0", "8", "1"], ["-1", "1", "2", "-1"]]}"#,
    );
    let a = run("transitivity", &job);
    let b = run("transitivity", &job);
    assert_eq!(a.code, 0, "{}", a.raw);
    assert_eq!(a.raw, b.raw);
}

#[test]
fn rectify_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(dir.path(), "r.json", r#"{"vars": ["x", "y"], "p": "x", "g": "y + x*(x + y)"}"#);
    let r = run("rectify", &job);
    assert_eq!(r.code, 0);
    let word = r.report["outputs"]["word"].as_str().unwrap().to_string();
    let v = serde_json::json!({"vars": ["x", "y"], "kind": "rectify", "p": "x", "g": "y + x*(x + y)", "word": word});
    let vjob = write_job(dir.path(), "v.json", &v.to_string());
    assert_eq!(run("verify", &vjob).code, 0);
    let bad = serde_json::json!({"vars": ["x", "y"], "kind": "rectify", "p": "x", "g": "y + x*(x + y)", "word": "PLANE c=0\n"});
    let bjob = write_job(dir.path(), "b.json", &bad.to_string());
    assert_eq!(run("verify", &bjob).code, 1);

    let job = write_job(dir.path(), "e.json", r#"{"vars": ["x", "y"], "p": "x^2", "g": "x + y^2"}"#);
    let r = run("rectify", &job);
    assert_eq!(r.code, 2);
    assert_eq!(r.report["error"]["kind"], "TransversalityViolated");

    let job = write_job(dir.path(), "p.json", r#"{"vars": ["x", "y"], "mode": "pair", "f": "x", "g": "x*y + 1"}"#);
    assert_eq!(run("rectify", &job).code, 3);
    let job = write_job(dir.path(), "s.json", r#"{"vars": ["x", "y"], "mode": "smoothness", "f": "x^2", "g": "y^2"}"#);
    let r = run("rectify", &job);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["outputs"]["verdict"], "singular");
}

#[test]
fn count_jobs_and_budget() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(dir.path(), "c.json", r#"{"vars": ["x"], "field": "Fq(3)", "p": "x^2"}"#);
    let r = run("count", &job);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["outputs"]["N_X"], 9);
    assert_eq!(r.report["outputs"]["match"], true);
    let job = write_job(dir.path(), "e.json", r#"{"vars": ["x", "y"], "q": 5, "equations": ["x^2 + y^2 - 1"]}"#);
    assert_eq!(run("count", &job).report["outputs"]["count"], 4);
    let limited = run_with_env("count", &job, &[("AFFMOD_MAX_CELLS", "10")]);
    assert_eq!(limited.code, 3);
    assert_eq!(limited.report["status"], "incomplete(BudgetExceeded)");
}

#[test]
fn modification_and_flow_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(
        dir.path(),
        "s.json",
        r#"{"vars": ["x", "y", "z", "t"], "g": "-x + x^2*y + (z + 1)^2 - (t + 1)^3",
            "target_vars": ["x", "y", "z", "t"], "images": ["x", "x*y", "x*z", "x*t"], "exceptional": "x"}"#,
    );
    let r = run("strict-transform", &job);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["outputs"]["multiplicity"], 1);
    assert_eq!(
        r.report["outputs"]["strict_transform"],
        "-x^2*t^3 + x^2*y + x*z^2 - 3*x*t^2 + 2*z - 3*t - 1"
    );

    let job = write_job(dir.path(), "m.json", r#"{"vars": ["x", "z", "t"], "f": "-x^2", "center": ["x + z^2 + t^3"]}"#);
    let r = run("modify", &job);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["outputs"]["fractions_annihilate"], true);

    let job = write_job(
        dir.path(),
        "l.json",
        r#"{"vars": ["x", "y"], "f": "x", "center": ["y"], "derivation": ["0", "x"]}"#,
    );
    let r = run("lift", &job);
    assert_eq!(r.code, 0, "{}", r.raw);
    assert_eq!(r.report["outputs"]["intertwines"], true);

    let job = write_job(dir.path(), "f.json", r#"{"vars": ["x", "y"], "field": "Fq(5)", "derivation": ["0", "x"]}"#);
    let r = run("flow", &job);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["outputs"]["flow"][1], "x*t + y");
    let job = write_job(dir.path(), "n.json", r#"{"vars": ["x", "y"], "derivation": ["y", "x"], "max_iter": 8}"#);
    assert_eq!(run("flow", &job).code, 3);
}
