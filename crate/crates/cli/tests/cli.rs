use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn stc() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_stc"));
    c.env_remove("STC_FUEL");
    c
}

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn schema() -> jsonschema::Validator {
    let text = std::fs::read_to_string(root().join("docs/report.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// Runs with `--json`, validates the report and returns it with the exit code.
fn json(cmd: &mut Command) -> (i32, Value) {
    let out = cmd.arg("--json").output().unwrap();
    let code = out.status.code().expect("exited normally");
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    });
    let validator = schema();
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}\n{v:#}");
    assert_eq!(v["exit_code"].as_i64(), Some(code as i64));
    (code, v)
}

#[test]
fn canon_identity_application() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "idapp.stc", "(app (lam x x) false)\n");
    let (code, v) = json(stc().arg("canon").arg(&f));
    assert_eq!(code, 0);
    assert_eq!(v["items"][0]["tag"], false);
    assert_eq!(v["items"][0]["tracking_ok"], true);
}

#[test]
fn laws_at_size_two() {
    let (code, v) = json(stc().args(["laws", "--size", "2"]));
    assert_eq!(code, 0);
    assert!(v["laws"]["rules"].as_array().unwrap().len() >= 24);
}

#[test]
fn laws_rejects_oversized_bounds() {
    let (code, v) = json(stc().args(["laws", "--size", "9"]));
    assert_eq!(code, 2);
    assert_eq!(v["error"]["code"], "size");
}

#[test]
fn check_reports_not_a_function() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.stc", "(app true false)\n");
    let (code, v) = json(stc().arg("check").arg(&f));
    assert_eq!(code, 1);
    assert_eq!(v["items"][0]["error"]["code"], "not_a_function");
    let human = stc().arg("check").arg(&f).output().unwrap();
    assert!(String::from_utf8_lossy(&human.stdout).contains("not_a_function"));
}

#[test]
fn calf_reports_cost() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c.calf", "(bind (step (ret true)) (x (step (ret x))))\n");
    let (code, v) = json(stc().arg("calf").arg(&f));
    assert_eq!(code, 0);
    assert_eq!(v["items"][0]["cost"], 2);
    assert_eq!(v["items"][0]["tag"], true);
    assert_eq!(v["items"][0]["beh_witness_ok"], true);
}

#[test]
fn calf_rejects_non_returners() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.calf", "(the (-> bool (F bool)) (lam x (ret x)))\n");
    let (code, v) = json(stc().arg("calf").arg(&f));
    assert_eq!(code, 1);
    assert_eq!(v["items"][0]["error"]["code"], "expected_f_bool");
}

#[test]
fn parse_and_io_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.stc", "(app (lam x x)\n");
    let (code, v) = json(stc().arg("check").arg(&f));
    assert_eq!(code, 2);
    assert_eq!(v["items"][0]["error"]["code"], "parse");
    assert_eq!(v["items"][0]["error"]["line"], 1);
    let (code, _) = json(stc().arg("canon").arg(dir.path().join("missing.stc")));
    assert_eq!(code, 2);
    let bytes = dir.path().join("bin.stc");
    std::fs::write(&bytes, [0xff, 0xfe, 0x28]).unwrap();
    let (code, v) = json(stc().arg("check").arg(&bytes));
    assert_eq!(code, 2);
    assert_eq!(v["items"][0]["error"]["code"], "encoding");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["bogus"][..],
        &["check"],
        &["laws", "--size"],
        &["--fuel", "-3", "laws"],
        &["--jobs", "999", "laws"],
    ] {
        let out = stc().args(args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    assert_eq!(stc().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn trace_lists_witness_steps() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "t.stc", "(if (b bool) (app (lam x x) true) false true)\n");
    let (_, v) = json(stc().args(["canon", "--trace"]).arg(&f));
    let trace: Vec<&str> = v["items"][0]["trace"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap())
        .collect();
    assert!(trace.iter().any(|l| l.contains("if_beta1")), "{trace:?}");
    assert!(trace.iter().any(|l| l.contains("pi_beta")), "{trace:?}");
}

#[test]
fn fuel_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "f.stc",
        "(app (the (-> bool bool) (lam x (app (lam y y) x))) true)\n",
    );
    let (code, v) = json(stc().env("STC_FUEL", "2").arg("canon").arg(&f));
    assert_eq!(code, 1, "{v:#}");
    let (code, _) = json(stc().env("STC_FUEL", "2").args(["--fuel", "100000", "canon"]).arg(&f));
    assert_eq!(code, 0);
    let out = stc().env("STC_FUEL", "lots").arg("laws").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corpus_is_independent_of_jobs() {
    let run = |jobs: &str| {
        let (code, v) = json(stc().args(["corpus", "--jobs", jobs]).arg(root().join("corpus")));
        assert_eq!(code, 0, "{v:#}");
        (v["items"].clone(), v["summary"].clone())
    };
    let one = run("1");
    assert_eq!(run("2"), one);
    assert_eq!(run("8"), one);
    assert!(one.1["total"].as_u64().unwrap() >= 60);
}

#[test]
fn every_command_validates() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "m.stc",
        "true\n(the (-> bool bool) (lam x x))\n(app y true)\n",
    );
    let c = write(dir.path(), "m.calf", "(step (ret true))\n(ret y)\n(ret\n");
    for cmd in ["check", "canon", "calf"] {
        json(stc().arg(cmd).arg(&s).arg(&c));
    }
    json(stc().arg("corpus").arg(dir.path()));
    json(stc().args(["laws", "--size", "1", "--trace"]));
}
