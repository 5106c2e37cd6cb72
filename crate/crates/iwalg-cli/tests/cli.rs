use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::Command;

fn iwalg(args: &[&str], file: &Path) -> (i32, Value) {
    iwalg_env(args, file, None)
}

fn iwalg_env(args: &[&str], file: &Path, seed: Option<&str>) -> (i32, Value) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_iwalg"));
    cmd.args(args).arg(file).arg("--json").env_remove("IWALG_SEED");
    if let Some(s) = seed {
        cmd.env("IWALG_SEED", s);
    }
    let out = cmd.output().unwrap();
    let code = out.status.code().unwrap();
    let v = if out.stdout.is_empty() { Value::Null } else { serde_json::from_slice(&out.stdout).unwrap() };
    (code, v)
}

fn doc(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const LAMBDA_MOD_P: &str = "ring p=3 vars=1 mode=abelian\nmodule M rank=1\nrel : [p]\n";

#[test]
fn invariants_of_lambda_mod_p() {
    let dir = tempfile::tempdir().unwrap();
    let f = doc(&dir, "m.iwm", LAMBDA_MOD_P);
    let (code, v) = iwalg(&["invariants"], &f);
    assert_eq!(code, 0);
    let r = &v["results"];
    assert_eq!(r["delta"], 1);
    assert_eq!(r["j"], 1);
    assert_eq!(r["pd"], 1);
    assert_eq!(r["depth"], 1);
    assert_eq!(r["mu"], 1);
    assert_eq!(r["torsion"], true);
    assert_eq!(r["pseudo_null"], false);
    assert_eq!(v["certification"], "certified");
    assert_eq!(v["module"], "M");
    assert_eq!(v["precision"], serde_json::json!({"N": 8, "a": 4}));
}

#[test]
fn decompose_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let f = doc(&dir, "m.iwm", "ring p=3 vars=1 mode=abelian\nmodule M rank=2\nrel : [p, 0]\nrel : [0, p^3]\n");
    let (code, v) = iwalg(&["decompose"], &f);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["exponents"], serde_json::json!([1, 3]));
    assert_eq!(v["results"]["mu"], 4);
}

#[test]
fn ext_of_lambda_mod_p2() {
    let dir = tempfile::tempdir().unwrap();
    let f = doc(&dir, "m.iwm", "ring p=3 vars=2 mode=abelian\nmodule M rank=1\nrel : [p^2]\n");
    let (code, v) = iwalg(&["ext", "--i", "1"], &f);
    assert_eq!(code, 0);
    let r = &v["results"];
    assert_eq!(r["cyclic"], true);
    assert_eq!(r["annihilator"], serde_json::json!(["p^2"]));
    assert_eq!(r["mu"], 2);
    assert_eq!(r["delta"], 2);
}

#[test]
fn resolve_and_mu() {
    let dir = tempfile::tempdir().unwrap();
    let f = doc(&dir, "k.iwm", "ring p=5 vars=2 mode=abelian\nmodule k rank=1\nrel : [p]\nrel : [b1]\nrel : [b2]\n");
    let (code, v) = iwalg(&["resolve", "--length", "5"], &f);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["betti"], serde_json::json!([1, 3, 3, 1]));
    assert_eq!(v["results"]["pd"], 3);
    assert_eq!(v["results"]["minimal"], true);
    let (code, v) = iwalg(&["mu"], &f);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["mu"], 0);
}

#[test]
fn info_simplifies() {
    let dir = tempfile::tempdir().unwrap();
    let f = doc(&dir, "m.iwm", "ring p=3 vars=1 mode=abelian\nmodule M rank=2\nrel : [1 + b1, p]\n");
    let (code, v) = iwalg(&["info"], &f);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["min_generators"], 1);
    assert_eq!(v["results"]["rank"], 1);
}

#[test]
fn precision_flags_override_header() {
    let dir = tempfile::tempdir().unwrap();
    let f = doc(&dir, "m.iwm", "ring p=3 vars=1 mode=abelian\nprec a=3 N=5\nmodule M rank=1\nrel : [p]\n");
    let (_, v) = iwalg(&["mu"], &f);
    assert_eq!(v["precision"], serde_json::json!({"N": 5, "a": 3}));
    let (_, v) = iwalg(&["mu", "--prec-p", "6", "--prec-deg", "9"], &f);
    assert_eq!(v["precision"], serde_json::json!({"N": 9, "a": 6}));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = doc(&dir, "m.iwm", LAMBDA_MOD_P);
    let target = dir.path().join("report.json");
    let status = Command::new(env!("CARGO_BIN_EXE_iwalg"))
        .args(["mu", "--json", "--out"])
        .arg(&target)
        .arg(&f)
        .output()
        .unwrap();
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(v["results"]["mu"], 1);
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let f = doc(&dir, "m.iwm", LAMBDA_MOD_P);
    let args = ["verify", "--suite", "auslander", "--trials", "3"];
    let (_, from_env) = iwalg_env(&args, &f, Some("99"));
    let (_, from_flag) = iwalg(&[&args[..], &["--seed", "99"]].concat(), &f);
    assert_eq!(from_env, from_flag);
    let (code, v) = iwalg_env(&args, &f, Some("not-a-number"));
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "validation_error");
}

#[test]
fn oracle_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let f = doc(&dir, "m.iwm", "ring p=3 vars=3 mode=abelian\nprec a=3 N=4\n");
    let (code, v) = iwalg(&["oracle-check", "--trials", "8"], &f);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["results"]["passed"], true);
}

#[test]
fn corpus_suite_runs() {
    let dir = tempfile::tempdir().unwrap();
    let f = doc(&dir, "m.iwm", "ring p=3 vars=1 mode=abelian\n");
    let (code, v) = iwalg(&["verify", "--suite", "corpus", "--trials", "2", "--seed", "5"], &f);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["results"]["audits"].as_array().unwrap().len(), 4);
}

#[test]
fn errors_are_structured() {
    let dir = tempfile::tempdir().unwrap();
    let f = doc(&dir, "bad.iwm", "ring p=3 vars=1 mode=abelian\nmodule M rank=1\nrel : [p * ]\n");
    let (code, v) = iwalg(&["info"], &f);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "parse_error");
    assert_eq!(v["error"]["line"], 3);
    let f = doc(&dir, "p4.iwm", "ring p=4 vars=1 mode=abelian\n");
    let (_, v) = iwalg(&["info"], &f);
    assert!(v["error"]["message"].as_str().unwrap().contains("p must be an odd prime"));
    let (code, v) = iwalg(&["verify", "--suite", "nope"], &doc(&dir, "m.iwm", LAMBDA_MOD_P));
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "validation_error");
}

// Known to blow past the coefficient cap in the nested Ext recursion.
#[test]
fn coefficient_swell_is_a_step_budget_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = doc(
        &dir,
        "swell.iwm",
        "ring p=3 vars=2 mode=abelian\nmodule M rank=3\n\
         rel : [p^2 + 5*b1*b2, 0, 0]\nrel : [0, p + b2^2, 0]\nrel : [p^2*b1 + 5*b2^2, 4*b1, 0]\n",
    );
    let (code, v) = iwalg(&["filtration"], &f);
    assert_eq!(code, 1, "{v}");
    assert_eq!(v["error"]["kind"], "step_budget");
    let (code, _) = iwalg(&["invariants"], &f);
    assert_eq!(code, 0);
}

#[test]
fn rules_mode_with_user_rule() {
    let dir = tempfile::tempdir().unwrap();
    // b2 b1 = b1 b2 + p^3 b1: extra-powerful, exact
    let f = doc(&dir, "r.iwm", "ring p=3 vars=2 mode=rules\nrule 2 1 : p^3*b1\nmodule M rank=1\nrel : [p]\n");
    let (code, v) = iwalg(&["invariants"], &f);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["results"]["delta"], 2);
    assert_eq!(v["certification"], "heuristic");
    let weak = doc(&dir, "w.iwm", "ring p=3 vars=2 mode=rules\nrule 2 1 : b1\nmodule M rank=1\n");
    let (code, v) = iwalg(&["invariants"], &weak);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "invalid_ring");
}
