use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qop")).args(args).env_remove("QOP_TOL").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn jordan(dir: &TempDir) -> String {
    write(dir, "jordan.json", r#"{"rows":2,"cols":2,"entries":[[[0,0,0,0],[1,0,0,0]],[[0,0,0,0],[0,0,0,0]]]}"#)
}

fn generated(dir: &TempDir, kind: &str, dim: &str) -> String {
    let path = dir.path().join(format!("{kind}.json"));
    let out = qop(&["gen", kind, "--dim", dim, "--seed", "3", "-o", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path.to_str().unwrap().to_string()
}

#[test]
fn gen_writes_matrix_json() {
    let dir = TempDir::new().unwrap();
    let path = generated(&dir, "hermitian", "3");
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["rows"], 3);
    assert_eq!(v["cols"], 3);
    assert_eq!(v["entries"][1][2].as_array().unwrap().len(), 4);
    let pair = generated(&dir, "ordered-pair", "2");
    let v: Value = serde_json::from_str(&fs::read_to_string(pair).unwrap()).unwrap();
    assert!(v["A"].is_object() && v["B"].is_object());
}

#[test]
fn gen_is_seeded() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        assert!(qop(&["gen", "ginibre", "--dim", "4", "--seed", "11", "-o", p.to_str().unwrap()]).status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn polar_output_shape() {
    let dir = TempDir::new().unwrap();
    let out = qop(&["polar", &jordan(&dir)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["rank"], 1);
    assert_eq!(v["U"]["entries"][0][1][0].as_f64().unwrap(), 1.0);
    assert_eq!(v["absT"]["rows"], 2);
}

#[test]
fn transform_kinds() {
    let dir = TempDir::new().unwrap();
    let file = generated(&dir, "ginibre", "3");
    for kind in ["aluthge", "duggal", "lambda:0.25", "sr:0.5"] {
        let out = qop(&["transform", "--kind", kind, &file]);
        assert_eq!(out.status.code(), Some(0), "{kind}");
        assert_eq!(json(&out)["rows"], 3);
    }
    let out = qop(&["transform", "--kind", "lambda:2", &file]);
    assert_eq!(out.status.code(), Some(2));
    let out = qop(&["transform", "--kind", "bogus", &file]);
    assert_eq!(out.status.code(), Some(2));
    let out = json(&qop(&["transform", "--kind", "aluthge", &jordan(&dir)]));
    for row in out["entries"].as_array().unwrap() {
        for q in row.as_array().unwrap() {
            assert!(q.as_array().unwrap().iter().all(|x| x.as_f64().unwrap().abs() <= 1e-12));
        }
    }
}

#[test]
fn spectrum_output_shape() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "d.json", r#"{"rows":2,"cols":2,"entries":[[[0,1,0,0],[0,0,0,0]],[[0,0,0,0],[2,0,0,0]]]}"#);
    let v = json(&qop(&["spectrum", &file]));
    let classes = v["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 2);
    let c0: Vec<f64> = classes[0].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(c0[0].abs() < 1e-10 && (c0[1] - 1.0).abs() < 1e-10);
    assert!((v["radius"].as_f64().unwrap() - 2.0).abs() < 1e-10);
}

#[test]
fn classify_jordan_block() {
    let dir = TempDir::new().unwrap();
    let v = json(&qop(&["classify", &jordan(&dir), "--p", "0.5"]));
    assert_eq!(v["normal"]["holds"], false);
    assert_eq!(v["gcsi"]["certified_nonmember"], true);
    assert!(v["paranormal"]["value"].as_f64().unwrap() < 0.0);
    assert!(v["p_hyponormal"]["margin"]["value"].as_f64().unwrap() < 0.0);
}

#[test]
fn tolerance_flag_and_env() {
    let dir = TempDir::new().unwrap();
    let file = generated(&dir, "unitary", "3");
    let base = json(&qop(&["classify", &file]));
    assert_eq!(base["unitary"]["holds"], true);
    let flag = json(&qop(&["classify", &file, "--tol", "0.5"]));
    let env = Command::new(env!("CARGO_BIN_EXE_qop")).args(["classify", &file]).env("QOP_TOL", "0.5").output().unwrap();
    let env = json(&env);
    assert_eq!(flag["threshold"], env["threshold"]);
    assert_ne!(flag["threshold"], base["threshold"]);
}

#[test]
fn input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let nan = write(&dir, "nan.json", r#"{"rows":1,"cols":1,"entries":[[[NaN,0,0,0]]]}"#);
    let big = write(&dir, "inf.json", r#"{"rows":1,"cols":1,"entries":[[[1e999,0,0,0]]]}"#);
    let ragged = write(&dir, "ragged.json", r#"{"rows":2,"cols":2,"entries":[[[1,0,0,0]],[[0,0,0,0],[1,0,0,0]]]}"#);
    let rect = write(&dir, "rect.json", r#"{"rows":1,"cols":2,"entries":[[[1,0,0,0],[1,0,0,0]]]}"#);
    for file in [&nan, &big, &ragged] {
        let out = qop(&["spectrum", file]);
        assert_eq!(out.status.code(), Some(2), "{file}");
        assert!(out.stdout.is_empty());
    }
    assert_eq!(qop(&["polar", &rect]).status.code(), Some(2));
    assert_eq!(qop(&["polar", Path::new("/nonexistent/x.json").to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(qop(&["verify", "no-such-property"]).status.code(), Some(2));
    assert_eq!(qop(&["verify", "furuta", "--dim", "9"]).status.code(), Some(2));
    assert_eq!(qop(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_passes_and_probe_violates() {
    let out = qop(&["verify", "lowner-heinz", "--trials", "20", "--seed", "5", "--dim", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["per_trial"].as_array().unwrap().len(), 20);
    assert!(v.get("witness").is_none());

    let out = qop(&["verify", "lowner-heinz", "--trials", "20", "--seed", "5", "--dim", "3", "--probe"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert!(v["min_margin"].as_f64().unwrap() < -1e-8);
    assert!(v["witness"]["instance"]["matrices"].is_array());
}

#[test]
fn fuzz_shrinks_and_is_deterministic() {
    let args = ["fuzz", "kernel-reduction", "--budget", "10", "--seed", "2", "--probe"];
    let a = qop(&args);
    let b = qop(&args);
    assert_eq!(a.status.code(), Some(1));
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a)["witness"]["minimized"].is_object());
    let out = qop(&["fuzz", "collapse", "--budget", "30", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(0));
}
