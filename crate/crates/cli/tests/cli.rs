use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn geomeas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geomeas"))
        .args(args)
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn gm_of_named_states() {
    let out = geomeas(&["gm", "--named", "ghz3"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert!((v["lambda_sq"].as_f64().unwrap() - 0.5).abs() < 1e-10);
    for key in ["seed", "restarts", "tol", "version"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }

    let v = json_of(&geomeas(&["gm", "--named", "w3"]));
    assert!((v["measure"].as_f64().unwrap() - 5.0 / 9.0).abs() < 1e-10);

    let v = json_of(&geomeas(&["gm", "--named", "w3", "--symmetric"]));
    assert!((v["lambda_sq"].as_f64().unwrap() - 4.0 / 9.0).abs() < 1e-10);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"dims\": [2,");
    assert_eq!(geomeas(&["schmidt", &bad]).status.code(), Some(2));
    assert_eq!(geomeas(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(geomeas(&["gm", "--bogus-flag"]).status.code(), Some(2));
    assert_eq!(geomeas(&["gm", "--named", "nope7"]).status.code(), Some(2));
    let out = geomeas(&["gm"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn non_convergence_exits_with_three() {
    let out = geomeas(&["gm", "--named", "w3", "--max-iters", "2", "--restarts", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json_of(&out)["converged"], Value::Bool(false));
}

#[test]
fn schmidt_from_file_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "w.json", r#"{"dims":[2,2,2],"data":[[0,0],[1,0],[1,0],[0,0],[1,0],[0,0],[0,0],[0,0]]}"#);
    let v = json_of(&geomeas(&["schmidt", &f, "--cut", "0"]));
    let c: Vec<f64> = v["coefficients"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((c[0] - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
    let out = geomeas(&["schmidt", &f, "--cut", "0,1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("index,coefficient\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn z_eigen_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut data = vec!["[0,0]"; 16];
    data[0] = "[3,0]";
    data[15] = "[1,0]";
    let f = write(dir.path(), "t.json", &format!(r#"{{"dims":[2,2,2,2],"data":[{}]}}"#, data.join(",")));
    let v = json_of(&geomeas(&["eigen", &f, "--kind", "z", "--starts", "50"]));
    let lambdas: Vec<f64> = v["pairs"].as_array().unwrap().iter().map(|p| p["lambda"].as_f64().unwrap()).collect();
    for want in [3.0, 1.0, 0.75] {
        assert!(lambdas.iter().any(|l| (l - want).abs() < 1e-9), "{lambdas:?}");
    }
    assert_eq!(geomeas(&["eigen", "--named", "w3", "--kind", "h"]).status.code(), Some(2));
}

#[test]
fn written_state_reparses_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("state.json");
    let out = geomeas(&[
        "search",
        "--dims",
        "2,2",
        "--steps",
        "20",
        "--save-state",
        saved.to_str().unwrap(),
    ]);
    assert!(out.status.code() == Some(0) || out.status.code() == Some(3));
    let reported = json_of(&out)["state"].clone();
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&saved).unwrap()).unwrap();
    assert_eq!(reported, file);
    let report = json_of(&geomeas(&["schmidt", saved.to_str().unwrap()]));
    assert!(report["rank"].as_u64().unwrap() >= 1);
    let a = file["data"].as_array().unwrap();
    let b = reported["data"].as_array().unwrap();
    for (x, y) in a.iter().zip(b) {
        for k in 0..2 {
            assert_eq!(x[k].as_f64().unwrap().to_bits(), y[k].as_f64().unwrap().to_bits());
        }
    }
}

#[test]
fn sample_csv_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("s.csv");
    let out = geomeas(&[
        "sample",
        "--qubits",
        "2",
        "--samples",
        "5",
        "--restarts",
        "2",
        "--format",
        "csv",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("index,lambda_sq\n"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn mixed_and_demo_commands() {
    let dir = tempfile::tempdir().unwrap();
    let bell = write(dir.path(), "bell.json", r#"{"dims":[2,2],"data":[[1,0],[0,0],[0,0],[1,0]]}"#);
    let zero = write(dir.path(), "zero.json", r#"{"dims":[2,2],"data":[[1,0],[0,0],[0,0],[0,0]]}"#);
    let one = write(dir.path(), "one.json", r#"{"dims":[2,2],"data":[[0,0],[0,0],[0,0],[1,0]]}"#);

    let v = json_of(&geomeas(&["mixed", "gm2q", &bell]));
    assert!((v["results"][0]["measure"].as_f64().unwrap() - 0.5).abs() < 1e-7);

    let v = json_of(&geomeas(&["mixed", "fidelity", &bell, &zero]));
    assert!((v["fidelity"].as_f64().unwrap() - 0.5).abs() < 1e-9);

    let v = json_of(&geomeas(&["mixed", "discriminate", &zero, &one, "--restarts", "2"]));
    assert_eq!(v["feasible"], Value::Bool(true));
    assert!((v["sum_inv"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(geomeas(&["mixed", "discriminate", &zero, &bell]).status.code(), Some(2));

    let v = json_of(&geomeas(&["mixed", "legendre", &bell, "--w", "0.5", "--grid-points", "5", "--restarts", "1"]));
    assert!(v["bound"].as_f64().unwrap() <= 1e-6);

    let v = json_of(&geomeas(&["demo", "w-rank2", "--eps-list", "0.1,0.0001"]));
    let points = v["points"].as_array().unwrap();
    assert!(points[1]["overlap"].as_f64().unwrap() > 0.9999);
}

#[test]
fn ppt_bound_command() {
    let v = json_of(&geomeas(&["ppt-bound", "--named", "ghz3"]));
    assert!((v["upper_bound"].as_f64().unwrap() - 0.5).abs() < 1e-4);
    assert_eq!(geomeas(&["ppt-bound", "--named", "ghz7"]).status.code(), Some(2));
}
