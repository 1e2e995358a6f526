use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coarsegrain"))
}

fn write_spec(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout_json(o: &Output) -> Value {
    assert_eq!(code(o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

const DOUBLING: &str = r#"{
  "map": {"name": "doubling"},
  "sample": {"kind": "grid", "size": 65536},
  "partitions": [{"name": "half", "kind": "boundaries", "coordinate": 0, "cuts": [0.5]}],
  "horizon": 10
}"#;

const PARITY_VALUE: &str = r#"{
  "map": {"name": "identity"},
  "sample": {"kind": "discrete", "size": 4},
  "partitions": [
    {"name": "parity", "kind": "exact", "observable": {"modulo": {"coordinate": 0, "modulus": 2}}},
    {"name": "value", "kind": "exact", "observable": {"floor-div": {"coordinate": 0, "divisor": 2}}}
  ],
  "horizon": 1
}"#;

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn refine_doubling_is_dyadic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "d.json", DOUBLING);
    let o = run(&["refine", "--spec", p(&spec), "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# coarsegrain "));
    assert_eq!(lines.next().unwrap(), "t,cells,max_diameter");
    for (t, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[0].parse::<usize>().unwrap(), t);
        assert_eq!(f[1].parse::<usize>().unwrap(), 2 << t);
        assert_eq!(f[2].parse::<f64>().unwrap(), 0.5f64.powi(t as i32 + 1));
    }
    let v = stdout_json(&run(&["refine", "--spec", p(&spec)]));
    assert_eq!(v["refinement"]["verdict"], "generating-numerically");
    assert_eq!(v["spec_sha256"].as_str().unwrap().len(), 64);
    assert!(v["tool"].as_str().unwrap().starts_with("coarsegrain "));
}

#[test]
fn spec_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let malformed = write_spec(dir.path(), "m.json", "{\"map\": ");
    assert_eq!(code(&run(&["refine", "--spec", p(&malformed)])), 2);
    let zero = write_spec(dir.path(), "z.json", &DOUBLING.replace("\"horizon\": 10", "\"horizon\": 0"));
    assert_eq!(code(&run(&["refine", "--spec", p(&zero)])), 2);
    let d = write_spec(dir.path(), "d.json", DOUBLING);
    assert_eq!(code(&run(&["refine", "--spec", p(&d), "--horizon", "0"])), 2);
    assert_eq!(code(&run(&["classify", "--spec", p(&d)])), 2);
    assert_eq!(code(&run(&["entropy", "--spec", p(&d), "--horizon", "1"])), 2);
    assert_eq!(code(&run(&["refine", "--spec", p(&dir.path().join("missing.json"))])), 2);
    let pv = write_spec(dir.path(), "pv.json", PARITY_VALUE);
    assert_eq!(code(&run(&["refine", "--spec", p(&pv)])), 2);
    let unknown = write_spec(dir.path(), "u.json", &DOUBLING.replace("doubling", "nonesuch"));
    assert_eq!(code(&run(&["refine", "--spec", p(&unknown)])), 2);
    assert_eq!(code(&run(&["lattice"])), 2);
    let o = run(&["refine", "--spec", p(&malformed)]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error:"));
}

#[test]
fn computation_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "nl.json",
        r#"{
  "map": {"name": "identity"},
  "sample": {"kind": "discrete", "size": 6},
  "partitions": [
    {"name": "f", "kind": "cells", "cells": [{"members": [0, 1]}, {"members": [2, 3]}, {"members": [4, 5]}]},
    {"name": "g", "kind": "cells", "cells": [{"members": [0, 2]}, {"members": [1, 4]}, {"members": [3, 5]}]}
  ],
  "horizon": 1
}"#,
    );
    let o = run(&["lattice", "--spec", p(&spec)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no unique"));

    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = blocker.join("sub");
    assert_eq!(code(&run(&["lattice", "--builtin", "o6", "--out", p(&out)])), 3);
}

#[test]
fn classify_examples() {
    let dir = tempfile::tempdir().unwrap();
    let two = DOUBLING.replace(
        r#"[{"name": "half", "kind": "boundaries", "coordinate": 0, "cuts": [0.5]}]"#,
        r#"[{"name": "a", "kind": "boundaries", "coordinate": 0, "cuts": [0.5]},
            {"name": "b", "kind": "boundaries", "coordinate": 0, "cuts": [0.5]}]"#,
    );
    let spec = write_spec(dir.path(), "two.json", &two);
    let v = stdout_json(&run(&["classify", "--spec", p(&spec)]));
    assert_eq!(v["classification"]["verdict"], "compatible");
    assert_eq!(v["classification"]["partitions"], serde_json::json!(["a", "b"]));

    let osc = write_spec(
        dir.path(),
        "osc.json",
        r#"{
  "map": {"name": "oscillator", "params": {"angle": 0.3819660112501051}},
  "sample": {"kind": "grid", "size": 1024},
  "partitions": [
    {"name": "position", "kind": "bins", "observable": {"coordinate": {"coordinate": 0}}, "bins": 2},
    {"name": "momentum", "kind": "bins", "observable": {"coordinate": {"coordinate": 1}}, "bins": 2}
  ],
  "horizon": 12
}"#,
    );
    let v = stdout_json(&run(&["classify", "--spec", p(&osc)]));
    assert_ne!(v["classification"]["verdict"], "compatible");

    let pv = write_spec(dir.path(), "pv.json", PARITY_VALUE);
    let v = stdout_json(&run(&["classify", "--spec", p(&pv)]));
    assert_eq!(v["classification"]["verdict"], "complementary");
    assert_eq!(v["classification"]["coarsening_trivial"], true);
}

#[test]
fn lattice_builtins() {
    let v = stdout_json(&run(&["lattice", "--builtin", "firefly"]));
    assert_eq!(v["lattice"]["elements"].as_array().unwrap().len(), 12);
    assert_eq!(v["laws"]["orthomodular"], true);
    assert_eq!(v["laws"]["distributive"], false);
    assert_eq!(v["laws"]["distributivity_witness_labels"], serde_json::json!(["L", "F", "B"]));

    let v = stdout_json(&run(&["lattice", "--builtin", "o6"]));
    assert_eq!(v["laws"]["orthomodular"], false);

    let o = run(&["lattice", "--builtin", "mo2", "--format", "dot"]);
    assert_eq!(code(&o), 0);
    let dot = String::from_utf8(o.stdout).unwrap();
    assert!(dot.starts_with("// coarsegrain "));
    assert_eq!(dot.matches("->").count(), 8);
}

#[test]
fn lattice_from_parity_value_spec_is_mo2() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "pv.json", PARITY_VALUE);
    let out = dir.path().join("out");
    let o = run(&["lattice", "--spec", p(&spec), "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let laws: Value = serde_json::from_str(&std::fs::read_to_string(out.join("laws.json")).unwrap()).unwrap();
    assert_eq!(laws["laws"]["size"], 6);
    assert_eq!(laws["laws"]["distributive"], false);
    assert_eq!(laws["laws"]["orthomodular"], true);
    assert!(out.join("lattice.json").exists());
    assert!(out.join("hasse.dot").exists());
}

#[test]
fn entropy_examples() {
    let dir = tempfile::tempdir().unwrap();
    let family = DOUBLING.replace(
        r#"[{"name": "half", "kind": "boundaries", "coordinate": 0, "cuts": [0.5]}]"#,
        r#"[{"name": "half", "kind": "boundaries", "coordinate": 0, "cuts": [0.5]},
            {"name": "skew", "kind": "boundaries", "coordinate": 0, "cuts": [0.6]}]"#,
    );
    let spec = write_spec(dir.path(), "f.json", &family);
    let o = run(&["entropy", "--spec", p(&spec)]);
    let v = stdout_json(&o);
    let summary = &v["entropy"]["summary"];
    assert_eq!(summary["partition"], "half");
    assert!((summary["estimate"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-9);
    assert_eq!(v["entropy"]["reports"].as_array().unwrap().len(), 2);
    assert!(o.stderr.is_empty());

    let trivial = write_spec(
        dir.path(),
        "t.json",
        &DOUBLING.replace(r#""kind": "boundaries", "coordinate": 0, "cuts": [0.5]"#, r#""kind": "trivial""#),
    );
    let v = stdout_json(&run(&["entropy", "--spec", p(&trivial)]));
    assert_eq!(v["entropy"]["summary"]["estimate"], 0.0);

    let saturated = write_spec(
        dir.path(),
        "s.json",
        &DOUBLING
            .replace(r#""kind": "boundaries", "coordinate": 0, "cuts": [0.5]"#, r#""kind": "identity""#)
            .replace("65536", "1024")
            .replace("\"horizon\": 10", "\"horizon\": 3"),
    );
    let o = run(&["entropy", "--spec", p(&saturated)]);
    let v = stdout_json(&o);
    assert_eq!(v["entropy"]["reports"][0]["saturation_flag"], true);
    assert_eq!(v["entropy"]["summary"]["all_saturated"], true);
    assert_eq!(v["entropy"]["warnings"].as_array().unwrap().len(), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning:"));
}

#[test]
fn spec_outputs_select_and_place_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let with_outputs = DOUBLING
        .replace(
            r#"[{"name": "half", "kind": "boundaries", "coordinate": 0, "cuts": [0.5]}]"#,
            r#"[{"name": "half", "kind": "boundaries", "coordinate": 0, "cuts": [0.5]},
                {"name": "quarters", "kind": "bins", "observable": {"coordinate": {"coordinate": 0}}, "bins": 4}]"#,
        )
        .replace(
            "\"horizon\": 10",
            r#""horizon": 4,
  "outputs": [
    {"artifact": "transition-csv", "path": "t/{partition}.csv"},
    {"artifact": "entropy-json", "path": "summary.json"}
  ]"#,
        );
    let spec = write_spec(dir.path(), "o.json", &with_outputs);
    let out = dir.path().join("out");
    assert_eq!(code(&run(&["entropy", "--spec", p(&spec), "--out", p(&out)])), 0);
    let mut files: Vec<String> = walk(&out);
    files.sort();
    assert_eq!(files, ["summary.json", "t/half.csv", "t/quarters.csv"]);
    let half = std::fs::read_to_string(out.join("t/half.csv")).unwrap();
    assert!(half.contains("\n\"[-inf,0.5)\",0.500000000000,0.500000000000\n"));
}

fn walk(root: &Path) -> Vec<String> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.push(path.strip_prefix(root).unwrap().to_string_lossy().into_owned());
            }
        }
    }
    out
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "traj.json",
        r#"{
  "map": {"name": "logistic", "params": {"r": 4}},
  "sample": {"kind": "trajectory", "size": 20000, "seed": 11},
  "partitions": [
    {"name": "half", "kind": "boundaries", "coordinate": 0, "cuts": [0.5]},
    {"name": "bins", "kind": "bins", "observable": {"coordinate": {"coordinate": 0}}, "bins": 3}
  ],
  "horizon": 6
}"#,
    );
    for cmd in ["entropy", "classify"] {
        let a = dir.path().join(format!("{cmd}-a"));
        let b = dir.path().join(format!("{cmd}-b"));
        for (out, threads) in [(&a, "1"), (&b, "4")] {
            let o = run(&[cmd, "--spec", p(&spec), "--out", p(out), "--threads", threads]);
            assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        }
        let files = walk(&a);
        assert!(!files.is_empty());
        for f in files {
            assert_eq!(std::fs::read(a.join(&f)).unwrap(), std::fs::read(b.join(&f)).unwrap(), "{f}");
        }
    }
}

#[test]
fn version_and_systems() {
    let o = run(&["--version"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains(env!("CARGO_PKG_VERSION")));
    let v: Value = serde_json::from_slice(&run(&["systems"]).stdout).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|m| m["name"].as_str().unwrap()).collect();
    for m in ["doubling", "tent", "logistic", "baker", "rotation", "oscillator"] {
        assert!(names.contains(&m), "{m}");
    }
}
