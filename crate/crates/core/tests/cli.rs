use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_corner-blowup"))
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("corner-blowup-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> (i32, Value, String) {
    let Output { status, stdout, stderr } = bin().args(args).output().unwrap();
    let report = serde_json::from_slice(&stdout).unwrap_or(Value::Null);
    (status.code().unwrap(), report, String::from_utf8_lossy(&stderr).into_owned())
}

#[test]
fn close_two_axes() {
    let lattice = scratch("axes.json", r#"{"ambient": 2, "generators": [[[1, 0]], [[0, 1]]]}"#);
    let (code, report, _) = run(&["close", "--in", lattice.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(report["schema"], "corner-blowup/1");
    assert_eq!(report["size"], 3);
    assert_eq!(report["semilattice"]["members"].as_array().unwrap().len(), 3);
}

#[test]
fn limit_reports_signature() {
    let lattice = scratch("xaxis.json", r#"{"ambient": 2, "generators": [[["1", "0"]]]}"#);
    let curve = scratch("c.json", r#"{"coeffs": [[0, 5], [1, 0]]}"#);
    let (code, report, _) = run(&[
        "limit",
        "--curve",
        curve.to_str().unwrap(),
        "--lattice",
        lattice.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(report["signature"], serde_json::json!([0]));
    assert_eq!(report["components"][1]["kind"], "interior");
    assert_eq!(report["components"][1]["vec"][0].as_f64(), Some(5.0));
}

#[test]
fn signature_flags_incompatible_tuples() {
    let lattice = scratch("xaxis2.json", r#"{"ambient": 2, "generators": [[[1, 0]]]}"#);
    let good = scratch(
        "good.json",
        r#"{"components": [{"kind": "direction", "vec": [1, 0]}, {"kind": "interior", "vec": [5]}]}"#,
    );
    let bad = scratch(
        "bad.json",
        r#"{"components": [{"kind": "interior", "vec": [0, 1]}, {"kind": "interior", "vec": [2]}]}"#,
    );
    let l = lattice.to_str().unwrap();
    let (code, report, _) = run(&["signature", "--in", l, "--point", good.to_str().unwrap()]);
    assert_eq!((code, report["valid"].clone()), (0, Value::Bool(true)));
    let (code, report, _) = run(&["signature", "--in", l, "--point", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(report["violation"]["kind"], "quotient_mismatch");
}

#[test]
fn verify_order_example() {
    let (code, report, _) = run(&["verify-order", "--nbody", "N=2,d=1", "--curves", "100", "--seed", "7"]);
    assert_eq!(code, 0);
    assert!(report["max_deviation"].as_f64().unwrap() < 1e-9);
    assert_eq!(report["config"]["seed"], 7);
    assert_eq!(report["config"]["curves"], 100);
    assert_eq!(report["orderings"], 6);
    assert_eq!(report["pairs_checked"], 1500);
}

#[test]
fn nbody_file_shortcut_matches_flag() {
    let file = scratch("nb.json", r#"{"nbody": {"N": 3, "d": 1}}"#);
    let (_, a, _) = run(&["orderings", "--in", file.to_str().unwrap(), "--limit", "3"]);
    let (_, b, _) = run(&["orderings", "--nbody", "N=3,d=1", "--limit", "3"]);
    assert_eq!(a["count"], "10368000");
    assert_eq!(a["orderings"], b["orderings"]);
}

#[test]
fn reduce_by_center() {
    let (code, report, _) = run(&["reduce", "--nbody", "N=2,d=1", "--center", "1"]);
    assert_eq!(code, 0);
    assert_eq!(report["size_after"], 3);
    let (code, _, err) = run(&["reduce", "--nbody", "N=3,d=1", "--center", "13"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn malformed_input_exits_2_with_position() {
    let broken = scratch("broken.json", "{\"ambient\": 2,\n  \"generators\": [[[1, 0]]\n");
    let (code, _, err) = run(&["close", "--in", broken.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 3"), "{err}");
    let (code, _, _) = run(&["close", "--in", "/nonexistent/lattice.json"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["close", "--nbody", "N=1,d=1"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
}

#[test]
fn out_flag_writes_file() {
    let out = scratch("report.json", "");
    let (code, _, _) = run(&["nbody", "--nbody", "N=2,d=1", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["size"], 4);
    assert_eq!(report["clean"], true);
    assert_eq!(report["permutation_invariant"], true);
}
