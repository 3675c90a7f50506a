//! End-to-end runs of the `qcnt` binary.
//!
//! Golden files live in `tests/golden`; regenerate with `QCNT_BLESS=1`.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qcnt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcnt")).args(args).output().expect("spawn qcnt")
}

fn stdout(args: &[&str]) -> String {
    let out = qcnt(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn golden(name: &str, args: &[&str]) {
    let got = stdout(args);
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("QCNT_BLESS").is_some() {
        std::fs::write(&path, &got).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {name}"));
    assert_eq!(got, want, "{name} differs from golden output");
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

/// Rebuilds an argument list from an embedded config block.
fn argv_from_config(command: &str, config: &Value) -> Vec<String> {
    let mut argv = vec![command.to_string()];
    for (k, v) in config.as_object().unwrap() {
        match v {
            Value::Bool(true) => argv.push(format!("--{k}")),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => argv.push(format!("--{k}={s}")),
            other => argv.push(format!("--{k}={other}")),
        }
    }
    argv
}

#[test]
fn closed_golden_ring_up_to_five() {
    let csv = stdout(&["modelset", "--d", "5", "--x", "0", "--closed", "--range", "5"]);
    let rows = data_rows(&csv);
    let keys: Vec<(i64, i64)> = rows
        .iter()
        .map(|r| {
            let f: Vec<&str> = r.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect();
    // 1, φ, φ² = 1 + φ, φ³ = 1 + 2φ
    assert_eq!(keys, vec![(1, 0), (0, 1), (1, 1), (1, 2)]);
}

#[test]
fn golden_outputs() {
    golden("modelset_closed.csv", &["modelset", "--d", "5", "--x", "0", "--closed", "--range", "5"]);
    golden("field_d13.json", &["field", "--d", "13"]);
    golden("modelset_quarter.json", &["modelset", "--x", "1/4", "--range", "12", "--signed", "--format", "json"]);
    golden("zeta_lattice.json", &["zeta", "--lattice", "1", "--s", "2", "--method", "direct", "--range", "1000"]);
    golden("curve_short.csv", &["curve", "--range", "500", "--x-max", "2", "--samples", "9", "--format", "csv"]);
}

#[test]
fn zeta_direct_is_rigorous() {
    let v = json(&["zeta", "--d", "5", "--x", "0", "--s", "4", "--method", "direct"]);
    assert_eq!(v["schema"], "qcnt/1");
    let r = &v["result"];
    assert_eq!(r["rigorous"], true);
    assert_eq!(r["method"], "direct");
    assert!(r["error_bound"].as_f64().unwrap() < 1e-10);
    for key in ["s", "value_re", "value_im", "cutoff"] {
        assert!(!r[key].is_null(), "missing {key}");
    }
}

#[test]
fn pink_distances_decrease() {
    let v = json(&["pink", "--d", "5", "--x", "0", "--m-max", "8"]);
    let d: Vec<f64> = v["result"]["set_distances"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(d.len(), 9);
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
}

#[test]
fn jqt_reports_pairs_and_target() {
    let v = json(&["jqt", "--m-max", "4", "--n-max", "20000"]);
    let r = &v["result"];
    assert_eq!(r["pairs"].as_array().unwrap().len(), 4);
    assert!((r["target"].as_f64().unwrap() - 0.668_436).abs() < 1e-5);
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [
        &["trig", "--what", "zeros", "--zeros", "20"][..],
        &["lambda", "--x", "-3", "--s", "2"][..],
        &["curve", "--range", "500", "--x-max", "3", "--samples", "50"][..],
    ] {
        assert_eq!(stdout(args), stdout(args), "{args:?}");
    }
}

#[test]
fn config_block_reruns_to_same_result() {
    for args in [
        &["zeta", "--x", "-1/2", "--s", "3", "--range", "2000"][..],
        &["theta-check", "--x", "-3", "--t", "0.5"][..],
        &["j", "--closed", "--range", "5000"][..],
        &["trig", "--at", "0.25,-1.5", "--range", "1000"][..],
        &["pink", "--mode", "value", "--m-max", "3", "--n-max", "5000"][..],
    ] {
        let first = json(args);
        let argv = argv_from_config(first["command"].as_str().unwrap(), &first["config"]);
        let refs: Vec<&str> = argv.iter().map(String::as_str).collect();
        assert_eq!(json(&refs), first, "{argv:?}");
    }
}

#[test]
fn svg_is_a_single_polyline() {
    let svg = stdout(&["curve", "--range", "500", "--x-max", "3", "--samples", "40"]);
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 1);
    assert!(svg.contains("viewBox"));
}

fn failure(args: &[&str]) -> (i32, Value) {
    let out = qcnt(args);
    let code = out.status.code().unwrap();
    let err = String::from_utf8(out.stderr).unwrap();
    let last = err.lines().last().unwrap_or_default();
    (code, serde_json::from_str(last).unwrap_or_else(|_| panic!("no JSON diagnostic in {err:?}")))
}

#[test]
fn exit_codes() {
    let (code, v) = failure(&["modelset", "--no-such-flag"]);
    assert_eq!((code, v["error"].as_str()), (2, Some("usage")));
    let (code, _) = failure(&["modelset", "--x", "0.25"]);
    assert_eq!(code, 2);
    let (code, v) = failure(&["zeta", "--s", "0.5", "--method", "direct"]);
    assert_eq!((code, v["error"].as_str()), (2, Some("domain")));
    let (code, v) = failure(&["field", "--d", "4"]);
    assert_eq!((code, v["error"].as_str()), (2, Some("invalid-input")));
    let (code, v) = failure(&["trig", "--what", "pi", "--zeros", "300"]);
    assert_eq!((code, v["error"].as_str()), (3, Some("accuracy")));
    assert_eq!(v["schema"], "qcnt/1");
}

#[test]
fn out_flag_writes_artifact_and_summary() {
    let path = std::env::temp_dir().join(format!("qcnt-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let summary = stdout(&["modelset", "--closed", "--range", "5", "--out", p]);
    assert!(summary.contains("4 points"));
    let body = std::fs::read_to_string(&path).unwrap();
    assert_eq!(data_rows(&body).len(), 4);
    let _ = std::fs::remove_file(path);
}
