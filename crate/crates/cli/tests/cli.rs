use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lame(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lame"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .unwrap()
}

fn with_config(dir: &Path, json: &str, args: &[&str]) -> Output {
    fs::create_dir_all(dir).unwrap();
    let cfg = dir.join("config.json");
    fs::write(&cfg, json).unwrap();
    let mut all = vec!["--config", cfg.to_str().unwrap()];
    all.extend_from_slice(args);
    lame(&dir.join("out"), &all)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn series_outputs_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        let out = lame(d, &["series", "--kmax", "6"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 13);
    for n in names {
        assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap(), "{n:?}");
    }
    let doc = read_json(&a.join("series_m1.json"));
    assert_eq!(doc["coeffs"][0], "25/3");
    assert_eq!(doc["coeffs"][1], "20/1");
    assert_eq!(doc["units"], "pi^2");
    assert_eq!(doc["config"]["series"]["k_max"], 6);
    assert!(doc["version"].is_string());
    let csv = fs::read_to_string(a.join("series_m0.csv")).unwrap();
    assert!(csv.starts_with("k,numerator,denominator,value\n0,10,3,"));
}

#[test]
fn constant_series_has_no_radius() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lame(tmp.path(), &["series", "--kmax", "0"]);
    assert!(out.status.success());
    let table = fs::read_to_string(tmp.path().join("table1.txt")).unwrap();
    let row = table.lines().find(|l| l.starts_with("E_0")).unwrap();
    assert_eq!(row, "E_0(q) | pi^2 (10/3 + ...) | n/a");
    assert!(read_json(&tmp.path().join("series_m0.json")).get("radius").is_none());
}

#[test]
fn config_errors_exit_with_code_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = with_config(tmp.path(), r#"{"scan": {"tol_branch": -1.0}}"#, &["scan"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("scan.tol_branch"));

    let out = with_config(tmp.path(), r#"{"series": {"kmax": 3}}"#, &["series"]);
    assert_eq!(out.status.code(), Some(2));

    let out = with_config(tmp.path(), "not json", &["series"]);
    assert_eq!(out.status.code(), Some(2));

    let out = lame(tmp.path(), &["radius", "--kmax", "5"]);
    assert_eq!(out.status.code(), Some(2));

    // a broken block does not matter to commands that do not read it
    let out = with_config(tmp.path(), r#"{"scan": {"tol_branch": -1.0}}"#, &["series", "--kmax", "2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn wp_eval_prints_identity_checks() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lame(tmp.path(), &["wp-eval"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 4);

    // five terms are far too few at this nome
    let out = lame(tmp.path(), &["wp-eval", "--trunc-K", "5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn scan_of_small_disk_is_empty() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = r#"{"scan": {"re": [0.0, 0.1], "im": [0.0, 0.1], "max_modulus": 0.1, "grid": [8, 8]}}"#;
    let out = with_config(tmp.path(), cfg, &["scan"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&tmp.path().join("out/scan.json"));
    assert_eq!(report["candidates"], serde_json::json!([]));
    assert!(report["grid_points"].as_u64().unwrap() > 0);
}

#[test]
fn scan_classifies_a_coincidence() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = r#"{"scan": {"re": [0.72, 0.77], "im": [0.43, 0.48], "grid": [4, 4]}}"#;
    let out = with_config(tmp.path(), cfg, &["scan"]);
    assert!(out.status.success());
    let report = read_json(&tmp.path().join("out/scan.json"));
    let c = &report["candidates"][0];
    assert!((c["q"][0].as_f64().unwrap() - 0.746852).abs() < 1e-4);
    assert_eq!(c["class"], "e1");
    let txt = fs::read_to_string(tmp.path().join("out/scan.txt")).unwrap();
    assert!(txt.contains("periodic (even m)") && txt.contains("e1"));
}

#[test]
fn continuation_writes_trajectories_and_permutations() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = r#"{"continue": {
        "anchors": [{"q": [0.258666, 0.697448], "indices": [0, 2, 4, 6]}],
        "tracks": [
            {"m": 0, "path": {"kind": "polyline", "points": [[0.2, 0.0], [0.3, 0.2]], "steps": 20}},
            {"m": 1, "path": {"kind": "polyline", "points": [[0.2, 0.0], [0.2, 0.0]], "steps": 5}}
        ]
    }}"#;
    let out = with_config(tmp.path(), cfg, &["continue"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let perm = read_json(&tmp.path().join("out/perm_0.json"));
    assert_eq!(perm["perm"], serde_json::json!([[0, 2], [2, 0], [4, 4], [6, 6]]));
    assert_eq!(perm["parity"], "even");

    let lines = fs::read_to_string(tmp.path().join("out/track_0.jsonl")).unwrap();
    let mut it = lines.lines();
    assert!(serde_json::from_str::<Value>(it.next().unwrap()).unwrap()["header"]["version"].is_string());
    let first: Value = serde_json::from_str(it.next().unwrap()).unwrap();
    assert_eq!(first["s"], 0.0);
    assert!(first["E"].is_array() && first["t0"].is_array());

    // zero-length path: one record, the start state
    let lines = fs::read_to_string(tmp.path().join("out/track_1.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 2);
}

#[test]
fn stalls_exit_with_code_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = r#"{"continue": {
        "anchors": [],
        "max_halvings": 0,
        "step_jump_max": 1e-12,
        "tracks": [{"m": 0, "path": {"kind": "polyline", "points": [[0.2, 0.0], [0.2, 0.3]], "steps": 4}}]
    }}"#;
    let out = with_config(tmp.path(), cfg, &["continue"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("track 0") && err.contains("stalled"), "{err}");
}

#[test]
fn jobs_do_not_change_results() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = r#"{"scan": {"re": [0.2, 0.35], "im": [0.6, 0.75], "grid": [6, 6]}}"#;
    let one = with_config(&tmp.path().join("1"), cfg, &["scan", "--jobs", "1"]);
    let two = with_config(&tmp.path().join("2"), cfg, &["scan", "--jobs", "2"]);
    assert!(one.status.success() && two.status.success());
    assert_eq!(
        fs::read(tmp.path().join("1/out/scan.json")).unwrap(),
        fs::read(tmp.path().join("2/out/scan.json")).unwrap()
    );
}
