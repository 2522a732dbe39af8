use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use autorvo::eval::synthetic_reference;
use autorvo::navigation::NavConfig;
use autorvo::sim::load_scenario;
use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn autorvo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_autorvo")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn run_solo_arrives() {
    let dir = TempDir::new().unwrap();
    let out = autorvo(&["run", path(&fixture("solo.json")), "-o", path(dir.path())]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary = read_json(&dir.path().join("summary.json"));
    assert_eq!(summary["arrivals"], 1);
    assert_eq!(summary["audit_count"], 0);
    assert!(summary["wall_time_s"].as_f64().unwrap() >= 0.0);
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("step,time,id,type,x,y,theta,v,phi,b\n"));
    let log = read_json(&dir.path().join("trajectory.json"));
    assert!(log["records"].as_array().unwrap().len() > 1);
}

#[test]
fn run_dense_fixture_is_clean_and_reproducible() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for dir in [&a, &b] {
        let out = autorvo(&["run", path(&fixture("dense_1.json")), "-o", path(dir.path())]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    assert_eq!(read_json(&a.path().join("summary.json"))["audit_count"], 0);
    for file in ["trajectory.csv", "trajectory.json"] {
        assert_eq!(
            fs::read(a.path().join(file)).unwrap(),
            fs::read(b.path().join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn run_reports_overlaps_with_exit_3() {
    // A planner that cannot see its neighbours walks into them.
    let dir = TempDir::new().unwrap();
    let scenario = dir.path().join("head_on.json");
    fs::write(
        &scenario,
        r#"{"agents": [
            {"id": 1, "type": "pedestrian", "disks": [[0,0,0.3]], "position": [0,0], "theta": 0, "goal": [10,0]},
            {"id": 2, "type": "pedestrian", "disks": [[0,0,0.3]], "position": [10,0], "theta": 3.14159, "goal": [0,0]}],
          "duration": 12}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = autorvo(&[
        "run",
        path(&scenario),
        "-o",
        path(&out_dir),
        "--set",
        "nav.detection_radius=0.1",
        "--set",
        "nav.dynamics=false",
    ]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(
        read_json(&out_dir.join("summary.json"))["audit_count"]
            .as_u64()
            .unwrap()
            > 0
    );
}

#[test]
fn malformed_scenario_names_the_key() {
    let dir = TempDir::new().unwrap();
    let scenario = dir.path().join("bad.json");
    fs::write(&scenario, r#"{"agents": [], "durration": 5}"#).unwrap();
    let out = autorvo(&["run", path(&scenario), "-o", path(dir.path())]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("durration"), "{}", stderr(&out));

    let out = autorvo(&["run", path(&dir.path().join("missing.json")), "-o", path(dir.path())]);
    assert_eq!(code(&out), 2);
}

#[test]
fn validate_prints_effective_config() {
    let out = autorvo(&["validate", path(&fixture("solo.json"))]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let effective: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(effective["duration"], 60.0);
    assert!(effective["nav"]["sigma"].as_f64().unwrap() >= 1.0);

    let out = autorvo(&["validate", path(&fixture("solo.json")), "--set", "nav.sigma=0.5"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("nav.sigma"), "{}", stderr(&out));

    let out = autorvo(&["validate", path(&fixture("solo.json")), "--set", "nav.warp=3"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("nav.warp"), "{}", stderr(&out));
}

/// Writes a noisy 50-frame self-reference of a dense fixture.
fn write_reference(dir: &Path, at_thirty_fps: bool) -> (PathBuf, PathBuf, PathBuf, PathBuf) {
    let source = fs::read_to_string(fixture("dense_6.json")).unwrap();
    let nav = NavConfig::default();
    let (template, mut reference) = synthetic_reference(&load_scenario(&source).unwrap(), &nav, 2, 50, 0.0, 0.02);
    if at_thirty_fps {
        reference.frame_rate = 30.0;
    }
    let csv = dir.join("ref.csv");
    let side = dir.join("ref.json");
    let scenario = dir.join("scenario.json");
    let configs = dir.join("configs.json");
    fs::write(&csv, reference.to_csv()).unwrap();
    fs::write(
        &side,
        serde_json::to_string(&reference.sidecar(Some(&template))).unwrap(),
    )
    .unwrap();
    fs::write(&scenario, &source).unwrap();
    fs::write(
        &configs,
        r#"[{"name": "full"}, {"name": "cnd", "nav": {"dynamics": false}}]"#,
    )
    .unwrap();
    (csv, side, scenario, configs)
}

#[test]
fn eval_writes_report_with_matched_config_best() {
    let dir = TempDir::new().unwrap();
    let (csv, side, scenario, configs) = write_reference(dir.path(), false);
    let out_dir = dir.path().join("report");
    let out = autorvo(&[
        "eval",
        path(&csv),
        path(&side),
        path(&scenario),
        path(&configs),
        "-o",
        path(&out_dir),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = read_json(&out_dir.join("eval_report.json"));
    let full = report["full"]["entropy"].as_f64().unwrap();
    let cnd = report["cnd"]["entropy"].as_f64().unwrap();
    assert!(full < cnd, "{full} vs {cnd}");
    assert_eq!(report["full"]["steps_evaluated"], 49);
    let table = fs::read_to_string(out_dir.join("eval_report.txt")).unwrap();
    assert!(table.lines().nth(1).unwrap().starts_with("scenario"));
}

#[test]
fn eval_window_at_thirty_fps() {
    let dir = TempDir::new().unwrap();
    let (csv, side, scenario, configs) = write_reference(dir.path(), true);
    let out = autorvo(&[
        "eval",
        path(&csv),
        path(&side),
        path(&scenario),
        path(&configs),
        "-o",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = read_json(&dir.path().join("eval_report.json"));
    assert_eq!(report["full"]["steps_evaluated"], 8);
}

#[test]
fn eval_input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let (csv, side, scenario, configs) = write_reference(dir.path(), false);
    let missing = dir.path().join("nope.json");
    let out = autorvo(&[
        "eval",
        path(&csv),
        path(&missing),
        path(&scenario),
        path(&configs),
        "-o",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 2);

    let solo = fixture("solo.json");
    let out = autorvo(&[
        "eval",
        path(&csv),
        path(&side),
        path(&solo),
        path(&configs),
        "-o",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("id mismatch"), "{}", stderr(&out));
}

#[test]
fn bench_writes_points_and_fit() {
    let dir = TempDir::new().unwrap();
    let out = autorvo(&[
        "bench",
        path(&fixture("dense_1.json")),
        "--neighbors",
        "1,2,4",
        "--samples",
        "25,100",
        "--reps",
        "2",
        "-o",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("neighbors,samples,reps,mean_ms,std_ms"));
    assert_eq!(lines.count(), 6);
    let fit = read_json(&dir.path().join("bench_fit.json"));
    assert!(fit["fit"]["r_squared"].is_number());
    assert_eq!(fit["points"].as_array().unwrap().len(), 6);

    let out = autorvo(&["bench", path(&fixture("dense_1.json")), "--neighbors", "0"]);
    assert_eq!(code(&out), 2);
}
