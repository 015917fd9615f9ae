use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn posture(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posture"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const SHORT_TILT: &str = r#"
schema_version = 1
duration_s = 3.0
[body]
model = "humanoid"
[platform.tilt]
kind = "sinusoid"
amplitude_deg = 4.0
frequency_hz = 0.5
[defaults]
estimators = ["gravity", "tilt"]
[[module]]
joint = 2
passive_factor = 15.0
"#;

// servo far too weak to hold the body up
const FALLING: &str = r#"
schema_version = 1
duration_s = 10.0
initial_joint_deg = [3.0, 0.0, 0.0]
[body]
model = "humanoid"
[defaults]
servo = { kp = 40.0 }
"#;

#[test]
fn run_writes_all_three_outputs_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "tilt.toml", SHORT_TILT);
    let out = dir.path().join("results");
    let o = posture(&[
        "run",
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["tilt.csv", "tilt.metrics.json", "tilt.svg"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let svg = fs::read_to_string(out.join("tilt.svg")).unwrap();
    roxmltree::Document::parse(&svg).expect("valid XML");

    // 3001 ticks, every 10th plus nothing extra since tick 3000 is a multiple
    let csv = fs::read_to_string(out.join("tilt.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 301);
    assert!(csv.lines().nth(1).unwrap().starts_with("0.000,"));
    assert!(csv.lines().last().unwrap().starts_with("3.000,"));
}

#[test]
fn missing_scenario_exits_one_and_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.toml");
    let o = posture(&[
        "run",
        "--scenario",
        missing.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("nope.toml"), "{err}");
}

#[test]
fn bad_field_exits_one_with_line_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let text = SHORT_TILT.replace("amplitude_deg = 4.0", "amplitude_dge = 4.0");
    let scenario = write(dir.path(), "typo.toml", &text);
    let o = posture(&[
        "run",
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("typo.toml") && err.contains("amplitude_dge") && err.contains("line"),
        "{err}"
    );
}

#[test]
fn divergence_exits_two_and_keeps_the_partial_log() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "fall.toml", FALLING);
    let o = posture(&[
        "run",
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--decimate",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stdout));
    let csv = fs::read_to_string(dir.path().join("fall.csv")).unwrap();
    let last: f64 = csv.lines().last().unwrap().split(',').next().unwrap().parse().unwrap();
    assert!(last > 0.0 && last < 10.0, "{last}");
    let metrics = fs::read_to_string(dir.path().join("fall.metrics.json")).unwrap();
    assert!(metrics.contains("\"stable\": 0.0"), "{metrics}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "tilt.toml", SHORT_TILT);
    let mut outputs = vec![];
    for (k, jobs) in ["1", "2"].iter().enumerate() {
        let out = dir.path().join(format!("r{k}"));
        let o = posture(&[
            "run",
            "--scenario",
            scenario.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--jobs",
            jobs,
        ]);
        assert_eq!(o.status.code(), Some(0));
        outputs.push((
            fs::read(out.join("tilt.csv")).unwrap(),
            fs::read(out.join("tilt.svg")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn csv_schema_matches_golden_header() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "tilt.toml", SHORT_TILT);
    let o = posture(&[
        "run",
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--no-plot",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!dir.path().join("tilt.svg").exists());
    let csv = fs::read_to_string(dir.path().join("tilt.csv")).unwrap();
    let golden = include_str!("golden/header_3_links.csv").trim_end();
    assert_eq!(csv.lines().next().unwrap(), golden);
    let width = golden.split(',').count();
    assert!(csv.lines().all(|l| l.split(',').count() == width));
    assert!(!csv.contains('\r'));
}

#[test]
fn zero_duration_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let text = SHORT_TILT.replace("duration_s = 3.0", "duration_s = 0.0");
    let scenario = write(dir.path(), "empty.toml", &text);
    let o = posture(&[
        "run",
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("empty.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
    assert!(!dir.path().join("empty.svg").exists());
}

#[test]
fn presets_run_and_print() {
    let dir = tempfile::tempdir().unwrap();
    let o = posture(&[
        "run",
        "--preset",
        "quiet",
        "--out",
        dir.path().to_str().unwrap(),
        "--seed",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    // quiet stance: every angle column stays within 0.01 deg
    let csv = fs::read_to_string(dir.path().join("quiet.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[2..8].iter().all(|a| a.abs() <= 0.01), "{line}");
    }
    let o = posture(&["preset", "fig3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("frequency_hz = 0.08"));
    assert_eq!(posture(&["preset", "nope"]).status.code(), Some(1));
}

#[test]
fn decimate_zero_is_rejected() {
    assert_ne!(
        posture(&["run", "--preset", "quiet", "--decimate", "0"]).status.code(),
        Some(0)
    );
}
