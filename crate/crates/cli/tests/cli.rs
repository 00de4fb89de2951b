use std::path::Path;
use std::process::Command;

use clap::Parser;
use fdspc_cli::{read_trajectory, run, validate, write_trajectory, Cli, Command as Sub, ExitStatus, RunConfig};
use fdspc_core::TrajectoryPoint;

fn config(argv: &[&str]) -> RunConfig {
    let mut full = vec!["fdspc", "run"];
    full.extend_from_slice(argv);
    match Cli::parse_from(full).command {
        Sub::Run(a) => a,
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fdspc"))
}

fn svg_shape(text: &str) -> Vec<(String, usize)> {
    ["<rect", "<polyline", "<line", "<circle"]
        .iter()
        .map(|t| (t.to_string(), text.matches(t).count()))
        .collect()
}

#[test]
fn trajectory_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let pts: Vec<TrajectoryPoint> = (0..50)
        .map(|i| {
            let s = i as f64 * 0.01;
            TrajectoryPoint {
                x: s.cos() * 3.0 + 1.0 / 3.0,
                y: s.sin() * 3.0,
                z: 0.1 * s,
                theta: s + std::f64::consts::FRAC_PI_2,
                kappa: 1.0 / 3.0,
                tau_z: -1e-17 * i as f64,
                v: (0.3 + 0.005 * i as f64).min(1.0),
                arc_length: 3.0 * s,
            }
        })
        .collect();
    let path = dir.path().join("t.csv");
    write_trajectory(&path, &pts).unwrap();
    assert_eq!(read_trajectory(&path).unwrap(), pts);
}

#[test]
fn happy_path_writes_four_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let status = bin()
        .args(["run", "--scenario", "long_obstacle", "--planner", "fdspc", "--out"])
        .arg(&out)
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(0));
    let mut names: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "long_obstacle_fdspc.csv",
            "long_obstacle_fdspc.svg",
            "report.csv",
            "report.json"
        ]
    );
    let traj = read_trajectory(&out.join("long_obstacle_fdspc.csv")).unwrap();
    assert!(traj.len() > 100);
    assert_eq!(traj[0].v, 0.0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report[0]["planner_name"], "fdspc");
    assert_eq!(report[0]["success"], true);
    assert!(report[0]["s2"].as_f64().unwrap() < 1.0);
}

#[test]
fn scenario_file_path_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let scen = dir.path().join("open.json");
    std::fs::write(
        &scen,
        r#"{"resolution": 0.1, "width": 6, "height": 4, "start": [0.5, 2.0, 0], "goal": [5.5, 2.0]}"#,
    )
    .unwrap();
    let out = dir.path().join("o");
    let cfg = config(&["--scenario", scen.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let outcome = run(&cfg).unwrap();
    assert_eq!(outcome.status, ExitStatus::AllSucceeded);
    assert!(out.join("open_fdspc.csv").exists());
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn artifacts_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("o{k}"));
        let cfg = config(&[
            "--scenario",
            "simple_maze",
            "--planner",
            "all",
            "--seed",
            "3",
            "--repetitions",
            "2",
            "--no-timing",
            "--out",
            out.to_str().unwrap(),
        ]);
        let outcome = run(&cfg).unwrap();
        assert_eq!(outcome.reports.len(), 6);
        outs.push(out);
    }
    for name in [
        "report.json",
        "report.csv",
        "simple_maze_fdspc.csv",
        "simple_maze_rrt.csv",
        "simple_maze_astar.csv",
    ] {
        assert_eq!(read(&outs[0], name), read(&outs[1], name), "{name}");
    }
    for name in ["simple_maze_fdspc.svg", "simple_maze_rrt.svg"] {
        assert_eq!(
            svg_shape(&read(&outs[0], name)),
            svg_shape(&read(&outs[1], name)),
            "{name}"
        );
    }
    let rows: Vec<serde_json::Value> = serde_json::from_str(&read(&outs[0], "report.json")).unwrap();
    let rrt = rows.iter().find(|r| r["planner_name"] == "rrt").unwrap();
    assert_eq!(rrt["runs"], 2);
    assert!(rrt["s2_std"].is_number());
    let astar = rows.iter().find(|r| r["planner_name"] == "astar").unwrap();
    assert!(astar["s2_std"].is_null());
}

#[test]
fn coarse_step_warns_and_still_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--scenario", "long_obstacle", "--dt", "0.05", "--out"])
        .arg(dir.path())
        .env("RUST_LOG", "warn")
        .output()
        .unwrap();
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("WARN") && stderr.contains("dt = 0.05"), "{stderr}");
    assert!(dir.path().join("report.json").exists());
    assert!(matches!(out.status.code(), Some(0) | Some(2)));
}

#[test]
fn blocked_goal_exits_with_no_path() {
    let dir = tempfile::tempdir().unwrap();
    let scen = dir.path().join("sealed.json");
    std::fs::write(
        &scen,
        r#"{"resolution": 0.1, "width": 8, "height": 6, "start": [1.0, 3.0, 0], "goal": [6.5, 3.0],
            "obstacles": [{"polygon": [[5, 1.5], [8, 1.5], [8, 1.8], [5, 1.8]]},
                          {"polygon": [[5, 4.2], [8, 4.2], [8, 4.5], [5, 4.5]]},
                          {"polygon": [[5, 1.5], [5.3, 1.5], [5.3, 4.5], [5, 4.5]]}]}"#,
    )
    .unwrap();
    let status = bin()
        .args(["run", "--planner", "astar", "--scenario"])
        .arg(&scen)
        .arg("--out")
        .arg(dir.path().join("o"))
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(2));
}

#[test]
fn usage_and_io_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad_flag = bin()
        .args(["run", "--scenario", "long_obstacle", "--frobnicate"])
        .output()
        .unwrap();
    assert_eq!(bad_flag.status.code(), Some(1));
    let missing = bin()
        .args(["run", "--scenario", "no_such_map"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&missing.stderr);
    assert_eq!(msg.trim().lines().count(), 1, "{msg}");
    let invalid = bin()
        .args([
            "run",
            "--scenario",
            "long_obstacle",
            "--theta-a1",
            "0.1",
            "--theta-a2",
            "0.1",
            "--validate-only",
        ])
        .output()
        .unwrap();
    assert_eq!(invalid.status.code(), Some(1));
}

#[test]
fn validate_only_reports_without_writing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let cfg = config(&[
        "--scenario",
        "long_obstacle",
        "--l-add",
        "2.0",
        "--out",
        out.to_str().unwrap(),
    ]);
    let d = validate(&cfg);
    assert_eq!(d.len(), 1);
    assert!(!d[0].is_error());
    let res = bin()
        .args([
            "run",
            "--scenario",
            "long_obstacle",
            "--l-add",
            "2.0",
            "--validate-only",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&res.stdout).contains("l_add"));
    assert!(!out.exists());
}
