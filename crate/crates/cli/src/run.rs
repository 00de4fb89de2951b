use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use fdspc_core::{
    grid_search, instrumented_repeats, instrumented_run, plan, plan_25d, plan_velocity, rrt, GridSearch, PathReport,
    PlanResult, Point25, RrtParams, RrtResult, TrajectoryPoint,
};
use log::{info, warn};

use crate::config::{resolve, validate, PlannerChoice, Resolved, RunConfig};
use crate::output::{polyline_trajectory, write_reports, write_trajectory};
use crate::svg::{render, Overlay};

/// Process exit status of a finished run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    AllSucceeded,
    NoPath,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::AllSucceeded => 0,
            ExitStatus::NoPath => 2,
        }
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub status: ExitStatus,
    pub reports: Vec<PathReport>,
    pub files: Vec<PathBuf>,
}

enum Artifact {
    Fdspc(PlanResult),
    Grid(Vec<Point25>),
    Rrt(RrtResult),
}

struct PlannerRun {
    report: PathReport,
    artifact: Option<Artifact>,
}

fn run_planner(kind: PlannerChoice, r: &Resolved, cfg: &RunConfig) -> Result<PlannerRun> {
    let world = r.scenario.planning_world();
    let start = r.scenario.start_state();
    let goal = r.scenario.goal_point();
    let name = kind.name();
    let mut artifact = None;
    let mut failure = None;
    let report = match kind {
        PlannerChoice::Fdspc | PlannerChoice::Fdspc25d => instrumented_run(name, &r.name, || {
            let res = if kind == PlannerChoice::Fdspc {
                plan(&world, start, goal, &r.planner)
            } else {
                plan_25d(&world, start, goal, &r.planner, &r.cross)
            };
            match res {
                Ok(p) => {
                    let pts = p.is_success().then(|| p.waypoints.points());
                    artifact = Some(Artifact::Fdspc(p));
                    pts
                }
                Err(e) => {
                    failure = Some(e);
                    None
                }
            }
        }),
        PlannerChoice::Astar | PlannerChoice::Dijkstra | PlannerChoice::Gbfs => {
            let mode = match kind {
                PlannerChoice::Astar => GridSearch::AStar,
                PlannerChoice::Dijkstra => GridSearch::Dijkstra,
                _ => GridSearch::Gbfs,
            };
            instrumented_run(name, &r.name, || match grid_search(&world, start.point(), goal, mode) {
                Ok(p) => {
                    let pts = p.map(|p| p.points);
                    artifact = pts.clone().map(Artifact::Grid);
                    pts
                }
                Err(e) => {
                    failure = Some(e);
                    None
                }
            })
        }
        PlannerChoice::Rrt => {
            let params = RrtParams::default();
            instrumented_repeats(name, &r.name, cfg.repetitions, cfg.seed, |seed| {
                match rrt(&world, start.point(), goal, seed, &params) {
                    Ok(res) => {
                        let pts = res.path.clone();
                        // keep the run for the base seed as the rendered artifact
                        if seed == cfg.seed {
                            artifact = Some(Artifact::Rrt(res));
                        }
                        pts
                    }
                    Err(e) => {
                        failure = Some(e);
                        None
                    }
                }
            })
        }
        PlannerChoice::All => unreachable!("expanded before dispatch"),
    };
    if let Some(e) = failure {
        bail!("{name} on {}: {e}", r.name);
    }
    Ok(PlannerRun { report, artifact })
}

fn trajectory(a: &Artifact, r: &Resolved) -> Result<Vec<TrajectoryPoint>> {
    Ok(match a {
        Artifact::Fdspc(p) if p.is_success() => {
            plan_velocity(r.scenario.start_state(), &p.profile, &r.velocity)?.points
        }
        Artifact::Fdspc(_) => Vec::new(),
        Artifact::Grid(pts) => polyline_trajectory(pts, &r.velocity),
        Artifact::Rrt(res) => res
            .path
            .as_deref()
            .map(|p| polyline_trajectory(p, &r.velocity))
            .unwrap_or_default(),
    })
}

fn svg(a: Option<&Artifact>, r: &Resolved) -> String {
    let world = r.scenario.planning_world();
    let start = r.scenario.start_state().point();
    let goal = r.scenario.goal_point();
    match a {
        Some(Artifact::Fdspc(p)) => {
            let pts = p.waypoints.points();
            render(
                &world,
                Overlay::Tree(&p.tree),
                p.is_success().then_some(&pts[..]),
                start,
                goal,
            )
        }
        Some(Artifact::Grid(pts)) => render(&world, Overlay::None, Some(pts), start, goal),
        Some(Artifact::Rrt(res)) => render(&world, Overlay::Rrt(&res.nodes), res.path.as_deref(), start, goal),
        None => render(&world, Overlay::None, None, start, goal),
    }
}

/// Validates, plans with every selected planner one after another, and
/// writes per-planner trajectory CSV and SVG plus a combined report.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let diags = validate(cfg);
    for d in &diags {
        if d.is_error() {
            bail!("{}", d.message);
        }
        warn!("{}", d.message);
    }
    let r = resolve(cfg)?;
    std::fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;

    let mut reports = Vec::new();
    let mut files = Vec::new();
    for kind in cfg.planner.expand() {
        let mut pr = run_planner(kind, &r, cfg)?;
        if cfg.no_timing {
            pr.report.time_s = 0.0;
            pr.report.memory_mb = 0.0;
            pr.report.time_std = pr.report.time_std.map(|_| 0.0);
        }
        info!(
            "{} on {}: success={} length={:.3} m S2={:.4} deg time={:.4} s",
            kind.name(),
            r.name,
            pr.report.success,
            pr.report.length_m,
            pr.report.s2,
            pr.report.time_s
        );
        let stem = format!("{}_{}", r.name, kind.name());
        let csv_path = cfg.out.join(format!("{stem}.csv"));
        let traj = match &pr.artifact {
            Some(a) => trajectory(a, &r)?,
            None => Vec::new(),
        };
        write_trajectory(&csv_path, &traj)?;
        let svg_path = cfg.out.join(format!("{stem}.svg"));
        std::fs::write(&svg_path, svg(pr.artifact.as_ref(), &r))
            .with_context(|| format!("writing {}", svg_path.display()))?;
        files.extend([csv_path, svg_path]);
        reports.push(pr.report);
    }
    write_reports(&cfg.out, &reports)?;
    files.extend([cfg.out.join("report.json"), cfg.out.join("report.csv")]);

    let status = if reports.iter().all(|r| r.success) {
        ExitStatus::AllSucceeded
    } else {
        ExitStatus::NoPath
    };
    Ok(RunOutcome { status, reports, files })
}
