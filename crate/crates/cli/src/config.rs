use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fdspc_core::{scenarios, CrossConfig, PlannerConfig, Scenario, VelocityConfig};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "fdspc", version, about = "Smooth path planning by curvature integration")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan on a scenario and write trajectory, report and SVG files.
    Run(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlannerChoice {
    Fdspc,
    Fdspc25d,
    Astar,
    Dijkstra,
    Gbfs,
    Rrt,
    All,
}

impl PlannerChoice {
    pub const CONCRETE: [PlannerChoice; 6] = [
        PlannerChoice::Fdspc,
        PlannerChoice::Fdspc25d,
        PlannerChoice::Astar,
        PlannerChoice::Dijkstra,
        PlannerChoice::Gbfs,
        PlannerChoice::Rrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlannerChoice::Fdspc => "fdspc",
            PlannerChoice::Fdspc25d => "fdspc25d",
            PlannerChoice::Astar => "astar",
            PlannerChoice::Dijkstra => "dijkstra",
            PlannerChoice::Gbfs => "gbfs",
            PlannerChoice::Rrt => "rrt",
            PlannerChoice::All => "all",
        }
    }

    pub fn expand(self) -> Vec<PlannerChoice> {
        match self {
            PlannerChoice::All => Self::CONCRETE.to_vec(),
            p => vec![p],
        }
    }
}

/// Parameter overrides. The same keys are accepted in a scenario's
/// `config` object; command-line values take precedence.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// Integration step (m of arc per step)
    #[arg(long)]
    pub dt: Option<f64>,
    /// Curvature rate bound
    #[arg(long)]
    pub rho: Option<f64>,
    /// Slope rate bound for vertical crossing
    #[arg(long)]
    pub rho_z: Option<f64>,
    /// Coarse sweep increment (rad)
    #[arg(long)]
    pub theta_a1: Option<f64>,
    /// Fine sweep increment (rad)
    #[arg(long)]
    pub theta_a2: Option<f64>,
    /// Probe extension past the last collision (m)
    #[arg(long)]
    pub l_add: Option<f64>,
    /// Retreat distance before branching (m)
    #[arg(long)]
    pub back_obs: Option<f64>,
    /// Largest climbing angle (degrees); 0 disables crossing
    #[arg(long)]
    pub theta_max: Option<f64>,
    #[arg(long)]
    pub v_max: Option<f64>,
    #[arg(long)]
    pub v_min: Option<f64>,
    #[arg(long)]
    pub accel: Option<f64>,
}

impl Overrides {
    /// Field-wise merge, `self` winning.
    pub fn or(&self, other: &Overrides) -> Overrides {
        Overrides {
            dt: self.dt.or(other.dt),
            rho: self.rho.or(other.rho),
            rho_z: self.rho_z.or(other.rho_z),
            theta_a1: self.theta_a1.or(other.theta_a1),
            theta_a2: self.theta_a2.or(other.theta_a2),
            l_add: self.l_add.or(other.l_add),
            back_obs: self.back_obs.or(other.back_obs),
            theta_max: self.theta_max.or(other.theta_max),
            v_max: self.v_max.or(other.v_max),
            v_min: self.v_min.or(other.v_min),
            accel: self.accel.or(other.accel),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Scenario JSON file, or the name of a bundled scenario
    #[arg(long)]
    pub scenario: String,
    #[arg(long, value_enum, default_value = "fdspc")]
    pub planner: PlannerChoice,
    /// Output directory
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Runs per stochastic planner; reports carry mean and standard deviation
    #[arg(long, default_value_t = 1)]
    pub repetitions: usize,
    #[command(flatten)]
    pub overrides: Overrides,
    /// Check the configuration and exit without planning
    #[arg(long)]
    pub validate_only: bool,
    /// Zero timing and memory columns so reports are byte-reproducible
    #[arg(long)]
    pub no_timing: bool,
}

pub type RunConfig = RunArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    fn warning(message: String) -> Self {
        Self {
            severity: Severity::Warning,
            message,
        }
    }

    fn error(message: String) -> Self {
        Self {
            severity: Severity::Error,
            message,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.severity {
            Severity::Warning => write!(f, "warning: {}", self.message),
            Severity::Error => write!(f, "error: {}", self.message),
        }
    }
}

/// Everything a run needs once the scenario is loaded and overrides applied.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub name: String,
    pub scenario: Scenario,
    pub planner: PlannerConfig,
    pub cross: CrossConfig,
    pub velocity: VelocityConfig,
}

fn read_scenario(source: &str) -> Result<(String, Scenario)> {
    let path = Path::new(source);
    if path.exists() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {source}"))?;
        let s = Scenario::from_json(&text).with_context(|| format!("parsing {source}"))?;
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("scenario")
            .to_string();
        return Ok((name, s));
    }
    match scenarios::load(source) {
        Some(s) => Ok((source.to_string(), s?)),
        None => bail!("scenario {source} not found"),
    }
}

pub fn resolve(cfg: &RunConfig) -> Result<Resolved> {
    let (name, scenario) = read_scenario(&cfg.scenario)?;
    let from_file: Overrides = match &scenario.config {
        Some(v) => serde_json::from_value(v.clone()).context("scenario config overrides")?,
        None => Overrides::default(),
    };
    let o = cfg.overrides.or(&from_file);

    let mut planner = PlannerConfig::default();
    if let Some(v) = o.dt {
        planner.dt = v;
    }
    if let Some(v) = o.rho {
        planner.rho = v;
    }
    if let Some(v) = o.theta_a1 {
        planner.theta_a1 = v;
    }
    planner.theta_a2 = o.theta_a2;
    if let Some(v) = o.l_add {
        planner.l_add = v;
    }
    if let Some(v) = o.back_obs {
        planner.back_obs = v;
    }

    let mut cross = CrossConfig::default();
    if let Some(v) = o.rho_z {
        cross.rho_z = v;
    }
    if let Some(v) = o.theta_max {
        cross.theta_max = v.to_radians();
    }

    let mut velocity = VelocityConfig::default();
    if let Some(v) = o.v_max {
        velocity.v_max = v;
    }
    if let Some(v) = o.v_min {
        velocity.v_min = v;
    }
    if let Some(v) = o.accel {
        velocity.accel = v;
    }
    Ok(Resolved {
        name,
        scenario,
        planner,
        cross,
        velocity,
    })
}

fn range_check(out: &mut Vec<Diagnostic>, name: &str, v: f64, lo: f64, hi: f64) {
    if !(lo..=hi).contains(&v) {
        out.push(Diagnostic::warning(format!(
            "{name} = {v} is outside the recommended range {lo}..{hi}; planning may fail"
        )));
    }
}

/// Static checks without planning. Warnings flag values outside the tuned
/// ranges; errors make a run impossible.
pub fn validate(cfg: &RunConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if cfg.repetitions == 0 {
        out.push(Diagnostic::error("repetitions must be at least 1".into()));
    }
    let r = match resolve(cfg) {
        Ok(r) => r,
        Err(e) => {
            out.push(Diagnostic::error(format!("{e:#}")));
            return out;
        }
    };
    let p = &r.planner;
    range_check(&mut out, "dt", p.dt, 0.01, 0.015);
    range_check(&mut out, "rho", p.rho, 0.3, 0.5);
    range_check(&mut out, "theta_a1", p.theta_a1, 0.1, 0.2);
    range_check(&mut out, "l_add", p.l_add, 0.4, 0.8);
    for e in [
        p.validate().err(),
        r.cross.validate().err(),
        r.velocity.validate().err(),
    ]
    .into_iter()
    .flatten()
    {
        out.push(Diagnostic::error(e.to_string()));
    }
    out
}
