//! Command-line driver: loads a scenario, runs planners and writes
//! trajectory CSV, report JSON/CSV and SVG renders.

pub mod config;
pub mod output;
pub mod run;
pub mod svg;

pub use config::{resolve, validate, Cli, Command, Diagnostic, Overrides, PlannerChoice, RunConfig, Severity};
pub use output::{read_trajectory, write_trajectory};
pub use run::{run, ExitStatus, RunOutcome};
