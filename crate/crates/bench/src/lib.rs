//! Shared setup for the planner benchmarks.

use fdspc_core::{scenarios, PlannerState, Point25, WorldModel};

/// Inflated world, start state and goal of a bundled scenario.
pub fn prepared(name: &str) -> (WorldModel, PlannerState, Point25) {
    let scenario = scenarios::load(name)
        .unwrap_or_else(|| panic!("unknown scenario {name}"))
        .expect("bundled scenarios parse");
    (scenario.planning_world(), scenario.start_state(), scenario.goal_point())
}
