//! Smooth path planning by continuous curvature integration.
//!
//! Paths are produced as curvature profiles sampled at a fixed arc-length
//! step and integrated forward, so every emitted path changes curvature by at
//! most `rho * dt` per step. The crate covers the occupancy/elevation world
//! model, profile integration, the branch tree, the planar and 2.5-D
//! planners, velocity profiling, smoothness metrics and baseline planners.
//!
//! ```
//! use fdspc_core::{plan, PlannerConfig, PlannerState, Point25, WorldModel};
//!
//! let world = WorldModel::new(0.1, 60, 40).unwrap();
//! let start = PlannerState::new(0.5, 2.0, 0.0);
//! let result = plan(&world, start, Point25::planar(5.5, 2.0), &PlannerConfig::default()).unwrap();
//! assert!(result.is_success());
//! assert!(result.profile.max_curvature_jump() <= 0.4 * 0.01 + 1e-9);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod baselines;
pub mod crossing;
pub mod curvature;
pub mod error;
pub mod metrics;
pub mod planner;
pub mod scenarios;
pub mod tree;
pub mod velocity;
pub mod world;

pub use baselines::{astar, dijkstra, gbfs, grid_search, rrt, GridPath, GridSearch, RrtParams, RrtResult};
pub use crossing::{
    build_cross_profile, crossability_check, obstacle_span, plan_25d, CrossConfig, CrossProfile, Crossability,
    ObstacleSpan,
};
pub use curvature::{
    end_state, integrate, inverse_integrate, max_heading_change, normalize_angle, CurvatureProfile, PlannerState,
    Waypoints,
};
pub use error::{Error, Result};
pub use metrics::{instrumented_repeats, instrumented_run, path_length, smoothness, PathReport};
pub use planner::{
    direct_plan, explore_plan, p_fimin, plan, ExploreOutcome, ExploreResult, PlanResult, PlanStatus, PlannerConfig,
};
pub use tree::{HeuristicIndex, Locator, PathTree, Side, TreeDump, TreeStats};
pub use velocity::{plan_velocity, Trajectory, TrajectoryPoint, VelocityConfig};
pub use world::{expansion_radius, load_scenario, Point25, Scenario, ScenarioDoc, WorldModel};
