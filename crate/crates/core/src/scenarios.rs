//! Bundled benchmark scenarios.
//!
//! Approximate reconstructions of five planar benchmark layouts plus a
//! corridor blocked by a low dike for vertical crossing.

use crate::error::Result;
use crate::world::Scenario;

pub const LONG_OBSTACLE: &str = include_str!("../scenarios/long_obstacle.json");
pub const LONG_CORRIDOR: &str = include_str!("../scenarios/long_corridor.json");
pub const SEMI_ENCLOSED: &str = include_str!("../scenarios/semi_enclosed.json");
pub const RANDOM_COMPLEX: &str = include_str!("../scenarios/random_complex.json");
pub const SIMPLE_MAZE: &str = include_str!("../scenarios/simple_maze.json");
pub const CORRIDOR_25D: &str = include_str!("../scenarios/corridor_25d.json");

/// The five planar benchmark scenarios, by name.
pub const BENCHMARKS: [(&str, &str); 5] = [
    ("long_obstacle", LONG_OBSTACLE),
    ("long_corridor", LONG_CORRIDOR),
    ("semi_enclosed", SEMI_ENCLOSED),
    ("random_complex", RANDOM_COMPLEX),
    ("simple_maze", SIMPLE_MAZE),
];

pub fn by_name(name: &str) -> Option<&'static str> {
    BENCHMARKS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .or((name == "corridor_25d").then_some(CORRIDOR_25D))
}

pub fn load(name: &str) -> Option<Result<Scenario>> {
    by_name(name).map(Scenario::from_json)
}
