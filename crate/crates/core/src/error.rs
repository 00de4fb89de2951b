use thiserror::Error;

/// Errors raised by the planning library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("scenario parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("query ({x}, {y}) lies outside the map")]
    OutOfBounds { x: f64, y: f64 },
    #[error("planner state has non-finite fields")]
    NonFiniteState,
    #[error("curvature profile is empty")]
    EmptyProfile,
    #[error("profiles use different step sizes ({0} vs {1})")]
    StepMismatch(f64, f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("heading change {requested} is unreachable, at most {reachable} rad fits the length")]
    Infeasible { requested: f64, reachable: f64 },
    #[error("locator {0:?} does not resolve to a node")]
    UnknownLocator(String),
    #[error("side {side} of node {locator:?} is already occupied")]
    SideOccupied { locator: String, side: char },
    #[error("heuristic index is empty")]
    EmptyIndex,
    #[error("direct planning spiralled without aligning with the goal")]
    DegenerateSpiral,
    #[error("start position is occupied")]
    StartOccupied,
    #[error("goal position is occupied")]
    GoalOccupied,
    #[error("retreat point is occupied")]
    RetreatOccupied,
    #[error("obstacle is not crossable: {0}")]
    Uncrossable(String),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
