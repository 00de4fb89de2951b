#![allow(dead_code)]

use fdspc_core::{astar, scenarios, PlannerState, Point25, Scenario, WorldModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Case {
    pub world: WorldModel,
    pub start: PlannerState,
    pub goal: Point25,
}

pub fn scenario(name: &str) -> Scenario {
    scenarios::load(name).expect("known scenario").expect("scenario parses")
}

pub fn case(name: &str) -> Case {
    let s = scenario(name);
    Case {
        world: s.planning_world(),
        start: s.start_state(),
        goal: s.goal_point(),
    }
}

/// Random 16 x 12 m map with rectangles kept clear of the start and goal
/// zones. With `low_obstacles`, about half the rectangles get a finite height.
/// Returns `None` when the grid has no path between start and goal.
pub fn random_case(seed: u64, low_obstacles: bool) -> Option<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = WorldModel::new(0.1, 160, 120).unwrap();
    for _ in 0..rng.gen_range(3..7) {
        let x0 = rng.gen_range(50..115);
        let y0 = rng.gen_range(0..110);
        let ww = rng.gen_range(3..20);
        let hh = rng.gen_range(3..30);
        let h = if low_obstacles && rng.gen_bool(0.5) {
            rng.gen_range(0.1..0.3)
        } else {
            f64::INFINITY
        };
        for i in x0..(x0 + ww).min(160) {
            for j in y0..(y0 + hh).min(120) {
                w.set_obstacle(i, j, h);
            }
        }
    }
    let world = w.inflate(0.3);
    let start = PlannerState::new(1.0, rng.gen_range(1.0..11.0), 0.0);
    let goal = Point25::planar(15.0, rng.gen_range(1.0..11.0));
    if world.occupied_at(&start.point()) || world.occupied_at(&goal) {
        return None;
    }
    astar(&world, start.point(), goal).ok()??;
    Some(Case { world, start, goal })
}

/// Every `k`-th point, keeping the last.
pub fn downsample(points: &[Point25], k: usize) -> Vec<Point25> {
    let mut out: Vec<Point25> = points.iter().step_by(k).copied().collect();
    if !(points.len() - 1).is_multiple_of(k) {
        out.push(*points.last().unwrap());
    }
    out
}

/// Turning metrics written straight from the arccos definition.
pub fn oracle_smoothness(p: &[Point25]) -> (f64, f64) {
    let mut total = 0.0;
    let mut count = 0usize;
    let mut length = 0.0;
    for i in 0..p.len() - 1 {
        length +=
            ((p[i + 1].x - p[i].x).powi(2) + (p[i + 1].y - p[i].y).powi(2) + (p[i + 1].z - p[i].z).powi(2)).sqrt();
    }
    for i in 1..p.len() - 1 {
        let a = (p[i].x - p[i - 1].x, p[i].y - p[i - 1].y, p[i].z - p[i - 1].z);
        let b = (p[i + 1].x - p[i].x, p[i + 1].y - p[i].y, p[i + 1].z - p[i].z);
        let na = (a.0 * a.0 + a.1 * a.1 + a.2 * a.2).sqrt();
        let nb = (b.0 * b.0 + b.1 * b.1 + b.2 * b.2).sqrt();
        if na == 0.0 || nb == 0.0 {
            continue;
        }
        let c = ((a.0 * b.0 + a.1 * b.1 + a.2 * b.2) / (na * nb)).clamp(-1.0, 1.0);
        let theta = c.acos();
        if theta > 1e-12 {
            total += theta;
            count += 1;
        }
    }
    let s1 = total.to_degrees() / length;
    let s2 = if count == 0 {
        0.0
    } else {
        total.to_degrees() / count as f64
    };
    (s1, s2)
}
