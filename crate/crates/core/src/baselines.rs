//! Comparison planners: grid search (A*, Dijkstra, greedy best-first) and RRT.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::{Point25, WorldModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridSearch {
    AStar,
    Dijkstra,
    Gbfs,
}

impl GridSearch {
    pub fn name(self) -> &'static str {
        match self {
            GridSearch::AStar => "astar",
            GridSearch::Dijkstra => "dijkstra",
            GridSearch::Gbfs => "gbfs",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    pub cells: Vec<(usize, usize)>,
    /// Cell centres along the path.
    pub points: Vec<Point25>,
    /// Euclidean length in meters.
    pub cost: f64,
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    f: f64,
    g: f64,
    idx: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on f, then prefer deeper g, then index for determinism
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| self.g.total_cmp(&other.g))
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const MOVES: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

/// 8-connected search between the cells containing `start` and `goal`.
///
/// Diagonal moves may not cut a corner: both orthogonal neighbours must be
/// free. Returns `Ok(None)` when the goal is unreachable.
pub fn grid_search(world: &WorldModel, start: Point25, goal: Point25, mode: GridSearch) -> Result<Option<GridPath>> {
    let s = world
        .cell_of(start.x, start.y)
        .ok_or(Error::OutOfBounds { x: start.x, y: start.y })?;
    let g = world
        .cell_of(goal.x, goal.y)
        .ok_or(Error::OutOfBounds { x: goal.x, y: goal.y })?;
    if world.is_cell_occupied(s.0, s.1) {
        return Err(Error::StartOccupied);
    }
    if world.is_cell_occupied(g.0, g.1) {
        return Err(Error::GoalOccupied);
    }
    let (w, h) = (world.width(), world.height());
    let res = world.resolution();
    let id = |c: (usize, usize)| c.1 * w + c.0;
    let heur = |i: usize| {
        let (x, y) = ((i % w) as f64, (i / w) as f64);
        res * (x - g.0 as f64).hypot(y - g.1 as f64)
    };
    let weight = |gc: f64, hc: f64| match mode {
        GridSearch::AStar => gc + hc,
        GridSearch::Dijkstra => gc,
        GridSearch::Gbfs => hc,
    };

    let n = w * h;
    let mut best = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut heap = BinaryHeap::new();
    let si = id(s);
    let gi = id(g);
    best[si] = 0.0;
    heap.push(Entry {
        f: weight(0.0, heur(si)),
        g: 0.0,
        idx: si,
    });
    let free = |x: i64, y: i64| {
        x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h && !world.is_cell_occupied(x as usize, y as usize)
    };
    while let Some(Entry { g: gc, idx, .. }) = heap.pop() {
        if closed[idx] {
            continue;
        }
        closed[idx] = true;
        if idx == gi {
            break;
        }
        let (x, y) = ((idx % w) as i64, (idx / w) as i64);
        for (dx, dy) in MOVES {
            let (nx, ny) = (x + dx, y + dy);
            if !free(nx, ny) {
                continue;
            }
            if dx != 0 && dy != 0 && (!free(x + dx, y) || !free(x, y + dy)) {
                continue;
            }
            let ni = ny as usize * w + nx as usize;
            if closed[ni] {
                continue;
            }
            let step = if dx != 0 && dy != 0 {
                res * std::f64::consts::SQRT_2
            } else {
                res
            };
            let ng = gc + step;
            if ng < best[ni] {
                best[ni] = ng;
                parent[ni] = idx;
                heap.push(Entry {
                    f: weight(ng, heur(ni)),
                    g: ng,
                    idx: ni,
                });
            }
        }
    }
    if !closed[gi] {
        return Ok(None);
    }
    let mut cells = vec![];
    let mut cur = gi;
    loop {
        cells.push((cur % w, cur / w));
        if cur == si {
            break;
        }
        cur = parent[cur];
    }
    cells.reverse();
    let points = cells
        .iter()
        .map(|&(i, j)| {
            let (x, y) = world.cell_center(i, j);
            Point25::planar(x, y)
        })
        .collect();
    Ok(Some(GridPath {
        cells,
        points,
        cost: best[gi],
    }))
}

pub fn astar(world: &WorldModel, start: Point25, goal: Point25) -> Result<Option<GridPath>> {
    grid_search(world, start, goal, GridSearch::AStar)
}

pub fn dijkstra(world: &WorldModel, start: Point25, goal: Point25) -> Result<Option<GridPath>> {
    grid_search(world, start, goal, GridSearch::Dijkstra)
}

pub fn gbfs(world: &WorldModel, start: Point25, goal: Point25) -> Result<Option<GridPath>> {
    grid_search(world, start, goal, GridSearch::Gbfs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RrtParams {
    /// Extension step in meters; five grid cells when unset.
    pub step: Option<f64>,
    pub goal_bias: f64,
    pub max_iterations: usize,
}

impl Default for RrtParams {
    fn default() -> Self {
        Self {
            step: None,
            goal_bias: 0.05,
            max_iterations: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RrtResult {
    /// Tree vertices with parent indices; the root has no parent.
    pub nodes: Vec<(Point25, Option<usize>)>,
    pub path: Option<Vec<Point25>>,
    pub iterations: usize,
}

/// True when every cell the segment passes through is free.
fn segment_free(world: &WorldModel, a: Point25, b: Point25) -> bool {
    let (Some(ca), Some(cb)) = (world.cell_of(a.x, a.y), world.cell_of(b.x, b.y)) else {
        return false;
    };
    let res = world.resolution();
    let (ox, oy) = world.origin();
    let (u0, v0) = ((a.x - ox) / res, (a.y - oy) / res);
    let (du, dv) = ((b.x - a.x) / res, (b.y - a.y) / res);
    let (mut i, mut j) = (ca.0 as i64, ca.1 as i64);
    let (si, sj) = (du.signum() as i64, dv.signum() as i64);
    // parameter along the segment at the next vertical and horizontal cell boundary
    let next = |p: f64, d: f64, c: i64| {
        if d > 0.0 {
            ((c + 1) as f64 - p) / d
        } else if d < 0.0 {
            (c as f64 - p) / d
        } else {
            f64::INFINITY
        }
    };
    let mut t_u = next(u0, du, i);
    let mut t_v = next(v0, dv, j);
    let step_u = if du != 0.0 { 1.0 / du.abs() } else { f64::INFINITY };
    let step_v = if dv != 0.0 { 1.0 / dv.abs() } else { f64::INFINITY };
    loop {
        if world.is_cell_occupied(i as usize, j as usize) {
            return false;
        }
        if (i, j) == (cb.0 as i64, cb.1 as i64) || (t_u > 1.0 && t_v > 1.0) {
            return true;
        }
        if t_u < t_v {
            i += si;
            t_u += step_u;
        } else {
            j += sj;
            t_v += step_v;
        }
        if i < 0 || j < 0 || i as usize >= world.width() || j as usize >= world.height() {
            return false;
        }
    }
}

struct SpatialHash {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
    max_ring: i64,
}

impl SpatialHash {
    fn key(&self, p: &Point25) -> (i64, i64) {
        ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64)
    }

    fn insert(&mut self, p: &Point25, i: usize) {
        let k = self.key(p);
        self.buckets.entry(k).or_default().push(i);
    }

    fn nearest(&self, nodes: &[(Point25, Option<usize>)], q: &Point25) -> usize {
        let (cx, cy) = self.key(q);
        let mut best = (usize::MAX, f64::INFINITY);
        for r in 0..=self.max_ring {
            for dx in -r..=r {
                for dy in -r..=r {
                    if dx.abs() != r && dy.abs() != r {
                        continue;
                    }
                    if let Some(b) = self.buckets.get(&(cx + dx, cy + dy)) {
                        for &i in b {
                            let d = nodes[i].0.distance_xy(q);
                            if d < best.1 || (d == best.1 && i < best.0) {
                                best = (i, d);
                            }
                        }
                    }
                }
            }
            // anything in ring r + 1 is at least r cells away
            if best.0 != usize::MAX && best.1 <= r as f64 * self.cell {
                break;
            }
        }
        best.0
    }
}

/// Rapidly-exploring random tree with goal bias, seeded for reproducibility.
pub fn rrt(world: &WorldModel, start: Point25, goal: Point25, seed: u64, params: &RrtParams) -> Result<RrtResult> {
    if world.occupied_at(&Point25::planar(start.x, start.y)) {
        return Err(Error::StartOccupied);
    }
    if world.occupied_at(&Point25::planar(goal.x, goal.y)) {
        return Err(Error::GoalOccupied);
    }
    let step = params.step.unwrap_or(5.0 * world.resolution());
    if !(step > 0.0) {
        return Err(Error::InvalidParameter("rrt step must be positive".into()));
    }
    let (ox, oy) = world.origin();
    let (w, h) = world.extent();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Point25::planar(start.x, start.y);
    let goal = Point25::planar(goal.x, goal.y);
    let mut nodes: Vec<(Point25, Option<usize>)> = vec![(start, None)];
    let mut hash = SpatialHash {
        cell: step,
        buckets: HashMap::new(),
        max_ring: ((w.max(h) / step).ceil() as i64) + 2,
    };
    hash.insert(&start, 0);

    let trace = |nodes: &[(Point25, Option<usize>)], mut i: usize| {
        let mut path = vec![goal];
        loop {
            path.push(nodes[i].0);
            match nodes[i].1 {
                Some(p) => i = p,
                None => break,
            }
        }
        path.reverse();
        path
    };

    if start.distance_xy(&goal) <= step && segment_free(world, start, goal) {
        return Ok(RrtResult {
            path: Some(trace(&nodes, 0)),
            nodes,
            iterations: 0,
        });
    }
    for it in 1..=params.max_iterations {
        let q = if rng.gen::<f64>() < params.goal_bias {
            goal
        } else {
            Point25::planar(ox + rng.gen::<f64>() * w, oy + rng.gen::<f64>() * h)
        };
        let near = hash.nearest(&nodes, &q);
        let p = nodes[near].0;
        let d = p.distance_xy(&q);
        if d == 0.0 {
            continue;
        }
        let t = (step / d).min(1.0);
        let new = Point25::planar(p.x + (q.x - p.x) * t, p.y + (q.y - p.y) * t);
        if !segment_free(world, p, new) {
            continue;
        }
        let ni = nodes.len();
        nodes.push((new, Some(near)));
        hash.insert(&new, ni);
        if new.distance_xy(&goal) <= step && segment_free(world, new, goal) {
            let path = trace(&nodes, ni);
            return Ok(RrtResult {
                nodes,
                path: Some(path),
                iterations: it,
            });
        }
    }
    Ok(RrtResult {
        nodes,
        path: None,
        iterations: params.max_iterations,
    })
}
