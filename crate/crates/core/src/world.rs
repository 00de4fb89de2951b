//! Occupancy and elevation model of the planning world.
//!
//! Maps are loaded from a small JSON dialect of polygonal obstacles (each with
//! an optional finite height) and rectangular elevation ramps, rasterized onto
//! a square grid. Points outside the grid count as occupied, so the map edge
//! behaves like a wall.

use serde::{Deserialize, Serialize};

use crate::curvature::PlannerState;
use crate::error::{Error, Result};

/// A point in the plane with a height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point25 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point25 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn planar(x: f64, y: f64) -> Self {
        Self { x, y, z: 0.0 }
    }

    pub fn distance_xy(&self, other: &Point25) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Obstacle expansion radius for a robot of radius `r_robot`.
pub fn expansion_radius(r_robot: f64) -> f64 {
    (r_robot + 0.1).max(r_robot * 1.1)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObstacleSpec {
    pub polygon: Vec<[f64; 2]>,
    /// `None` is an obstacle of unbounded height.
    #[serde(default)]
    pub height: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RampAxis {
    X,
    Y,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RampSpec {
    pub rect: [f64; 4],
    pub z0: f64,
    pub z1: f64,
    pub axis: RampAxis,
}

/// The on-disk scenario document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioDoc {
    pub resolution: f64,
    pub width: f64,
    pub height: f64,
    #[serde(default)]
    pub obstacles: Vec<ObstacleSpec>,
    #[serde(default)]
    pub ramps: Vec<RampSpec>,
    pub start: [f64; 3],
    pub goal: [f64; 2],
    /// Robot radius used for inflation; absent means the map is used as is.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robot_radius: Option<f64>,
    /// Free-form parameter overrides, read by front ends.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

/// A parsed scenario: the rasterized world plus its start pose and goal.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub world: WorldModel,
    /// (x, y, heading)
    pub start: [f64; 3],
    pub goal: [f64; 2],
    pub robot_radius: Option<f64>,
    pub config: Option<serde_json::Value>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ScenarioDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_doc(&doc)
    }

    pub fn from_doc(doc: &ScenarioDoc) -> Result<Self> {
        let world = WorldModel::from_doc(doc)?;
        for (name, x, y) in [
            ("start", doc.start[0], doc.start[1]),
            ("goal", doc.goal[0], doc.goal[1]),
        ] {
            if !world.contains(x, y) {
                return Err(Error::InvalidScenario(format!(
                    "{name} ({x}, {y}) lies outside the map"
                )));
            }
        }
        if !doc.start[2].is_finite() {
            return Err(Error::InvalidScenario("start heading is not finite".into()));
        }
        if let Some(r) = doc.robot_radius {
            if !(r >= 0.0) {
                return Err(Error::InvalidScenario(format!("robot radius {r} is negative")));
            }
        }
        Ok(Self {
            world,
            start: doc.start,
            goal: doc.goal,
            robot_radius: doc.robot_radius,
            config: doc.config.clone(),
        })
    }

    /// Start pose as a planner state resting on the ground.
    pub fn start_state(&self) -> PlannerState {
        let [x, y, theta] = self.start;
        let z = self.world.elevation_at(x, y).unwrap_or(0.0);
        PlannerState::new(x, y, theta).with_z(z)
    }

    pub fn goal_point(&self) -> Point25 {
        let [x, y] = self.goal;
        Point25::new(x, y, self.world.elevation_at(x, y).unwrap_or(0.0))
    }

    /// World inflated by the scenario's robot radius, if one is declared.
    pub fn planning_world(&self) -> WorldModel {
        match self.robot_radius {
            Some(r) => self.world.inflate(r),
            None => self.world.clone(),
        }
    }
}

/// Parses a scenario document and returns only its world.
pub fn load_scenario(text: &str) -> Result<WorldModel> {
    Scenario::from_json(text).map(|s| s.world)
}

/// Rasterized 2.5-D world.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldModel {
    resolution: f64,
    origin: (f64, f64),
    width: usize,
    height: usize,
    occupancy: Vec<bool>,
    elevation: Vec<f64>,
    obstacle_height: Vec<f64>,
    source_occupancy: Vec<bool>,
    source_height: Vec<f64>,
    inflation: Option<f64>,
}

impl WorldModel {
    /// An obstacle-free, flat world.
    pub fn new(resolution: f64, width: usize, height: usize) -> Result<Self> {
        if !(resolution > 0.0) || !resolution.is_finite() {
            return Err(Error::InvalidScenario(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidScenario("map must have at least one cell".into()));
        }
        let n = width * height;
        Ok(Self {
            resolution,
            origin: (0.0, 0.0),
            width,
            height,
            occupancy: vec![false; n],
            elevation: vec![0.0; n],
            obstacle_height: vec![0.0; n],
            source_occupancy: vec![false; n],
            source_height: vec![0.0; n],
            inflation: None,
        })
    }

    fn from_doc(doc: &ScenarioDoc) -> Result<Self> {
        if !(doc.resolution > 0.0) || !doc.resolution.is_finite() {
            return Err(Error::InvalidScenario(format!(
                "resolution must be positive, got {}",
                doc.resolution
            )));
        }
        if !(doc.width > 0.0 && doc.height > 0.0) {
            return Err(Error::InvalidScenario("map extent must be positive".into()));
        }
        let width = (doc.width / doc.resolution).round().max(1.0) as usize;
        let height = (doc.height / doc.resolution).round().max(1.0) as usize;
        let mut world = Self::new(doc.resolution, width, height)?;
        let (w_m, h_m) = world.extent();

        for (k, obstacle) in doc.obstacles.iter().enumerate() {
            if obstacle.polygon.len() < 3 {
                return Err(Error::InvalidScenario(format!(
                    "obstacle {k} needs at least three vertices"
                )));
            }
            for &[x, y] in &obstacle.polygon {
                if !(x >= 0.0 && x <= w_m && y >= 0.0 && y <= h_m) {
                    return Err(Error::InvalidScenario(format!(
                        "obstacle {k} vertex ({x}, {y}) lies outside the map"
                    )));
                }
            }
            let h = match obstacle.height {
                None => f64::INFINITY,
                Some(h) if h >= 0.0 => h,
                Some(h) => return Err(Error::InvalidScenario(format!("obstacle {k} has negative height {h}"))),
            };
            world.rasterize_polygon(&obstacle.polygon, h);
        }

        for (k, ramp) in doc.ramps.iter().enumerate() {
            let [x0, y0, x1, y1] = ramp.rect;
            if !(x0 < x1 && y0 < y1) || x0 < 0.0 || y0 < 0.0 || x1 > w_m || y1 > h_m {
                return Err(Error::InvalidScenario(format!(
                    "ramp {k} rectangle is empty or outside the map"
                )));
            }
            world.rasterize_ramp(ramp);
        }

        world.source_occupancy = world.occupancy.clone();
        world.source_height = world.obstacle_height.clone();
        Ok(world)
    }

    fn rasterize_polygon(&mut self, polygon: &[[f64; 2]], h: f64) {
        let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for &[x, y] in polygon {
            lo_x = lo_x.min(x);
            lo_y = lo_y.min(y);
            hi_x = hi_x.max(x);
            hi_y = hi_y.max(y);
        }
        let res = self.resolution;
        let i0 = ((lo_x / res).floor() as isize).max(0) as usize;
        let j0 = ((lo_y / res).floor() as isize).max(0) as usize;
        let i1 = ((hi_x / res).ceil() as usize).min(self.width);
        let j1 = ((hi_y / res).ceil() as usize).min(self.height);
        for j in j0..j1 {
            for i in i0..i1 {
                let cell = [
                    i as f64 * res,
                    j as f64 * res,
                    (i + 1) as f64 * res,
                    (j + 1) as f64 * res,
                ];
                if polygon_touches_cell(polygon, cell) {
                    let idx = j * self.width + i;
                    if self.occupancy[idx] {
                        self.obstacle_height[idx] = self.obstacle_height[idx].max(h);
                    } else {
                        self.occupancy[idx] = true;
                        self.obstacle_height[idx] = h;
                    }
                }
            }
        }
    }

    fn rasterize_ramp(&mut self, ramp: &RampSpec) {
        let [x0, y0, x1, y1] = ramp.rect;
        for j in 0..self.height {
            for i in 0..self.width {
                let (cx, cy) = self.cell_center(i, j);
                if cx < x0 || cx > x1 || cy < y0 || cy > y1 {
                    continue;
                }
                let t = match ramp.axis {
                    RampAxis::X => (cx - x0) / (x1 - x0),
                    RampAxis::Y => (cy - y0) / (y1 - y0),
                };
                let z = ramp.z0 + (ramp.z1 - ramp.z0) * t;
                let idx = j * self.width + i;
                self.elevation[idx] = self.elevation[idx].max(z);
            }
        }
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Map extent in meters.
    pub fn extent(&self) -> (f64, f64) {
        (
            self.width as f64 * self.resolution,
            self.height as f64 * self.resolution,
        )
    }

    /// Radius the map was inflated with, if any.
    pub fn inflation_radius(&self) -> Option<f64> {
        self.inflation
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (w, h) = self.extent();
        let (u, v) = (x - self.origin.0, y - self.origin.1);
        u >= 0.0 && v >= 0.0 && u < w && v < h
    }

    pub fn cell_of(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        if !self.contains(x, y) {
            return None;
        }
        let i = ((x - self.origin.0) / self.resolution).floor() as usize;
        let j = ((y - self.origin.1) / self.resolution).floor() as usize;
        Some((i.min(self.width - 1), j.min(self.height - 1)))
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.origin.0 + (i as f64 + 0.5) * self.resolution,
            self.origin.1 + (j as f64 + 0.5) * self.resolution,
        )
    }

    pub fn is_cell_occupied(&self, i: usize, j: usize) -> bool {
        self.occupancy[j * self.width + i]
    }

    /// Occupancy before inflation.
    pub fn is_source_occupied(&self, i: usize, j: usize) -> bool {
        self.source_occupancy[j * self.width + i]
    }

    /// Height of the obstacle in a cell; infinite for walls, 0 for free cells.
    pub fn cell_obstacle_height(&self, i: usize, j: usize) -> f64 {
        let idx = j * self.width + i;
        if self.occupancy[idx] {
            self.obstacle_height[idx]
        } else {
            0.0
        }
    }

    pub fn cell_elevation(&self, i: usize, j: usize) -> f64 {
        self.elevation[j * self.width + i]
    }

    pub fn occupied_count(&self) -> usize {
        self.occupancy.iter().filter(|&&o| o).count()
    }

    /// Marks a cell as an obstacle of height `h` in the source layer as well.
    pub fn set_obstacle(&mut self, i: usize, j: usize, h: f64) {
        let idx = j * self.width + i;
        self.occupancy[idx] = true;
        self.obstacle_height[idx] = h;
        self.source_occupancy[idx] = true;
        self.source_height[idx] = h;
    }

    pub fn set_elevation(&mut self, i: usize, j: usize, z: f64) {
        self.elevation[j * self.width + i] = z;
    }

    /// Grows every obstacle by `max(r_robot + 0.1, 1.1 r_robot)`.
    ///
    /// Inflation always starts from the original obstacles, so re-inflating
    /// with the same radius returns an identical world. Each inflated cell
    /// takes the height of its nearest original obstacle cell.
    pub fn inflate(&self, r_robot: f64) -> WorldModel {
        let r_exp = expansion_radius(r_robot.max(0.0));
        if self.inflation == Some(r_exp) {
            return self.clone();
        }
        let mut out = self.clone();
        out.occupancy.clone_from(&self.source_occupancy);
        out.obstacle_height.clone_from(&self.source_height);
        out.inflation = Some(r_exp);

        let reach = r_exp / self.resolution;
        let reach_sq = reach * reach + 1e-9;
        let span = reach.floor() as isize;
        let mut offsets = Vec::new();
        for dj in -span..=span {
            for di in -span..=span {
                let d2 = (di * di + dj * dj) as f64;
                if d2 <= reach_sq && d2 > 0.0 {
                    offsets.push((di, dj, d2));
                }
            }
        }

        // (squared distance to nearest source, its height) for inflated cells
        let mut best: Vec<Option<(f64, f64)>> = vec![None; self.width * self.height];
        for j in 0..self.height {
            for i in 0..self.width {
                let src = j * self.width + i;
                if !self.source_occupancy[src] {
                    continue;
                }
                let h = self.source_height[src];
                for &(di, dj, d2) in &offsets {
                    let (ni, nj) = (i as isize + di, j as isize + dj);
                    if ni < 0 || nj < 0 || ni >= self.width as isize || nj >= self.height as isize {
                        continue;
                    }
                    let idx = nj as usize * self.width + ni as usize;
                    if self.source_occupancy[idx] {
                        continue;
                    }
                    let better = match best[idx] {
                        None => true,
                        Some((bd, bh)) => d2 < bd || (d2 == bd && h > bh),
                    };
                    if better {
                        best[idx] = Some((d2, h));
                    }
                }
            }
        }
        for (idx, b) in best.into_iter().enumerate() {
            if let Some((_, h)) = b {
                out.occupancy[idx] = true;
                out.obstacle_height[idx] = h;
            }
        }
        out
    }

    /// Bilinear interpolation of the elevation field between cell centers.
    pub fn elevation_at(&self, x: f64, y: f64) -> Result<f64> {
        if !self.contains(x, y) {
            return Err(Error::OutOfBounds { x, y });
        }
        Ok(self.elevation_unchecked(x, y))
    }

    fn elevation_unchecked(&self, x: f64, y: f64) -> f64 {
        let u = (x - self.origin.0) / self.resolution - 0.5;
        let v = (y - self.origin.1) / self.resolution - 0.5;
        let (i0, fu) = split_axis(u, self.width);
        let (j0, fv) = split_axis(v, self.height);
        let i1 = (i0 + 1).min(self.width - 1);
        let j1 = (j0 + 1).min(self.height - 1);
        let e = |i: usize, j: usize| self.elevation[j * self.width + i];
        let bottom = e(i0, j0) * (1.0 - fu) + e(i1, j0) * fu;
        let top = e(i0, j1) * (1.0 - fu) + e(i1, j1) * fu;
        bottom * (1.0 - fv) + top * fv
    }

    /// True when `p` is inside an obstacle or outside the map.
    pub fn occupied_at(&self, p: &Point25) -> bool {
        self.occupied_xyz(p.x, p.y, p.z)
    }

    #[inline]
    pub(crate) fn occupied_xyz(&self, x: f64, y: f64, z: f64) -> bool {
        let Some((i, j)) = self.cell_of(x, y) else {
            return true;
        };
        let idx = j * self.width + i;
        if !self.occupancy[idx] {
            return false;
        }
        let h = self.obstacle_height[idx];
        if h.is_infinite() {
            return true;
        }
        z < self.elevation_unchecked(x, y) + h
    }

    /// Index of the first occupied point, if any.
    pub fn first_collision(&self, waypoints: &[Point25]) -> Option<usize> {
        waypoints.iter().position(|p| self.occupied_at(p))
    }
}

fn split_axis(u: f64, n: usize) -> (usize, f64) {
    if u <= 0.0 {
        return (0, 0.0);
    }
    let i = u.floor() as usize;
    if i >= n - 1 {
        return (n - 1, 0.0);
    }
    (i, u - i as f64)
}

/// Crossing-number point-in-polygon test.
pub(crate) fn point_in_polygon(polygon: &[[f64; 2]], x: f64, y: f64) -> bool {
    let mut inside = false;
    let n = polygon.len();
    let mut j = n - 1;
    for i in 0..n {
        let [xi, yi] = polygon[i];
        let [xj, yj] = polygon[j];
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Whether the polygon overlaps the open interior of an axis-aligned cell.
fn polygon_touches_cell(polygon: &[[f64; 2]], cell: [f64; 4]) -> bool {
    let [x0, y0, x1, y1] = cell;
    if point_in_polygon(polygon, 0.5 * (x0 + x1), 0.5 * (y0 + y1)) {
        return true;
    }
    let n = polygon.len();
    (0..n).any(|k| {
        let a = polygon[k];
        let b = polygon[(k + 1) % n];
        segment_crosses_open_box(a, b, cell)
    })
}

fn segment_crosses_open_box(a: [f64; 2], b: [f64; 2], cell: [f64; 4]) -> bool {
    let [x0, y0, x1, y1] = cell;
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (p, q) in [(-dx, a[0] - x0), (dx, x1 - a[0]), (-dy, a[1] - y0), (dy, y1 - a[1])] {
        if p == 0.0 {
            if q <= 0.0 {
                return false;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    if t1 - t0 <= 1e-12 {
        return false;
    }
    let tm = 0.5 * (t0 + t1);
    let (mx, my) = (a[0] + tm * dx, a[1] + tm * dy);
    mx > x0 && mx < x1 && my > y0 && my < y1
}
