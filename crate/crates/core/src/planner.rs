//! Planar smooth path planning by curvature integration.
//!
//! The planner alternates two moves. Direct planning turns toward the goal
//! with a clothoid ramp pair and then drives straight. When that collides,
//! the path retreats from the collision to a branch point, stored in a
//! [`PathTree`], and explore planning sweeps the heading offset on either
//! side of the goal bearing until a collision-free curvature segment is
//! found. Every segment starts and ends at zero curvature, so concatenated
//! segments keep the per-step curvature change bounded by `rho * dt`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::crossing::{self, CrossConfig};
use crate::curvature::{
    end_state, integrate, inverse_integrate, min_length_for, normalize_angle, ramp_out_values, ramp_values,
    CurvatureProfile, PlannerState, Waypoints,
};
use crate::error::{Error, Result};
use crate::tree::{Locator, PathTree, Side, TreeDump, TreeStats};
use crate::world::{Point25, WorldModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    /// Integration step, equal to arc length per step.
    pub dt: f64,
    /// Curvature rate per unit arc length.
    pub rho: f64,
    /// Coarse sweep increment.
    pub theta_a1: f64,
    /// Fine sweep increment; `theta_a1 / 5` when unset.
    pub theta_a2: Option<f64>,
    /// Extension past the previous collision distance for each probe.
    pub l_add: f64,
    /// Arc length to back off from a collision before branching.
    pub back_obs: f64,
    /// Goal tolerance; `2 * dt` when unset.
    pub goal_tol: Option<f64>,
    pub max_nodes: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            rho: 0.4,
            theta_a1: 0.1,
            theta_a2: None,
            l_add: 0.5,
            back_obs: 0.5,
            goal_tol: None,
            max_nodes: 10_000,
        }
    }
}

impl PlannerConfig {
    pub fn theta_a2(&self) -> f64 {
        self.theta_a2.unwrap_or(self.theta_a1 / 5.0)
    }

    pub fn goal_tol(&self) -> f64 {
        self.goal_tol.unwrap_or(2.0 * self.dt)
    }

    /// Tolerance for "heading already points at the goal".
    pub fn heading_tol(&self, state: &PlannerState) -> f64 {
        state.kappa.abs() * self.dt + 1e-6
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dt", self.dt),
            ("rho", self.rho),
            ("theta_a1", self.theta_a1),
            ("theta_a2", self.theta_a2()),
            ("l_add", self.l_add),
            ("back_obs", self.back_obs),
            ("goal_tol", self.goal_tol()),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.theta_a2() >= self.theta_a1 {
            return Err(Error::InvalidParameter(format!(
                "theta_a2 ({}) must be smaller than theta_a1 ({})",
                self.theta_a2(),
                self.theta_a1
            )));
        }
        if self.max_nodes == 0 {
            return Err(Error::InvalidParameter("max_nodes must be at least 1".into()));
        }
        Ok(())
    }

    fn back_steps(&self) -> usize {
        (self.back_obs / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanStatus {
    Success,
    /// The heuristic index ran empty.
    Exhausted,
    /// The node budget ran out.
    Budget,
}

#[derive(Debug, Clone)]
pub struct PlanResult {
    pub profile: CurvatureProfile,
    pub waypoints: Waypoints,
    pub tree_stats: TreeStats,
    pub status: PlanStatus,
    pub explore_calls: usize,
    pub tree: TreeDump,
}

impl PlanResult {
    pub fn is_success(&self) -> bool {
        self.status == PlanStatus::Success
    }
}

/// Index of the first occupied state of a rollout, the start included.
pub fn collision_index(world: &WorldModel, start: PlannerState, profile: &CurvatureProfile) -> Option<usize> {
    profile.rollout(start).position(|s| world.occupied_xyz(s.x, s.y, s.z))
}

/// Residual between heading and goal bearing after a turn of `delta`.
fn bearing_residual(state: &PlannerState, goal: &Point25, delta: f64, cfg: &PlannerConfig) -> (f64, PlannerState) {
    let turn = turn_profile(delta, cfg);
    let end = end_state(*state, &turn);
    (normalize_angle(end.bearing_to(goal.x, goal.y) - end.theta), end)
}

fn turn_profile(delta: f64, cfg: &PlannerConfig) -> CurvatureProfile {
    let mut k = ramp_values(delta, cfg.rho, None, cfg.dt);
    if !k.is_empty() {
        k.push(0.0);
    }
    CurvatureProfile::new(cfg.dt, k, cfg.rho)
}

/// Turn-then-straight profile from `state` to `goal`.
///
/// The turn is a symmetric clothoid pair whose net heading change is solved
/// so that the exit heading points at the goal, with the bearing re-evaluated
/// from where the turn ends. No collision checking happens here.
pub fn direct_plan(
    world: &WorldModel,
    state: &PlannerState,
    goal: &Point25,
    cfg: &PlannerConfig,
) -> Result<CurvatureProfile> {
    let _ = world;
    if state.distance_xy(goal.x, goal.y) <= cfg.goal_tol() {
        return Ok(CurvatureProfile::empty(cfg.dt, cfg.rho));
    }
    let e0 = normalize_angle(state.bearing_to(goal.x, goal.y) - state.theta);
    let delta = if e0.abs() <= cfg.heading_tol(state) {
        0.0
    } else {
        solve_turn(state, goal, e0, cfg)?
    };
    let mut profile = turn_profile(delta, cfg);
    let end = end_state(*state, &profile);
    let d = end.distance_xy(goal.x, goal.y);
    let steps = (d / cfg.dt).round() as usize;
    profile.extend(&CurvatureProfile::straight(cfg.dt, steps, cfg.rho))?;
    Ok(profile)
}

fn solve_turn(state: &PlannerState, goal: &Point25, e0: f64, cfg: &PlannerConfig) -> Result<f64> {
    const GRID: f64 = 0.05;
    let limit = 2.0 * PI - GRID;
    let first = e0.signum();
    for dir in [first, -first] {
        let mut prev = (0.0, e0);
        let mut t = GRID;
        while t < limit {
            let delta = dir * t;
            let (g, _) = bearing_residual(state, goal, delta, cfg);
            // a sign change without a wrap-around jump brackets a root
            if g == 0.0 {
                return Ok(delta);
            }
            if g.signum() != prev.1.signum() && (g - prev.1).abs() < PI {
                return Ok(bisect(state, goal, prev.0, prev.1, delta, cfg));
            }
            prev = (delta, g);
            t += GRID;
        }
    }
    Err(Error::DegenerateSpiral)
}

fn bisect(state: &PlannerState, goal: &Point25, mut a: f64, mut ga: f64, mut b: f64, cfg: &PlannerConfig) -> f64 {
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        let (gm, _) = bearing_residual(state, goal, m, cfg);
        if gm == 0.0 {
            return m;
        }
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
        if (b - a).abs() < 1e-13 {
            break;
        }
    }
    0.5 * (a + b)
}

/// Cuts `profile` after `k` steps and appends a ramp back to zero curvature,
/// moving the cut earlier until the ramp is collision-free. Never cuts below
/// `min_k`. Returns the new profile and the cut used.
pub fn truncate_with_ramp_out(
    world: &WorldModel,
    entry: PlannerState,
    profile: &CurvatureProfile,
    k: usize,
    min_k: usize,
    rho: f64,
) -> Option<(CurvatureProfile, usize)> {
    let k = k.min(profile.len());
    if k == 0 {
        return Some((profile.prefix(0), 0));
    }
    let states: Vec<PlannerState> = profile.rollout(entry).take(k + 1).collect();
    let mut cut = k;
    loop {
        let kappa = profile.kappas[cut - 1];
        let ramp = CurvatureProfile::new(profile.dt, ramp_out_values(kappa, rho, profile.dt), rho);
        let blocked = ramp
            .rollout(states[cut])
            .skip(1)
            .any(|s| world.occupied_xyz(s.x, s.y, s.z));
        if !blocked {
            let mut out = profile.prefix(cut);
            out.extend(&ramp).ok()?;
            return Some((out, cut));
        }
        if cut <= min_k.max(1) {
            return None;
        }
        cut -= 1;
    }
}

/// Keeps the part of the free profile that ends nearest the old collision.
///
/// Both profiles are rolled out from `entry`; the free rollout is cut at its
/// sample closest to the old profile's state at `o_idx_old`, and curvature is
/// ramped back to zero from there.
pub fn p_fimin(
    world: &WorldModel,
    entry: PlannerState,
    free: &CurvatureProfile,
    old: &CurvatureProfile,
    o_idx_old: usize,
    rho: f64,
) -> Result<(CurvatureProfile, usize)> {
    if free.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let target = old
        .rollout(entry)
        .nth(o_idx_old)
        .ok_or_else(|| Error::InvalidParameter(format!("collision index {o_idx_old} is past the old profile")))?;
    let mut best = (0usize, f64::INFINITY);
    for (i, s) in free.rollout(entry).enumerate() {
        let d = s.distance_xy(target.x, target.y);
        if d < best.1 {
            best = (i, d);
        }
    }
    let (prefix, cut) = truncate_with_ramp_out(world, entry, free, best.0, 0, rho).unwrap_or((free.prefix(0), 0));
    Ok((prefix, cut))
}

#[derive(Debug, Clone)]
pub struct ExploreResult {
    /// Collision-free segment to commit.
    pub profile: CurvatureProfile,
    pub side: Side,
    /// The full collision-free probe the segment was cut from.
    pub free_probe: CurvatureProfile,
    /// Step at which the probe was cut.
    pub cut: usize,
    /// Heading offset from the goal bearing of the free probe.
    pub offset: f64,
}

#[derive(Debug, Clone)]
pub enum ExploreOutcome {
    Found(ExploreResult),
    /// No free direction within a half-turn on the allowed sides.
    Exhausted,
}

struct Probe {
    profile: CurvatureProfile,
    hit: Option<usize>,
}

fn probe(
    world: &WorldModel,
    state: &PlannerState,
    target_heading: f64,
    l_int: f64,
    cfg: &PlannerConfig,
) -> Result<Probe> {
    let lim = PI - 1e-6;
    let delta = normalize_angle(target_heading - state.theta).clamp(-lim, lim);
    // enlarge the length rather than skip an infeasible angle
    let mut length = l_int.max(min_length_for(delta, cfg.rho, cfg.dt) + cfg.dt);
    let profile = loop {
        match inverse_integrate(delta, cfg.rho, length, cfg.dt) {
            Ok(p) => break p,
            Err(Error::Infeasible { .. }) => length += 2.0 * cfg.dt,
            Err(e) => return Err(e),
        }
    };
    let hit = collision_index(world, *state, &profile);
    Ok(Probe { profile, hit })
}

/// Two-phase heading sweep around the goal bearing.
///
/// The coarse phase alternates left and right offsets in steps of
/// `theta_a1`, each probe reaching `l_add` past the previous collision on
/// that side. Once a probe is free, the fine phase backs off one coarse step
/// and advances by `theta_a2` to hug the obstacle edge.
pub fn explore_plan(
    world: &WorldModel,
    state: &PlannerState,
    goal: &Point25,
    cfg: &PlannerConfig,
    sides: &[Side],
) -> Result<ExploreOutcome> {
    if sides.is_empty() {
        return Ok(ExploreOutcome::Exhausted);
    }
    let theta_0 = state.bearing_to(goal.x, goal.y);
    let straight_len = state.distance_xy(goal.x, goal.y).max(cfg.l_add);
    let initial = probe(world, state, theta_0, straight_len, cfg)?;

    let Some(first_hit) = initial.hit else {
        // nothing to sweep around: commit a short piece of the free probe
        let heading = normalize_angle(theta_0 - state.theta);
        let preferred = if heading >= 0.0 { Side::L } else { Side::R };
        let side = if sides.contains(&preferred) {
            preferred
        } else {
            sides[0]
        };
        let k = ((cfg.l_add / cfg.dt).round() as usize).max(1);
        let (profile, cut) = truncate_with_ramp_out(world, *state, &initial.profile, k, 1, cfg.rho)
            .unwrap_or_else(|| (initial.profile.clone(), initial.profile.len()));
        return Ok(ExploreOutcome::Found(ExploreResult {
            profile,
            side,
            free_probe: initial.profile,
            cut,
            offset: 0.0,
        }));
    };

    let sign = |s: Side| if s == Side::L { 1.0 } else { -1.0 };
    let mut last: [(CurvatureProfile, usize); 2] = [(initial.profile.clone(), first_hit), (initial.profile, first_hit)];
    let slot = |s: Side| if s == Side::L { 0 } else { 1 };

    let mut found: Option<(Side, f64, CurvatureProfile)> = None;
    let mut k = 1usize;
    'coarse: loop {
        let off = k as f64 * cfg.theta_a1;
        if off >= PI {
            break;
        }
        for side in [Side::L, Side::R] {
            if !sides.contains(&side) {
                continue;
            }
            let signed = sign(side) * off;
            let l_int = last[slot(side)].1 as f64 * cfg.dt + cfg.l_add;
            let p = probe(world, state, theta_0 + signed, l_int, cfg)?;
            match p.hit {
                Some(hit) => last[slot(side)] = (p.profile, hit),
                None => {
                    found = Some((side, signed, p.profile));
                    break 'coarse;
                }
            }
        }
        k += 1;
    }
    let Some((side, coarse_off, mut free)) = found else {
        return Ok(ExploreOutcome::Exhausted);
    };

    // fine phase from the last colliding offset
    let s = sign(side);
    let base = coarse_off - s * cfg.theta_a1;
    let (mut old, mut old_hit) = last[slot(side)].clone();
    let mut offset = coarse_off;
    let theta_a2 = cfg.theta_a2();
    let mut j = 1usize;
    while (j as f64) * theta_a2 < cfg.theta_a1 - 1e-12 {
        let off = base + s * j as f64 * theta_a2;
        let l_int = old_hit as f64 * cfg.dt + cfg.l_add;
        let p = probe(world, state, theta_0 + off, l_int, cfg)?;
        match p.hit {
            Some(hit) => {
                old = p.profile;
                old_hit = hit;
            }
            None => {
                free = p.profile;
                offset = off;
                break;
            }
        }
        j += 1;
    }

    let (profile, cut) = p_fimin(world, *state, &free, &old, old_hit, cfg.rho)?;
    Ok(ExploreOutcome::Found(ExploreResult {
        profile,
        side,
        free_probe: free,
        cut,
        offset,
    }))
}

enum Extension {
    /// Collision-free all the way to the goal: the lead plus its direct leg.
    Reached(CurvatureProfile),
    /// Segment to store as a branch node.
    Branch(CurvatureProfile),
}

pub(crate) struct Session<'a> {
    world: &'a WorldModel,
    goal: Point25,
    cfg: &'a PlannerConfig,
    cross: Option<&'a CrossConfig>,
}

impl<'a> Session<'a> {
    pub(crate) fn new(
        world: &'a WorldModel,
        goal: Point25,
        cfg: &'a PlannerConfig,
        cross: Option<&'a CrossConfig>,
    ) -> Self {
        Self {
            world,
            goal,
            cfg,
            cross,
        }
    }

    fn direct_from(&self, state: &PlannerState) -> Option<CurvatureProfile> {
        direct_plan(self.world, state, &self.goal, self.cfg).ok()
    }

    /// Runs direct planning after `lead`; on collision, backs off and returns
    /// the branch segment (or a crossing, when enabled and possible).
    fn extend(&self, entry: PlannerState, lead: &CurvatureProfile) -> Extension {
        let lead_end = end_state(entry, lead);
        let (combined, hit) = match self.direct_from(&lead_end) {
            Some(d) => {
                let combined = lead.concat(&d).expect("profiles share dt");
                let hit = collision_index(self.world, entry, &combined);
                (combined, hit)
            }
            None => (lead.clone(), Some(lead.len())),
        };
        let Some(hit) = hit else {
            return Extension::Reached(combined);
        };
        if let Some(cross_cfg) = self.cross {
            if let Some(seg) = crossing::try_cross(self.world, entry, &combined, hit, cross_cfg, self.cfg) {
                return Extension::Branch(seg);
            }
        }
        // back off by back_obs, doubling while the branch point is too close
        // to the obstacle for any probe to turn away from it
        let mut back = self.cfg.back_steps().max(1);
        loop {
            let b = hit.saturating_sub(back);
            let seg = truncate_with_ramp_out(self.world, entry, &combined, b, 0, self.cfg.rho)
                .map(|(p, _)| p)
                .unwrap_or_else(|| combined.prefix(0));
            if b == 0 || self.can_explore(&end_state(entry, &seg)) {
                return Extension::Branch(seg);
            }
            back *= 2;
        }
    }

    fn can_explore(&self, state: &PlannerState) -> bool {
        matches!(
            explore_plan(self.world, state, &self.goal, self.cfg, &[Side::L, Side::R]),
            Ok(ExploreOutcome::Found(_))
        )
    }

    fn coincides(&self, tree: &PathTree, exit: &PlannerState) -> bool {
        tree.nodes()
            .iter()
            .any(|n| n.exit_state.distance_xy(exit.x, exit.y) <= self.cfg.dt)
    }

    pub(crate) fn run(&self, start: PlannerState) -> Result<PlanResult> {
        let cfg = self.cfg;
        cfg.validate()?;
        if !start.is_finite() {
            return Err(Error::NonFiniteState);
        }
        if self.world.occupied_xyz(start.x, start.y, start.z) {
            return Err(Error::StartOccupied);
        }
        if self.world.occupied_at(&self.goal) {
            return Err(Error::GoalOccupied);
        }
        let mut start = start;
        start.kappa = 0.0;
        start.tau_z = 0.0;

        let empty = CurvatureProfile::empty(cfg.dt, cfg.rho);
        let root_value = match self.extend(start, &empty) {
            Extension::Reached(p) => {
                let tree = PathTree::new(start, empty, self.goal);
                return self.finish(start, p, &tree, 0);
            }
            Extension::Branch(seg) => seg,
        };
        let mut tree = PathTree::new(start, root_value, self.goal);
        let mut direct_tried = vec![false];
        let mut explore_calls = 0usize;

        loop {
            if tree.len() >= cfg.max_nodes {
                return Ok(self.failure(start, &tree, PlanStatus::Budget, explore_calls));
            }
            let Ok((loc, _)) = tree.peek_min() else {
                return Ok(self.failure(start, &tree, PlanStatus::Exhausted, explore_calls));
            };
            let id = tree.resolve(&loc)?;
            let node = tree.nodes()[id].clone();

            if !direct_tried[id] {
                direct_tried[id] = true;
                if let Some(d) = self.direct_from(&node.exit_state) {
                    if collision_index(self.world, node.exit_state, &d).is_none() {
                        let mut profile = tree.reconstruct(&loc)?;
                        profile.extend(&d)?;
                        return self.finish(start, profile, &tree, explore_calls);
                    }
                }
            }

            explore_calls += 1;
            let outcome = explore_plan(self.world, &node.exit_state, &self.goal, cfg, &node.vacant_sides())?;
            let found = match outcome {
                ExploreOutcome::Exhausted => {
                    tree.prune(&loc)?;
                    continue;
                }
                ExploreOutcome::Found(f) => f,
            };

            match self.extend(node.exit_state, &found.profile) {
                Extension::Reached(combined) => {
                    let leaf = tree.insert(&loc, found.side, found.profile.clone())?;
                    direct_tried.push(true);
                    let mut profile = tree.reconstruct(&leaf)?;
                    profile.extend(&CurvatureProfile {
                        kappas: combined.kappas[found.profile.len()..].to_vec(),
                        taus: combined.taus.as_ref().map(|t| t[found.profile.len()..].to_vec()),
                        ..combined.clone()
                    })?;
                    return self.finish(start, profile, &tree, explore_calls);
                }
                Extension::Branch(mut seg) => {
                    let exit = end_state(node.exit_state, &seg);
                    if seg.is_empty() || self.coincides(&tree, &exit) {
                        seg = self.commit_small_segment(&node.exit_state, &found, &tree);
                    }
                    tree.insert(&loc, found.side, seg)?;
                    direct_tried.push(false);
                }
            }
        }
    }

    /// Guards against pseudo-feasible branches: a branch that would land on
    /// an existing node advances half of `l_add` along the free probe instead.
    fn commit_small_segment(&self, entry: &PlannerState, found: &ExploreResult, tree: &PathTree) -> CurvatureProfile {
        let cfg = self.cfg;
        let extra = (0.5 * cfg.l_add / cfg.dt).round() as usize;
        let want = (found.cut + extra).min(found.free_probe.len());
        if let Some((seg, _)) = truncate_with_ramp_out(self.world, *entry, &found.free_probe, want, found.cut, cfg.rho)
        {
            let exit = end_state(*entry, &seg);
            if !seg.is_empty() && !self.coincides(tree, &exit) {
                return seg;
            }
        }
        if !found.profile.is_empty() {
            let exit = end_state(*entry, &found.profile);
            if !self.coincides(tree, &exit) {
                return found.profile.clone();
            }
        }
        found.free_probe.clone()
    }

    fn finish(
        &self,
        start: PlannerState,
        profile: CurvatureProfile,
        tree: &PathTree,
        explore_calls: usize,
    ) -> Result<PlanResult> {
        let waypoints = integrate(start, &profile)?;
        debug_assert!(self.world.first_collision(&waypoints.points()).is_none());
        Ok(PlanResult {
            profile,
            waypoints,
            tree_stats: tree.stats(),
            status: PlanStatus::Success,
            explore_calls,
            tree: tree.dump(),
        })
    }

    fn failure(&self, start: PlannerState, tree: &PathTree, status: PlanStatus, explore_calls: usize) -> PlanResult {
        let profile = CurvatureProfile::empty(self.cfg.dt, self.cfg.rho);
        let waypoints = Waypoints {
            states: vec![start],
            arc_length: vec![0.0],
        };
        PlanResult {
            profile,
            waypoints,
            tree_stats: tree.stats(),
            status,
            explore_calls,
            tree: tree.dump(),
        }
    }
}

/// Plans a curvature-continuous path from `start` to `goal` on the plane.
pub fn plan(world: &WorldModel, start: PlannerState, goal: Point25, cfg: &PlannerConfig) -> Result<PlanResult> {
    Session::new(world, goal, cfg, None).run(start)
}

/// Locator of the root, re-exported for callers that walk result trees.
pub fn root_locator() -> Locator {
    Locator::root()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open_world() -> WorldModel {
        WorldModel::new(0.1, 100, 100).unwrap()
    }

    fn cfg() -> PlannerConfig {
        PlannerConfig::default()
    }

    fn block(w: &mut WorldModel, x0: usize, x1: usize, y0: usize, y1: usize) {
        for i in x0..x1 {
            for j in y0..y1 {
                w.set_obstacle(i, j, f64::INFINITY);
            }
        }
    }

    #[test]
    fn aligned_goal_is_pure_straight() {
        let w = open_world();
        let p = direct_plan(
            &w,
            &PlannerState::new(1.0, 1.0, 0.0),
            &Point25::planar(6.0, 1.0),
            &cfg(),
        )
        .unwrap();
        assert_eq!(p.len(), 500);
        assert!(p.kappas.iter().all(|&k| k == 0.0));
    }

    #[test]
    fn quarter_turn_reaches_goal() {
        let w = open_world();
        let start = PlannerState::new(2.0, 2.0, 0.0);
        let goal = Point25::planar(2.0, 7.0);
        let p = direct_plan(&w, &start, &goal, &cfg()).unwrap();
        let end = end_state(start, &p);
        assert!(end.distance_xy(goal.x, goal.y) <= cfg().goal_tol());
        assert!(p.max_curvature_jump() <= 0.4 * 0.01 + 1e-9);
        // the turn overshoots a little because it starts away from the goal line
        assert!(p.heading_change() > 1.2 && p.heading_change() < 2.2);
    }

    #[test]
    fn at_goal_gives_empty_profile() {
        let w = open_world();
        let p = direct_plan(
            &w,
            &PlannerState::new(3.0, 3.0, 1.0),
            &Point25::planar(3.01, 3.0),
            &cfg(),
        )
        .unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn explore_turns_toward_the_open_side() {
        let mut w = open_world();
        // wall ahead, open on the left (positive y)
        block(&mut w, 50, 52, 0, 60);
        let state = PlannerState::new(2.0, 4.0, 0.0);
        let goal = Point25::planar(9.0, 4.0);
        match explore_plan(&w, &state, &goal, &cfg(), &[Side::L, Side::R]).unwrap() {
            ExploreOutcome::Found(f) => {
                assert_eq!(f.side, Side::L);
                assert!(f.offset > 0.0);
                assert!(collision_index(&w, state, &f.profile).is_none());
                assert!(f.profile.max_curvature_jump() <= 0.004 + 1e-9);
                assert_eq!(*f.profile.kappas.last().unwrap(), 0.0);
            }
            ExploreOutcome::Exhausted => panic!("expected a free direction"),
        }
    }

    #[test]
    fn enclosed_pocket_exhausts() {
        let mut w = open_world();
        block(&mut w, 40, 60, 40, 41);
        block(&mut w, 40, 60, 59, 60);
        block(&mut w, 40, 41, 40, 60);
        block(&mut w, 59, 60, 40, 60);
        let state = PlannerState::new(5.0, 5.0, 0.0);
        let goal = Point25::planar(9.0, 5.0);
        assert!(matches!(
            explore_plan(&w, &state, &goal, &cfg(), &[Side::L, Side::R]).unwrap(),
            ExploreOutcome::Exhausted
        ));
    }

    #[test]
    fn symmetric_corridor_prefers_left() {
        let mut w = open_world();
        block(&mut w, 50, 52, 30, 70);
        let state = PlannerState::new(1.0, 5.0, 0.0);
        let goal = Point25::planar(9.0, 5.0);
        let a = explore_plan(&w, &state, &goal, &cfg(), &[Side::L, Side::R]).unwrap();
        let b = explore_plan(&w, &state, &goal, &cfg(), &[Side::L, Side::R]).unwrap();
        match (a, b) {
            (ExploreOutcome::Found(a), ExploreOutcome::Found(b)) => {
                assert_eq!(a.side, Side::L);
                assert_eq!(a.profile, b.profile);
            }
            _ => panic!("expected a free direction"),
        }
    }

    #[test]
    fn p_fimin_full_profile_when_free_matches_old() {
        let w = open_world();
        let entry = PlannerState::new(1.0, 1.0, 0.0);
        let free = inverse_integrate(0.3, 0.4, 2.0, 0.01).unwrap();
        let (out, cut) = p_fimin(&w, entry, &free, &free, free.len(), 0.4).unwrap();
        assert_eq!(cut, free.len());
        assert_eq!(out.kappas[..free.len()], free.kappas[..]);
    }

    #[test]
    fn p_fimin_cuts_at_nearest_sample() {
        let w = open_world();
        let entry = PlannerState::new(1.0, 5.0, 0.0);
        let old = inverse_integrate(0.2, 0.4, 3.0, 0.01).unwrap();
        let free = inverse_integrate(0.5, 0.4, 3.0, 0.01).unwrap();
        let o = 180;
        let (out, cut) = p_fimin(&w, entry, &free, &old, o, 0.4).unwrap();
        let target = old.rollout(entry).nth(o).unwrap();
        let brute = free
            .rollout(entry)
            .enumerate()
            .min_by(|a, b| {
                a.1.distance_xy(target.x, target.y)
                    .total_cmp(&b.1.distance_xy(target.x, target.y))
            })
            .unwrap()
            .0;
        assert_eq!(cut, brute);
        // only the ramp-out follows the cut
        assert_eq!(out.kappas[..cut], free.kappas[..cut]);
        assert!(out.kappas[cut..].iter().all(|k| k.abs() <= free.kappas[cut - 1].abs()));
        assert_eq!(*out.kappas.last().unwrap(), 0.0);
    }

    #[test]
    fn p_fimin_rejects_empty() {
        let w = open_world();
        let e = CurvatureProfile::empty(0.01, 0.4);
        assert_eq!(
            p_fimin(&w, PlannerState::new(1.0, 1.0, 0.0), &e, &e, 0, 0.4).unwrap_err(),
            Error::EmptyProfile
        );
    }

    #[test]
    fn empty_map_is_one_direct_segment() {
        let w = open_world();
        let r = plan(&w, PlannerState::new(1.0, 1.0, 0.0), Point25::planar(8.0, 6.0), &cfg()).unwrap();
        assert!(r.is_success());
        assert_eq!(r.explore_calls, 0);
        assert_eq!(r.tree.nodes.len(), 1);
    }

    #[test]
    fn long_wall_is_smooth_and_clear() {
        let mut w = WorldModel::new(0.1, 200, 140).unwrap();
        block(&mut w, 98, 102, 0, 100);
        let w = w.inflate(0.3);
        let goal = Point25::planar(18.0, 6.0);
        let r = plan(&w, PlannerState::new(2.0, 6.0, 0.0), goal, &cfg()).unwrap();
        assert!(r.is_success());
        let pts = r.waypoints.points();
        assert!(w.first_collision(&pts).is_none());
        assert!(r.waypoints.last().distance_xy(goal.x, goal.y) <= cfg().goal_tol());
        let (_, s2) = crate::metrics::smoothness(&pts).unwrap();
        assert!(s2 < 1.0);
    }

    #[test]
    fn sealed_goal_exhausts() {
        let mut w = open_world();
        block(&mut w, 60, 90, 60, 62);
        block(&mut w, 60, 90, 88, 90);
        block(&mut w, 60, 62, 60, 90);
        block(&mut w, 88, 90, 60, 90);
        let r = plan(&w, PlannerState::new(1.0, 1.0, 0.0), Point25::planar(7.5, 7.5), &cfg()).unwrap();
        assert_eq!(r.status, PlanStatus::Exhausted);
    }

    #[test]
    fn occupied_endpoints_are_errors() {
        let mut w = open_world();
        block(&mut w, 0, 20, 0, 20);
        let c = cfg();
        assert_eq!(
            plan(&w, PlannerState::new(1.0, 1.0, 0.0), Point25::planar(8.0, 8.0), &c).unwrap_err(),
            Error::StartOccupied
        );
        assert_eq!(
            plan(&w, PlannerState::new(8.0, 8.0, 0.0), Point25::planar(1.0, 1.0), &c).unwrap_err(),
            Error::GoalOccupied
        );
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        let bad = PlannerConfig {
            theta_a2: Some(0.1),
            ..cfg()
        };
        assert!(bad.validate().is_err());
        let bad = PlannerConfig { dt: 0.0, ..cfg() };
        assert!(bad.validate().is_err());
        assert!((cfg().theta_a2() - 0.02).abs() < 1e-15);
        assert!((cfg().goal_tol() - 0.02).abs() < 1e-15);
    }

    #[test]
    fn planning_is_deterministic() {
        let mut w = open_world();
        block(&mut w, 45, 55, 20, 80);
        let w = w.inflate(0.3);
        let run = || plan(&w, PlannerState::new(1.0, 5.0, 0.0), Point25::planar(9.0, 5.5), &cfg()).unwrap();
        let (a, b) = (run(), run());
        assert!(a.is_success());
        assert_eq!(a.profile, b.profile);
    }
}
