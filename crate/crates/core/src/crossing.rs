//! Vertical crossing of low obstacles.
//!
//! A finite-height obstacle that blocks the planar path may be crossed when a
//! straight ray tilted upward by at most `theta_max` clears it. The crossing
//! itself keeps the in-plane curvature at zero and shapes the vertical slope
//! `tau_z` with ramps bounded by `rho_z`: flat lead, ascent, level run over
//! the obstacle, symmetric descent, flat tail.

use serde::{Deserialize, Serialize};

use crate::curvature::{end_state, ramp_values, CurvatureProfile, PlannerState};
use crate::error::{Error, Result};
use crate::planner::{truncate_with_ramp_out, PlanResult, PlannerConfig, Session};
use crate::world::{Point25, WorldModel};

/// Clearance kept above the obstacle top.
const TOP_MARGIN: f64 = 0.005;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CrossConfig {
    /// Largest climbing angle in radians; zero disables crossing.
    pub theta_max: f64,
    /// Slope rate per unit arc length.
    pub rho_z: f64,
    /// Retreat distance used for the crossability rays.
    pub back_obs: f64,
}

impl Default for CrossConfig {
    fn default() -> Self {
        Self {
            theta_max: 30f64.to_radians(),
            rho_z: 0.4,
            back_obs: 0.75,
        }
    }
}

impl CrossConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta_max >= 0.0) || self.theta_max >= std::f64::consts::FRAC_PI_2 {
            return Err(Error::InvalidParameter(format!(
                "theta_max must lie in [0, pi/2), got {}",
                self.theta_max
            )));
        }
        if !(self.rho_z > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rho_z must be positive, got {}",
                self.rho_z
            )));
        }
        if !(self.back_obs > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "back_obs must be positive, got {}",
                self.back_obs
            )));
        }
        Ok(())
    }
}

/// Extent of an obstacle along a straight ray, in arc length from the ray start.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstacleSpan {
    /// First sample inside the obstacle.
    pub near: f64,
    /// Last sample inside the obstacle.
    pub far: f64,
    /// Highest obstacle top (elevation plus height) along the span.
    pub top: f64,
}

/// Walks the planar footprint of the first obstacle hit by a ray from `from`.
pub fn obstacle_span(world: &WorldModel, from: &PlannerState, dt: f64) -> Result<ObstacleSpan> {
    let (c, s) = (from.theta.cos(), from.theta.sin());
    let (w, h) = world.extent();
    let max_steps = ((w.hypot(h)) / dt).ceil() as usize + 1;
    let cell_at = |i: usize| {
        let d = i as f64 * dt;
        world.cell_of(from.x + c * d, from.y + s * d)
    };
    let mut i = 0usize;
    let near = loop {
        if i > max_steps {
            return Err(Error::Uncrossable("no obstacle ahead".into()));
        }
        match cell_at(i) {
            None => return Err(Error::Uncrossable("ray leaves the map".into())),
            Some((ci, cj)) if world.is_cell_occupied(ci, cj) => break i,
            Some(_) => i += 1,
        }
    };
    let mut top = f64::NEG_INFINITY;
    let mut far = near;
    while let Some((ci, cj)) = cell_at(i) {
        if !world.is_cell_occupied(ci, cj) {
            break;
        }
        let hgt = world.cell_obstacle_height(ci, cj);
        if hgt.is_infinite() {
            return Err(Error::Uncrossable("obstacle has no finite height".into()));
        }
        top = top.max(world.cell_elevation(ci, cj) + hgt);
        far = i;
        i += 1;
    }
    if cell_at(i).is_none() {
        return Err(Error::Uncrossable("obstacle extends past the map edge".into()));
    }
    Ok(ObstacleSpan {
        near: near as f64 * dt,
        far: far as f64 * dt,
        top,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossability {
    pub crossable: bool,
    /// Smallest clearing tilt found, in radians.
    pub tilt: Option<f64>,
    pub retreat: PlannerState,
}

/// Casts straight rays tilted upward from a point `back_obs` before the
/// collision and reports the smallest tilt, in steps of `tilt_step`, whose
/// first collision lies beyond the far edge of the blocking obstacle.
pub fn crossability_check(
    world: &WorldModel,
    states: &[PlannerState],
    collision: usize,
    cfg: &CrossConfig,
    tilt_step: f64,
    dt: f64,
) -> Result<Crossability> {
    if collision >= states.len() {
        return Err(Error::InvalidParameter(format!(
            "collision index {collision} is past the path end"
        )));
    }
    if !(tilt_step > 0.0) {
        return Err(Error::InvalidParameter("tilt step must be positive".into()));
    }
    let back = (cfg.back_obs / dt).round() as usize;
    let retreat = states[collision.saturating_sub(back)];
    if world.occupied_xyz(retreat.x, retreat.y, retreat.z) {
        return Err(Error::RetreatOccupied);
    }
    let none = Crossability {
        crossable: false,
        tilt: None,
        retreat,
    };
    let span = match obstacle_span(world, &retreat, dt) {
        Ok(s) => s,
        Err(Error::Uncrossable(_)) => return Ok(none),
        Err(e) => return Err(e),
    };
    let (c, s) = (retreat.theta.cos(), retreat.theta.sin());
    let reach = span.far + cfg.back_obs;
    let n = (reach / dt).ceil() as usize;
    let mut k = 1usize;
    loop {
        let tilt = k as f64 * tilt_step;
        if tilt > cfg.theta_max + 1e-12 {
            return Ok(none);
        }
        let slope = tilt.tan();
        let hit = (1..=n).find_map(|i| {
            let d = i as f64 * dt;
            let blocked = world.occupied_xyz(retreat.x + c * d, retreat.y + s * d, retreat.z + d * slope);
            blocked.then_some(d)
        });
        let clear = match hit {
            None => true,
            Some(d) => d > span.far + 1e-9,
        };
        if clear {
            return Ok(Crossability {
                crossable: true,
                tilt: Some(tilt),
                retreat,
            });
        }
        k += 1;
    }
}

/// Phase boundaries of a crossing profile, as step indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossAnchors {
    /// Ascent start.
    pub s3: usize,
    /// Ascent end, at or before the near edge.
    pub s4: usize,
    /// Near edge.
    pub s5: usize,
    /// Far edge, where the descent starts.
    pub s6: usize,
    /// Descent end.
    pub s7: usize,
    /// Profile end.
    pub s8: usize,
}

#[derive(Debug, Clone)]
pub struct CrossProfile {
    pub profile: CurvatureProfile,
    pub anchors: CrossAnchors,
    pub top: f64,
}

/// Builds the straight vertical crossing of `span`, measured from `entry`.
pub fn build_cross_profile(
    world: &WorldModel,
    entry: PlannerState,
    span: &ObstacleSpan,
    cross: &CrossConfig,
    cfg: &PlannerConfig,
) -> Result<CrossProfile> {
    let dt = cfg.dt;
    let cap = Some(cross.theta_max.tan());
    let z_top = span.top + TOP_MARGIN;
    let rise = (z_top - entry.z).max(0.0);
    let up = ramp_values(rise, cross.rho_z, cap, dt);
    let i_near = (span.near / dt).round() as usize;
    let i_far = (span.far / dt).round() as usize;
    if up.len() > i_near {
        return Err(Error::Uncrossable(format!(
            "needs {:.2} m of run-up, {:.2} m available",
            up.len() as f64 * dt,
            span.near
        )));
    }
    let s3 = i_near - up.len();
    let (c, s) = (entry.theta.cos(), entry.theta.sin());

    // the landing height depends on where the descent ends
    let mut down = ramp_values(-rise, cross.rho_z, cap, dt);
    for _ in 0..3 {
        let d = (i_far + down.len()) as f64 * dt;
        let ground = world
            .elevation_at(entry.x + c * d, entry.y + s * d)
            .map_err(|_| Error::Uncrossable("landing is off the map".into()))?;
        let next = ramp_values(ground - (entry.z + rise), cross.rho_z, cap, dt);
        if next.len() == down.len() {
            down = next;
            break;
        }
        down = next;
    }
    let tail = ((cross.back_obs / 2.0) / dt).round() as usize;
    let s7 = i_far + down.len();
    let s8 = s7 + tail;

    let mut taus = vec![0.0; s8];
    taus[s3..i_near].copy_from_slice(&up);
    taus[i_far..s7].copy_from_slice(&down);
    let profile = CurvatureProfile {
        dt,
        kappas: vec![0.0; s8],
        taus: Some(taus),
        rho_max: cfg.rho,
        rho_z_max: Some(cross.rho_z),
    };
    if let Some(i) = profile.rollout(entry).position(|p| world.occupied_xyz(p.x, p.y, p.z)) {
        return Err(Error::Uncrossable(format!("crossing collides at step {i}")));
    }
    Ok(CrossProfile {
        profile,
        anchors: CrossAnchors {
            s3,
            s4: i_near,
            s5: i_near,
            s6: i_far,
            s7,
            s8,
        },
        top: z_top,
    })
}

/// Replaces the colliding tail of `combined` with a vertical crossing, when
/// the blocking obstacle is crossable. Returns the segment to store.
pub(crate) fn try_cross(
    world: &WorldModel,
    entry: PlannerState,
    combined: &CurvatureProfile,
    hit: usize,
    cross: &CrossConfig,
    cfg: &PlannerConfig,
) -> Option<CurvatureProfile> {
    if cross.theta_max <= 0.0 {
        return None;
    }
    let states: Vec<PlannerState> = combined.rollout(entry).take(hit + 1).collect();
    let check = crossability_check(world, &states, hit, cross, cfg.theta_a2(), cfg.dt).ok()?;
    if !check.crossable {
        return None;
    }
    // back off far enough for the climb, then go straight over
    let span_at_hit = obstacle_span(world, &states[hit.saturating_sub(1)], cfg.dt).ok()?;
    let rise = (span_at_hit.top + TOP_MARGIN - states[hit].z).max(0.0);
    let climb = ramp_values(rise, cross.rho_z, Some(cross.theta_max.tan()), cfg.dt).len();
    let mut back = climb + 2;
    while back <= hit {
        let cut = hit - back;
        if let Some((lead, _)) = truncate_with_ramp_out(world, entry, combined, cut, cut, cfg.rho) {
            let start = end_state(entry, &lead);
            if let Ok(span) = obstacle_span(world, &start, cfg.dt) {
                if let Ok(cp) = build_cross_profile(world, start, &span, cross, cfg) {
                    let mut seg = lead;
                    seg.extend(&cp.profile).ok()?;
                    return Some(seg);
                }
            }
        }
        back += (0.1 / cfg.dt).round().max(1.0) as usize;
    }
    None
}

/// Plans with vertical crossing of low obstacles enabled. With
/// `theta_max == 0` this is the planar planner.
pub fn plan_25d(
    world: &WorldModel,
    start: PlannerState,
    goal: Point25,
    cfg: &PlannerConfig,
    cross: &CrossConfig,
) -> Result<PlanResult> {
    cross.validate()?;
    Session::new(world, goal, cfg, Some(cross)).run(start)
}
