//! Speed assignment along a curvature profile.
//!
//! Straight stretches accelerate toward `v_max`; curved stretches, and the
//! steps leading into them within a lookahead window, decelerate toward
//! `v_min`. A backward pass then limits speeds so the path ends at `v_end`
//! without exceeding the acceleration bound.

use serde::{Deserialize, Serialize};

use crate::curvature::{integrate, CurvatureProfile, PlannerState, CURVATURE_EPS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VelocityConfig {
    pub v_max: f64,
    pub v_min: f64,
    pub accel: f64,
    pub v_start: f64,
    pub v_end: f64,
    /// Steps to look ahead for curvature; derived from the speed range when unset.
    pub lookahead: Option<usize>,
}

impl Default for VelocityConfig {
    fn default() -> Self {
        Self {
            v_max: 1.0,
            v_min: 0.3,
            accel: 0.5,
            v_start: 0.0,
            v_end: 0.0,
            lookahead: None,
        }
    }
}

impl VelocityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_max > 0.0) || !(self.accel > 0.0) {
            return Err(Error::InvalidParameter("v_max and accel must be positive".into()));
        }
        if !(self.v_min > 0.0) || self.v_min > self.v_max {
            return Err(Error::InvalidParameter(format!(
                "v_min must lie in (0, v_max], got {}",
                self.v_min
            )));
        }
        if self.v_start < 0.0 || self.v_end < 0.0 || self.v_start > self.v_max || self.v_end > self.v_max {
            return Err(Error::InvalidParameter(
                "v_start and v_end must lie in [0, v_max]".into(),
            ));
        }
        Ok(())
    }

    /// Steps needed to brake from `v_max` to `v_min`.
    pub fn lookahead_steps(&self, dt: f64) -> usize {
        self.lookahead
            .unwrap_or_else(|| ((self.v_max - self.v_min) / (self.accel * dt)).ceil() as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub theta: f64,
    pub kappa: f64,
    pub tau_z: f64,
    pub v: f64,
    pub arc_length: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn speeds(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.v).collect()
    }
}

fn curved(profile: &CurvatureProfile, i: usize) -> bool {
    i < profile.len() && (profile.kappas[i].abs() > CURVATURE_EPS || profile.tau(i).abs() > CURVATURE_EPS)
}

/// Per-step speeds, one per state of the rollout (profile length plus one).
///
/// Step `i` is treated as curved when any step in `i..=i + lookahead` carries
/// curvature or slope change.
pub fn plan_speeds(profile: &CurvatureProfile, cfg: &VelocityConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let dt = profile.dt;
    let n = profile.len();
    let la = cfg.lookahead_steps(dt);
    let dv = cfg.accel * dt;

    // next curved step at or after each index
    let mut next_curved = vec![usize::MAX; n + 1];
    for i in (0..n).rev() {
        next_curved[i] = if curved(profile, i) { i } else { next_curved[i + 1] };
    }

    let mut v = Vec::with_capacity(n + 1);
    v.push(cfg.v_start);
    for i in 0..n {
        let cur = v[i];
        let near_curve = next_curved[i] != usize::MAX && next_curved[i] - i <= la;
        let next = if !near_curve {
            (cur + dv).min(cfg.v_max)
        } else if cur > cfg.v_min {
            (cur - dv).max(cfg.v_min)
        } else {
            (cur + dv).min(cfg.v_min)
        };
        v.push(next);
    }
    // arrive at v_end without braking harder than accel allows
    let last = v.len() - 1;
    v[last] = v[last].min(cfg.v_end);
    for i in (0..last).rev() {
        v[i] = v[i].min(v[i + 1] + dv);
    }
    Ok(v)
}

/// Integrates the profile and attaches speeds to every state.
pub fn plan_velocity(start: PlannerState, profile: &CurvatureProfile, cfg: &VelocityConfig) -> Result<Trajectory> {
    let waypoints = integrate(start, profile)?;
    let speeds = plan_speeds(profile, cfg)?;
    let points = waypoints
        .states
        .iter()
        .zip(&waypoints.arc_length)
        .zip(&speeds)
        .enumerate()
        .map(|(i, ((s, &arc), &v))| TrajectoryPoint {
            x: s.x,
            y: s.y,
            z: s.z,
            theta: s.theta,
            kappa: profile.kappas.get(i).copied().unwrap_or(0.0),
            tau_z: if i < profile.len() { profile.tau(i) } else { 0.0 },
            v,
            arc_length: arc,
        })
        .collect();
    Ok(Trajectory { points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(kappas: Vec<f64>) -> CurvatureProfile {
        CurvatureProfile::new(0.01, kappas, 0.4)
    }

    #[test]
    fn straight_path_accelerates_and_brakes() {
        let p = profile(vec![0.0; 1000]);
        let cfg = VelocityConfig::default();
        let v = plan_speeds(&p, &cfg).unwrap();
        assert_eq!(v.len(), 1001);
        assert_eq!(v[0], 0.0);
        assert_eq!(*v.last().unwrap(), 0.0);
        let peak = v.iter().cloned().fold(0.0, f64::max);
        assert!((peak - 1.0).abs() < 1e-9);
        for w in v.windows(2) {
            assert!((w[1] - w[0]).abs() <= 0.5 * 0.01 + 1e-12);
        }
    }

    #[test]
    fn slows_before_a_curve() {
        let mut k = vec![0.0; 1500];
        for x in k.iter_mut().skip(1200).take(100) {
            *x = 0.3;
        }
        let cfg = VelocityConfig {
            v_start: 1.0,
            v_end: 1.0,
            ..Default::default()
        };
        let v = plan_speeds(&profile(k), &cfg).unwrap();
        assert!(v[1200] <= cfg.v_min + 1e-9);
        let la = cfg.lookahead_steps(0.01);
        assert_eq!(la, 140);
        // braking starts inside the lookahead window
        let first_drop = (1..v.len()).find(|&i| v[i] < v[i - 1]).unwrap();
        assert!(1200 - first_drop <= la);
        assert!(1200 > first_drop);
    }

    #[test]
    fn below_v_min_on_curve_climbs_to_v_min() {
        let cfg = VelocityConfig {
            v_end: 0.3,
            ..Default::default()
        };
        let v = plan_speeds(&profile(vec![0.2; 200]), &cfg).unwrap();
        assert!((v[100] - 0.3).abs() < 1e-12);
        assert!(v.iter().all(|&s| s <= 0.3 + 1e-12));
    }

    #[test]
    fn rejects_bad_speeds() {
        let cfg = VelocityConfig {
            v_min: 2.0,
            ..Default::default()
        };
        assert!(plan_speeds(&profile(vec![0.0; 3]), &cfg).is_err());
    }

    #[test]
    fn trajectory_carries_profile_channels() {
        let p = profile(vec![0.0, 0.004, 0.0]);
        let t = plan_velocity(PlannerState::new(0.0, 0.0, 0.0), &p, &VelocityConfig::default()).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.points[1].kappa, 0.004);
        assert_eq!(t.points[3].kappa, 0.0);
        assert!((t.points[3].arc_length - 0.03).abs() < 1e-12);
    }
}
