//! Curvature profiles and their integration into waypoints.
//!
//! A path is stored as a per-step curvature sequence with unit pseudo-velocity,
//! so every step advances exactly `dt` of arc length. The optional `taus`
//! channel carries the slope dz/ds for 2.5-D paths.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::Point25;

/// Curvatures below this magnitude are treated as zero.
pub const CURVATURE_EPS: f64 = 1e-9;

/// Wraps an angle into (-pi, pi].
pub fn normalize_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Pose with curvature and vertical slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub theta: f64,
    pub kappa: f64,
    pub tau_z: f64,
}

impl PlannerState {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            z: 0.0,
            theta: normalize_angle(theta),
            kappa: 0.0,
            tau_z: 0.0,
        }
    }

    pub fn with_z(mut self, z: f64) -> Self {
        self.z = z;
        self
    }

    pub fn is_finite(&self) -> bool {
        [self.x, self.y, self.z, self.theta, self.kappa, self.tau_z]
            .iter()
            .all(|v| v.is_finite())
    }

    pub fn point(&self) -> Point25 {
        Point25::new(self.x, self.y, self.z)
    }

    pub fn distance_xy(&self, x: f64, y: f64) -> f64 {
        (self.x - x).hypot(self.y - y)
    }

    pub fn bearing_to(&self, x: f64, y: f64) -> f64 {
        (y - self.y).atan2(x - self.x)
    }
}

/// Per-step curvature (and optional slope) sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureProfile {
    pub dt: f64,
    pub kappas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taus: Option<Vec<f64>>,
    /// Curvature rate bound the profile was built with.
    pub rho_max: f64,
    /// Slope rate bound, when `taus` is present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_z_max: Option<f64>,
}

impl CurvatureProfile {
    pub fn new(dt: f64, kappas: Vec<f64>, rho_max: f64) -> Self {
        Self {
            dt,
            kappas,
            taus: None,
            rho_max,
            rho_z_max: None,
        }
    }

    pub fn empty(dt: f64, rho_max: f64) -> Self {
        Self::new(dt, Vec::new(), rho_max)
    }

    pub fn straight(dt: f64, steps: usize, rho_max: f64) -> Self {
        Self::new(dt, vec![0.0; steps], rho_max)
    }

    pub fn len(&self) -> usize {
        self.kappas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappas.is_empty()
    }

    pub fn arc_length(&self) -> f64 {
        self.kappas.len() as f64 * self.dt
    }

    pub fn tau(&self, i: usize) -> f64 {
        self.taus.as_ref().map_or(0.0, |t| t[i])
    }

    /// Sum of kappa * dt: the net heading change.
    pub fn heading_change(&self) -> f64 {
        self.kappas.iter().sum::<f64>() * self.dt
    }

    pub fn peak_curvature(&self) -> f64 {
        self.kappas.iter().fold(0.0f64, |m, k| m.max(k.abs()))
    }

    /// Largest step-to-step curvature change, counting the step in from
    /// zero curvature at the start.
    pub fn max_curvature_jump(&self) -> f64 {
        max_jump(&self.kappas)
    }

    pub fn max_slope_jump(&self) -> f64 {
        self.taus.as_deref().map_or(0.0, max_jump)
    }

    /// Appends `other`, filling the slope channel with zeros where absent.
    pub fn extend(&mut self, other: &CurvatureProfile) -> Result<()> {
        if other.is_empty() {
            return Ok(());
        }
        if self.is_empty() && self.taus.is_none() {
            let rho = self.rho_max.max(other.rho_max);
            *self = other.clone();
            self.rho_max = rho;
            return Ok(());
        }
        if (self.dt - other.dt).abs() > 1e-15 {
            return Err(Error::StepMismatch(self.dt, other.dt));
        }
        if self.taus.is_some() || other.taus.is_some() {
            let n = self.len();
            let taus = self.taus.get_or_insert_with(|| vec![0.0; n]);
            match &other.taus {
                Some(t) => taus.extend_from_slice(t),
                None => taus.extend(std::iter::repeat_n(0.0, other.len())),
            }
            self.rho_z_max = match (self.rho_z_max, other.rho_z_max) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            };
        }
        self.kappas.extend_from_slice(&other.kappas);
        self.rho_max = self.rho_max.max(other.rho_max);
        Ok(())
    }

    pub fn concat(&self, other: &CurvatureProfile) -> Result<CurvatureProfile> {
        let mut out = self.clone();
        out.extend(other)?;
        Ok(out)
    }

    /// The first `n` steps.
    pub fn prefix(&self, n: usize) -> CurvatureProfile {
        let n = n.min(self.len());
        CurvatureProfile {
            dt: self.dt,
            kappas: self.kappas[..n].to_vec(),
            taus: self.taus.as_ref().map(|t| t[..n].to_vec()),
            rho_max: self.rho_max,
            rho_z_max: self.rho_z_max,
        }
    }

    /// Lazily integrated states, starting with `start` itself.
    pub fn rollout(&self, start: PlannerState) -> Rollout<'_> {
        Rollout {
            profile: self,
            state: start,
            index: 0,
            emitted_start: false,
        }
    }
}

fn max_jump(values: &[f64]) -> f64 {
    let mut prev = 0.0;
    let mut m = 0.0f64;
    for &v in values {
        m = m.max((v - prev).abs());
        prev = v;
    }
    m
}

/// Iterator over integrated states; yields `len + 1` states.
pub struct Rollout<'a> {
    profile: &'a CurvatureProfile,
    state: PlannerState,
    index: usize,
    emitted_start: bool,
}

impl Iterator for Rollout<'_> {
    type Item = PlannerState;

    fn next(&mut self) -> Option<PlannerState> {
        if !self.emitted_start {
            self.emitted_start = true;
            return Some(self.state);
        }
        let i = self.index;
        if i >= self.profile.len() {
            return None;
        }
        self.state = step(
            &self.state,
            self.profile.kappas[i],
            self.profile.tau(i),
            self.profile.dt,
        );
        self.index += 1;
        Some(self.state)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.profile.len() - self.index + usize::from(!self.emitted_start);
        (left, Some(left))
    }
}

/// One forward-Euler step with unit pseudo-velocity.
#[inline]
pub fn step(s: &PlannerState, kappa: f64, tau: f64, dt: f64) -> PlannerState {
    let (sin, cos) = s.theta.sin_cos();
    PlannerState {
        x: s.x + cos * dt,
        y: s.y + sin * dt,
        z: s.z + tau * dt,
        theta: normalize_angle(s.theta + kappa * dt),
        kappa,
        tau_z: tau,
    }
}

/// Integrated states with their cumulative arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct Waypoints {
    pub states: Vec<PlannerState>,
    pub arc_length: Vec<f64>,
}

impl Waypoints {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &PlannerState {
        self.states.last().expect("waypoints always include the start")
    }

    pub fn points(&self) -> Vec<Point25> {
        self.states.iter().map(PlannerState::point).collect()
    }
}

/// Rolls a profile out from `start` with forward Euler.
pub fn integrate(start: PlannerState, profile: &CurvatureProfile) -> Result<Waypoints> {
    if !start.is_finite() {
        return Err(Error::NonFiniteState);
    }
    if !(profile.dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dt must be positive, got {}",
            profile.dt
        )));
    }
    let states: Vec<PlannerState> = profile.rollout(start).collect();
    let arc_length = (0..states.len()).map(|i| i as f64 * profile.dt).collect();
    Ok(Waypoints { states, arc_length })
}

/// Final state of a rollout without allocating the intermediate states.
pub fn end_state(start: PlannerState, profile: &CurvatureProfile) -> PlannerState {
    profile.rollout(start).last().unwrap_or(start)
}

/// Heading change of a full triangular curvature ramp over `l_int`.
pub fn max_heading_change(rho: f64, l_int: f64) -> f64 {
    if l_int <= 0.0 {
        return 0.0;
    }
    rho * (l_int / 2.0).powi(2)
}

fn steps_for(length: f64, dt: f64) -> usize {
    (length / dt - 1e-9).ceil().max(0.0) as usize
}

/// Reachable heading change at the discrete level for `n` steps. The final
/// step is reserved for the return to zero curvature.
fn discrete_reach(rho: f64, n: usize, dt: f64) -> f64 {
    let m = (n / 2) as f64;
    rho * dt * dt * m * m
}

/// Shortest length that can realise a heading change of `theta` at rate `rho`.
pub fn min_length_for(theta: f64, rho: f64, dt: f64) -> f64 {
    if theta.abs() <= 0.0 {
        return 0.0;
    }
    let m = ((theta.abs() / (rho * dt * dt)).sqrt() - 1e-9).ceil().max(1.0);
    2.0 * m * dt
}

/// Nonzero part of a symmetric ramp whose sum times `dt` equals `target`.
///
/// Values climb from zero at a rate of at most `rate` per unit length, may
/// plateau at `cap`, and descend back. The ramp rate is scaled down so the
/// integral lands on `target` exactly instead of truncating the last step.
pub fn ramp_values(target: f64, rate: f64, cap: Option<f64>, dt: f64) -> Vec<f64> {
    let t = target.abs();
    if t == 0.0 {
        return Vec::new();
    }
    let sign = target.signum();
    let m = ((t / (rate * dt * dt)).sqrt() - 1e-9).ceil().max(1.0) as usize;
    let tri_rate = t / (dt * dt * (m * m) as f64);
    let peak = tri_rate * m as f64 * dt;
    let mut out = Vec::with_capacity(2 * m);
    match cap {
        Some(cap) if peak > cap => {
            // trapezoid: p ramp steps, q plateau steps, levelled so the area is exact
            let p = (cap / (rate * dt)).ceil().max(1.0) as usize;
            let total = (t / (cap * dt)).ceil() as usize;
            let q = total.saturating_sub(p);
            let level = t / (((p + q) as f64) * dt);
            let r = level / (p as f64);
            for j in 1..=p {
                out.push(sign * r * j as f64);
            }
            for _ in 0..q {
                out.push(sign * level);
            }
            for j in (1..p).rev() {
                out.push(sign * r * j as f64);
            }
        }
        _ => {
            let step = tri_rate * dt;
            for j in 1..=m {
                out.push(sign * step * j as f64);
            }
            for j in (1..m).rev() {
                out.push(sign * step * j as f64);
            }
        }
    }
    out
}

/// Builds a curvature profile of `ceil(l_int / dt)` steps whose heading
/// integral equals `theta_t`, ramping at most at rate `rho` and returning to
/// zero curvature before the end.
pub fn inverse_integrate(theta_t: f64, rho: f64, l_int: f64, dt: f64) -> Result<CurvatureProfile> {
    if !(rho > 0.0) || !(l_int > 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "inverse integration needs positive rho, length and dt (got {rho}, {l_int}, {dt})"
        )));
    }
    if !theta_t.is_finite() || theta_t.abs() >= PI {
        return Err(Error::InvalidParameter(format!(
            "heading change {theta_t} must lie in (-pi, pi)"
        )));
    }
    let n = steps_for(l_int, dt);
    let reach = discrete_reach(rho, n, dt);
    if theta_t.abs() > reach * (1.0 + 1e-12) {
        return Err(Error::Infeasible {
            requested: theta_t,
            reachable: reach,
        });
    }
    let mut kappas = ramp_values(theta_t, rho, None, dt);
    debug_assert!(kappas.len() < n || kappas.is_empty());
    kappas.resize(n, 0.0);
    Ok(CurvatureProfile::new(dt, kappas, rho))
}

/// Values that bring `from` back to zero in steps of at most `rate * dt`.
pub fn ramp_out_values(from: f64, rate: f64, dt: f64) -> Vec<f64> {
    let step = rate * dt;
    let mut out = Vec::new();
    let mut v = from;
    while v.abs() > step + CURVATURE_EPS * 1e-3 {
        v -= step * v.signum();
        out.push(v);
    }
    if from != 0.0 {
        out.push(0.0);
    }
    out
}
