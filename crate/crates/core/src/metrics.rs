//! Path length, turning smoothness and run instrumentation.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::Point25;

/// Turning angles at or below this many radians count as zero.
pub const ANGLE_EPS: f64 = 1e-12;

/// Sum of consecutive distances, in 3-D.
pub fn path_length(points: &[Point25]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: points.len(),
        });
    }
    Ok(points
        .windows(2)
        .map(|w| {
            let (dx, dy, dz) = (w[1].x - w[0].x, w[1].y - w[0].y, w[1].z - w[0].z);
            (dx * dx + dy * dy + dz * dz).sqrt()
        })
        .sum())
}

/// Turning angle between consecutive segments at each interior vertex.
/// Degenerate segments contribute zero.
pub fn turning_angles(points: &[Point25]) -> Vec<f64> {
    points
        .windows(3)
        .map(|w| {
            let a = [w[1].x - w[0].x, w[1].y - w[0].y, w[1].z - w[0].z];
            let b = [w[2].x - w[1].x, w[2].y - w[1].y, w[2].z - w[1].z];
            let na = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
            let nb = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
            if na == 0.0 || nb == 0.0 {
                return 0.0;
            }
            let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
            let cross = [
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ];
            let cn = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
            // atan2 keeps precision for the tiny per-step angles of dense paths
            cn.atan2(dot)
        })
        .collect()
}

/// Returns `(s1, s2)`: total turning per unit length in degrees per meter,
/// and mean turning angle over turning vertices in degrees.
pub fn smoothness(points: &[Point25]) -> Result<(f64, f64)> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    let length = path_length(points)?;
    let angles = turning_angles(points);
    let total: f64 = angles.iter().sum();
    let turning = angles.iter().filter(|&&a| a > ANGLE_EPS).count();
    let s1 = if length > 0.0 { total.to_degrees() / length } else { 0.0 };
    let s2 = if turning > 0 {
        total.to_degrees() / turning as f64
    } else {
        0.0
    };
    Ok((s1, s2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathReport {
    pub planner_name: String,
    pub scenario: String,
    pub success: bool,
    pub time_s: f64,
    pub memory_mb: f64,
    pub length_m: f64,
    pub s1: f64,
    pub s2: f64,
    pub n_points: usize,
    pub runs: usize,
    pub successes: usize,
    /// Standard deviations, filled for repeated runs.
    pub time_std: Option<f64>,
    pub length_std: Option<f64>,
    pub s1_std: Option<f64>,
    pub s2_std: Option<f64>,
}

impl PathReport {
    fn failed(name: &str, scenario: &str, time_s: f64, memory_mb: f64) -> Self {
        Self {
            planner_name: name.to_string(),
            scenario: scenario.to_string(),
            success: false,
            time_s,
            memory_mb,
            length_m: 0.0,
            s1: 0.0,
            s2: 0.0,
            n_points: 0,
            runs: 1,
            successes: 0,
            time_std: None,
            length_std: None,
            s1_std: None,
            s2_std: None,
        }
    }
}

/// Peak resident set size of this process in bytes, where available.
fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

fn reset_peak_rss() {
    // writing 5 resets VmHWM to the current RSS on Linux; ignored elsewhere
    let _ = std::fs::write("/proc/self/clear_refs", "5");
}

/// Runs `planner` once and measures wall time and peak resident-set growth.
/// A `None` from the planner is recorded as a failed report.
pub fn instrumented_run<F>(name: &str, scenario: &str, planner: F) -> PathReport
where
    F: FnOnce() -> Option<Vec<Point25>>,
{
    reset_peak_rss();
    let before = peak_rss_bytes();
    let t0 = Instant::now();
    let out = planner();
    let time_s = t0.elapsed().as_secs_f64();
    let memory_mb = match (before, peak_rss_bytes()) {
        (Some(a), Some(b)) => b.saturating_sub(a) as f64 / (1024.0 * 1024.0),
        _ => 0.0,
    };
    let Some(points) = out else {
        return PathReport::failed(name, scenario, time_s, memory_mb);
    };
    let length_m = path_length(&points).unwrap_or(0.0);
    let (s1, s2) = smoothness(&points).unwrap_or((0.0, 0.0));
    PathReport {
        planner_name: name.to_string(),
        scenario: scenario.to_string(),
        success: true,
        time_s,
        memory_mb,
        length_m,
        s1,
        s2,
        n_points: points.len(),
        runs: 1,
        successes: 1,
        time_std: None,
        length_std: None,
        s1_std: None,
        s2_std: None,
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Runs a seeded planner once per seed in `0..reps` (offset by `seed`), one
/// after another, and averages time, length and smoothness over successes.
pub fn instrumented_repeats<F>(name: &str, scenario: &str, reps: usize, seed: u64, mut planner: F) -> PathReport
where
    F: FnMut(u64) -> Option<Vec<Point25>>,
{
    let runs: Vec<PathReport> = (0..reps as u64)
        .map(|i| instrumented_run(name, scenario, || planner(seed.wrapping_add(i))))
        .collect();
    let ok: Vec<&PathReport> = runs.iter().filter(|r| r.success).collect();
    let pick = |f: fn(&PathReport) -> f64| mean_std(&ok.iter().map(|r| f(r)).collect::<Vec<_>>());
    let (time_s, time_std) = mean_std(&runs.iter().map(|r| r.time_s).collect::<Vec<_>>());
    let memory_mb = runs.iter().map(|r| r.memory_mb).fold(0.0, f64::max);
    let (length_m, length_std) = pick(|r| r.length_m);
    let (s1, s1_std) = pick(|r| r.s1);
    let (s2, s2_std) = pick(|r| r.s2);
    let n_points = ok.iter().map(|r| r.n_points).max().unwrap_or(0);
    PathReport {
        planner_name: name.to_string(),
        scenario: scenario.to_string(),
        success: !ok.is_empty(),
        time_s,
        memory_mb,
        length_m,
        s1,
        s2,
        n_points,
        runs: runs.len(),
        successes: ok.len(),
        time_std: Some(time_std),
        length_std: Some(length_std),
        s1_std: Some(s1_std),
        s2_std: Some(s2_std),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(xy: &[(f64, f64)]) -> Vec<Point25> {
        xy.iter().map(|&(x, y)| Point25::planar(x, y)).collect()
    }

    #[test]
    fn lengths() {
        assert_eq!(path_length(&pts(&[(0.0, 0.0), (3.0, 4.0)])).unwrap(), 5.0);
        assert_eq!(path_length(&pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)])).unwrap(), 2.0);
        let square = pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)]);
        assert_eq!(path_length(&square).unwrap(), 4.0);
        assert!(matches!(
            path_length(&pts(&[(0.0, 0.0)])),
            Err(Error::TooFewPoints { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn hand_cases() {
        assert_eq!(
            smoothness(&pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)])).unwrap(),
            (0.0, 0.0)
        );
        let (s1, s2) = smoothness(&pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)])).unwrap();
        assert_eq!(s1, 45.0);
        assert_eq!(s2, 90.0);
        assert!(smoothness(&pts(&[(0.0, 0.0), (1.0, 0.0)])).is_err());
    }

    #[test]
    fn degenerate_segment_counts_as_no_turn() {
        let a = turning_angles(&pts(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]));
        assert_eq!(a, vec![0.0]);
    }

    #[test]
    fn failed_planner_is_recorded() {
        let r = instrumented_run("none", "empty", || None);
        assert!(!r.success);
        assert_eq!(r.length_m, 0.0);
    }

    #[test]
    fn repeats_average() {
        let r = instrumented_repeats("fixed", "s", 4, 0, |seed| {
            let k = 1.0 + seed as f64;
            Some(pts(&[(0.0, 0.0), (k, 0.0), (k, k)]))
        });
        assert_eq!(r.runs, 4);
        assert_eq!(r.successes, 4);
        assert!((r.length_m - 5.0).abs() < 1e-12);
        assert!((r.s2 - 90.0).abs() < 1e-12);
        assert_eq!(r.s2_std, Some(0.0));
    }
}
