use std::path::Path;

use anyhow::{Context, Result};
use fdspc_core::{PathReport, Point25, TrajectoryPoint, VelocityConfig};

pub fn write_trajectory(path: &Path, points: &[TrajectoryPoint]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectoryPoint>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    r.deserialize()
        .collect::<std::result::Result<Vec<TrajectoryPoint>, _>>()
        .with_context(|| format!("parsing {}", path.display()))
}

pub fn write_reports(dir: &Path, reports: &[PathReport]) -> Result<()> {
    let json = dir.join("report.json");
    let mut text = serde_json::to_string_pretty(reports)?;
    text.push('\n');
    std::fs::write(&json, text).with_context(|| format!("writing {}", json.display()))?;
    let path = dir.join("report.csv");
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
    for r in reports {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Trajectory for a polyline from a baseline planner. Curvature is the
/// turning angle at a vertex over the mean length of its two edges; speeds
/// follow the same limits as curvature profiles, integrated over the uneven
/// edge lengths.
#[allow(clippy::needless_range_loop)]
pub fn polyline_trajectory(points: &[Point25], cfg: &VelocityConfig) -> Vec<TrajectoryPoint> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    let edge = |i: usize| points[i].distance_xy(&points[i + 1]);
    let heading = |i: usize| (points[i + 1].y - points[i].y).atan2(points[i + 1].x - points[i].x);
    let mut out: Vec<TrajectoryPoint> = Vec::with_capacity(n);
    let mut s = 0.0;
    for i in 0..n {
        if i > 0 {
            s += edge(i - 1);
        }
        let theta = if n == 1 { 0.0 } else { heading(i.min(n - 2)) };
        let kappa = if i > 0 && i + 1 < n {
            let turn = fdspc_core::normalize_angle(heading(i) - heading(i - 1));
            let len = 0.5 * (edge(i - 1) + edge(i));
            if len > 0.0 {
                turn / len
            } else {
                0.0
            }
        } else {
            0.0
        };
        out.push(TrajectoryPoint {
            x: points[i].x,
            y: points[i].y,
            z: points[i].z,
            theta,
            kappa,
            tau_z: 0.0,
            v: 0.0,
            arc_length: s,
        });
    }
    // forward pass toward the per-vertex target, then the backward braking pass
    let target = |p: &TrajectoryPoint| if p.kappa.abs() > 1e-9 { cfg.v_min } else { cfg.v_max };
    out[0].v = cfg.v_start;
    for i in 1..n {
        let ds = out[i].arc_length - out[i - 1].arc_length;
        let reach = (out[i - 1].v.powi(2) + 2.0 * cfg.accel * ds).sqrt();
        out[i].v = reach.min(target(&out[i]));
    }
    out[n - 1].v = out[n - 1].v.min(cfg.v_end);
    for i in (0..n - 1).rev() {
        let ds = out[i + 1].arc_length - out[i].arc_length;
        let reach = (out[i + 1].v.powi(2) + 2.0 * cfg.accel * ds).sqrt();
        out[i].v = out[i].v.min(reach);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polyline_speeds_stay_within_limits() {
        let pts: Vec<Point25> = (0..40)
            .map(|i| {
                if i < 20 {
                    Point25::planar(i as f64 * 0.1, 0.0)
                } else {
                    Point25::planar(1.9, (i - 19) as f64 * 0.1)
                }
            })
            .collect();
        let cfg = VelocityConfig::default();
        let t = polyline_trajectory(&pts, &cfg);
        assert_eq!(t.len(), 40);
        assert_eq!(t[0].v, 0.0);
        assert_eq!(t[39].v, 0.0);
        assert!((t[19].kappa - std::f64::consts::FRAC_PI_2 / 0.1).abs() < 1e-9);
        assert!(t[19].v <= cfg.v_min + 1e-12);
        assert!((t[39].arc_length - 3.9).abs() < 1e-9);
        for w in t.windows(2) {
            let ds = w[1].arc_length - w[0].arc_length;
            assert!((w[1].v.powi(2) - w[0].v.powi(2)).abs() <= 2.0 * cfg.accel * ds + 1e-9);
        }
    }
}
