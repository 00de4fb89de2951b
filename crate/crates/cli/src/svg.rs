use std::fmt::Write as _;

use fdspc_core::tree::NodeStatus;
use fdspc_core::{Point25, TreeDump, WorldModel};

const PX_PER_M: f64 = 40.0;

/// Exploration structure drawn under the path.
pub enum Overlay<'a> {
    None,
    Tree(&'a TreeDump),
    /// RRT nodes with parent links.
    Rrt(&'a [(Point25, Option<usize>)]),
}

/// Renders occupancy, the inflation halo, an optional exploration overlay,
/// the path, and start and goal markers. World y points up.
pub fn render(
    world: &WorldModel,
    overlay: Overlay<'_>,
    path: Option<&[Point25]>,
    start: Point25,
    goal: Point25,
) -> String {
    let (w, h) = world.extent();
    let (ox, oy) = world.origin();
    let res = world.resolution();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="{ox} {} {w} {h}">"#,
        w * PX_PER_M,
        h * PX_PER_M,
        -(oy + h)
    );
    let _ = writeln!(s, r#"<g transform="scale(1,-1)">"#);
    let _ = writeln!(
        s,
        r##"<rect x="{ox}" y="{oy}" width="{w}" height="{h}" fill="#ffffff"/>"##
    );

    // horizontal runs keep the element count down on fine grids
    for (class, fill, pick) in [
        (
            "halo",
            "#c9c9c9",
            (|w: &WorldModel, i, j| w.is_cell_occupied(i, j) && !w.is_source_occupied(i, j))
                as fn(&WorldModel, usize, usize) -> bool,
        ),
        ("obstacle", "#303030", |w: &WorldModel, i, j| w.is_source_occupied(i, j)),
    ] {
        let _ = writeln!(s, r#"<g class="{class}" fill="{fill}">"#);
        for j in 0..world.height() {
            let mut i = 0;
            while i < world.width() {
                if !pick(world, i, j) {
                    i += 1;
                    continue;
                }
                let i0 = i;
                while i < world.width() && pick(world, i, j) {
                    i += 1;
                }
                let _ = writeln!(
                    s,
                    r#"<rect x="{:.4}" y="{:.4}" width="{:.4}" height="{res:.4}"/>"#,
                    ox + i0 as f64 * res,
                    oy + j as f64 * res,
                    (i - i0) as f64 * res
                );
            }
        }
        let _ = writeln!(s, "</g>");
    }

    match overlay {
        Overlay::None => {}
        Overlay::Tree(tree) => {
            let _ = writeln!(s, r#"<g class="tree" stroke-width="0.03">"#);
            for n in &tree.nodes {
                let color = if n.status == NodeStatus::Pruned {
                    "#d62728"
                } else {
                    "#1f77b4"
                };
                let mut d = String::new();
                for p in &n.trace {
                    let _ = write!(d, "{:.4},{:.4} ", p[0], p[1]);
                }
                let _ = writeln!(
                    s,
                    r#"<polyline points="{}" fill="none" stroke="{color}"/>"#,
                    d.trim_end()
                );
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.4}" cy="{:.4}" r="0.05" fill="{color}"/>"#,
                    n.exit[0], n.exit[1]
                );
            }
            let _ = writeln!(s, "</g>");
        }
        Overlay::Rrt(nodes) => {
            let _ = writeln!(s, r##"<g class="rrt" stroke="#9ecae1" stroke-width="0.02">"##);
            for (p, parent) in nodes {
                if let Some(q) = parent.and_then(|k| nodes.get(k)).map(|n| n.0) {
                    let _ = writeln!(
                        s,
                        r#"<line x1="{:.4}" y1="{:.4}" x2="{:.4}" y2="{:.4}"/>"#,
                        q.x, q.y, p.x, p.y
                    );
                }
            }
            let _ = writeln!(s, "</g>");
        }
    }

    if let Some(path) = path.filter(|p| !p.is_empty()) {
        let mut d = String::new();
        for p in path {
            let _ = write!(d, "{:.4},{:.4} ", p.x, p.y);
        }
        let _ = writeln!(
            s,
            r##"<polyline class="path" points="{}" fill="none" stroke="#2ca02c" stroke-width="0.06"/>"##,
            d.trim_end()
        );
    }
    for (class, p, fill) in [("start", start, "#ff7f0e"), ("goal", goal, "#9467bd")] {
        let _ = writeln!(
            s,
            r#"<circle class="{class}" cx="{:.4}" cy="{:.4}" r="0.15" fill="{fill}"/>"#,
            p.x, p.y
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_halo_separately_from_obstacles() {
        let mut w = WorldModel::new(0.1, 20, 10).unwrap();
        for j in 0..10 {
            w.set_obstacle(10, j, f64::INFINITY);
        }
        let w = w.inflate(0.1);
        let svg = render(
            &w,
            Overlay::None,
            None,
            Point25::planar(0.5, 0.5),
            Point25::planar(1.5, 0.5),
        );
        let obstacle = svg.split(r#"class="obstacle""#).nth(1).unwrap();
        let halo = svg
            .split(r#"class="halo""#)
            .nth(1)
            .unwrap()
            .split("</g>")
            .next()
            .unwrap();
        assert_eq!(obstacle.split("</g>").next().unwrap().matches("<rect").count(), 10);
        assert!(halo.matches("<rect").count() >= 10);
        assert!(svg.contains(r#"class="start""#));
        assert!(!svg.contains("polyline"));
    }
}
