use std::fmt::Write;

use explore_core::explore::{OccupancyGrid, Pose, P_UNKNOWN};
use explore_core::sim::EpisodeReport;

/// Pixels per metre.
const SCALE: f64 = 40.0;
const MARGIN: f64 = 10.0;

fn shade(p: f64) -> &'static str {
    if p == P_UNKNOWN {
        "#bdbdbd"
    } else if p > P_UNKNOWN {
        "#212121"
    } else {
        "#ffffff"
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Frame {
    origin: Pose,
    height_m: f64,
}

impl Frame {
    fn x(&self, x: f64) -> f64 {
        MARGIN + (x - self.origin.x) * SCALE
    }

    fn y(&self, y: f64) -> f64 {
        MARGIN + (self.height_m - (y - self.origin.y)) * SCALE
    }

    fn points(&self, poses: &[Pose]) -> String {
        poses.iter().map(|p| format!("{:.2},{:.2}", self.x(p.x), self.y(p.y))).collect::<Vec<_>>().join(" ")
    }
}

/// Renders the known map, the trajectory as a dashed green line, the
/// last plan's predicted paths, collisions and the start and final poses.
/// Output bytes depend only on the report.
pub fn render_svg(report: &EpisodeReport) -> Result<String, String> {
    let g = &report.known_map;
    let grid = OccupancyGrid::from_cells(g.width(), g.height(), g.resolution(), g.origin(), g.cells().to_vec())
        .map_err(|e| format!("known map: {e}"))?;
    let poses = report.trajectory.iter().chain(report.collision_points.iter()).chain(report.plan_fan.iter().flatten());
    if poses.clone().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
        return Err("report holds a non-finite pose".into());
    }
    let (wm, hm) = grid.extent();
    let frame = Frame { origin: grid.origin(), height_m: hm };
    let res = grid.resolution();
    let (w_px, h_px) = (wm * SCALE + 2.0 * MARGIN, hm * SCALE + 2.0 * MARGIN);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w_px:.0}" height="{h_px:.0}" viewBox="0 0 {w_px:.2} {h_px:.2}">"#
    );
    let _ = writeln!(s, "<title>{} seed {}</title>", escape(&report.map_id), report.seed);
    let _ = writeln!(s, r#"<g id="map" shape-rendering="crispEdges">"#);
    // one rect per horizontal run of equal shade
    for iy in 0..grid.height() {
        let mut ix = 0;
        while ix < grid.width() {
            let c = shade(grid.get(ix, iy).unwrap_or(P_UNKNOWN));
            let mut end = ix + 1;
            while end < grid.width() && shade(grid.get(end, iy).unwrap_or(P_UNKNOWN)) == c {
                end += 1;
            }
            let x0 = frame.x(grid.origin().x + ix as f64 * res);
            let y0 = frame.y(grid.origin().y + (iy + 1) as f64 * res);
            let _ = writeln!(
                s,
                r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="{c}"/>"#,
                (end - ix) as f64 * res * SCALE,
                res * SCALE
            );
            ix = end;
        }
    }
    let _ = writeln!(s, "</g>");
    if !report.plan_fan.is_empty() {
        let _ = writeln!(s, r##"<g id="plan" fill="none" stroke="#ef6c00" stroke-width="1" stroke-opacity="0.6">"##);
        let last = report.trajectory.last().copied();
        for path in &report.plan_fan {
            let mut pts: Vec<Pose> = Vec::with_capacity(path.len() + 1);
            pts.extend(last);
            pts.extend_from_slice(path);
            let _ = writeln!(s, r#"<polyline points="{}"/>"#, frame.points(&pts));
        }
        let _ = writeln!(s, "</g>");
    }
    if report.trajectory.len() > 1 {
        let _ = writeln!(
            s,
            r##"<polyline id="trajectory" points="{}" fill="none" stroke="#2e7d32" stroke-width="2" stroke-dasharray="6 4"/>"##,
            frame.points(&report.trajectory)
        );
    }
    if !report.collision_points.is_empty() {
        let _ = writeln!(s, r##"<g id="collisions" stroke="#c62828" stroke-width="2">"##);
        for p in &report.collision_points {
            let (x, y) = (frame.x(p.x), frame.y(p.y));
            let _ = writeln!(s, r#"<path d="M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2}"/>"#, x - 4.0, y - 4.0, x + 4.0, y + 4.0, x - 4.0, y + 4.0, x + 4.0, y - 4.0);
        }
        let _ = writeln!(s, "</g>");
    }
    if let Some(start) = report.trajectory.first() {
        let _ = writeln!(
            s,
            r##"<rect id="start" x="{:.2}" y="{:.2}" width="8" height="8" fill="#1565c0"/>"##,
            frame.x(start.x) - 4.0,
            frame.y(start.y) - 4.0
        );
    }
    if let (Some(end), true) = (report.trajectory.last(), report.trajectory.len() > 1) {
        let _ = writeln!(s, r##"<circle id="pose" cx="{:.2}" cy="{:.2}" r="5" fill="#d81b60"/>"##, frame.x(end.x), frame.y(end.y));
    }
    s.push_str("</svg>\n");
    Ok(s)
}
