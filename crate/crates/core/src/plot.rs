//! Static SVG emission from a trace: the xy trajectory with ellipse
//! snapshots, and the monitor time series. Presentation only; the files are
//! self-contained vector images with no rendering dependency.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::dynamics::advance_targets;
use crate::geom::{from_frame, EllipseSpec, Vec2};
use crate::sim::{Mission, SimTrace};
use crate::summary::summarize;

const W: f64 = 860.0;
const H: f64 = 560.0;
const MARGIN: f64 = 55.0;

struct Canvas {
    svg: String,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Canvas {
    fn new(title: &str, x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
        );
        let _ = writeln!(
            svg,
            "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\
             <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
            W / 2.0,
            escape(title)
        );
        let (x1, y1) = (
            if x1 > x0 { x1 } else { x0 + 1.0 },
            if y1 > y0 { y1 } else { y0 + 1.0 },
        );
        let mut c = Canvas { svg, x0, x1, y0, y1 };
        c.axes();
        c
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let px = MARGIN + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * MARGIN);
        let py = H - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * MARGIN);
        (px, py)
    }

    fn axes(&mut self) {
        let _ = writeln!(
            self.svg,
            "<rect x=\"{m}\" y=\"{m}\" width=\"{w}\" height=\"{h}\" fill=\"none\" stroke=\"#888\"/>",
            m = MARGIN,
            w = W - 2.0 * MARGIN,
            h = H - 2.0 * MARGIN
        );
        for i in 0..=4 {
            let fx = self.x0 + (self.x1 - self.x0) * i as f64 / 4.0;
            let fy = self.y0 + (self.y1 - self.y0) * i as f64 / 4.0;
            let (px, _) = self.map(fx, self.y0);
            let (_, py) = self.map(self.x0, fy);
            let _ = writeln!(
                self.svg,
                "<text x=\"{px}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{fx:.3}</text>",
                H - MARGIN + 18.0
            );
            let _ = writeln!(
                self.svg,
                "<text x=\"{}\" y=\"{py}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{fy:.3}</text>",
                MARGIN - 6.0
            );
        }
    }

    fn polyline(&mut self, pts: impl Iterator<Item = (f64, f64)>, color: &str, width: f64) {
        let mut d = String::new();
        for (i, (x, y)) in pts.enumerate() {
            let (px, py) = self.map(x, y);
            let _ = write!(d, "{}{px:.2},{py:.2} ", if i == 0 { "" } else { "" });
        }
        let _ = writeln!(
            self.svg,
            "<polyline points=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\"/>"
        );
    }

    fn hline(&mut self, y: f64, color: &str) {
        if y < self.y0 || y > self.y1 {
            return;
        }
        let (px0, py) = self.map(self.x0, y);
        let (px1, _) = self.map(self.x1, y);
        let _ = writeln!(
            self.svg,
            "<line x1=\"{px0:.2}\" y1=\"{py:.2}\" x2=\"{px1:.2}\" y2=\"{py:.2}\" stroke=\"{color}\" stroke-dasharray=\"5 4\"/>"
        );
    }

    fn dot(&mut self, x: f64, y: f64, color: &str) {
        let (px, py) = self.map(x, y);
        let _ = writeln!(
            self.svg,
            "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"3\" fill=\"{color}\"/>"
        );
    }

    fn note(&mut self, text: &str) {
        let _ = writeln!(
            self.svg,
            "<text x=\"{}\" y=\"42\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#b00\" text-anchor=\"middle\">{}</text>",
            W / 2.0,
            escape(text)
        );
    }

    fn finish(mut self) -> String {
        self.svg.push_str("</svg>\n");
        self.svg
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn ellipse_outline(e: &EllipseSpec, n: usize) -> Vec<(f64, f64)> {
    (0..=n)
        .map(|i| {
            let s = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let p = from_frame(Vec2::new(e.a * s.cos(), e.b * s.sin()), e.frame());
            (p.x, p.y)
        })
        .collect()
}

fn series_bounds<'a>(vals: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in vals {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    if !lo.is_finite() {
        (0.0, 1.0)
    } else {
        let pad = 0.05 * (hi - lo).max(1e-9);
        (lo - pad, hi + pad)
    }
}

const SERIES_COLORS: [&str; 5] = ["#c22", "#26c", "#1a1", "#c80", "#808"];

fn write_file(dir: &Path, name: &str, content: String, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, content)?;
    out.push(path);
    Ok(())
}

/// Emit the four standard plots into `out_dir`. `snapshot_times` selects
/// when the moving ellipse and targets are overdrawn on the trajectory plot.
pub fn render_plots(
    trace: &SimTrace,
    out_dir: &Path,
    snapshot_times: &[f64],
) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();
    let rows = &trace.rows;
    let warn = if summarize(trace).settled {
        None
    } else {
        Some("warning: run did not settle (|gamma-1| never below 0.05)")
    };

    // (a) xy trajectory with ellipse snapshots
    {
        let mut xs: Vec<f64> = rows.iter().map(|r| r.x_a).collect();
        let mut ys: Vec<f64> = rows.iter().map(|r| r.y_a).collect();
        let snapshots: Vec<&crate::sim::TraceRow> = snapshot_times
            .iter()
            .filter_map(|t| rows.iter().min_by(|a, b| {
                (a.t - t).abs().partial_cmp(&(b.t - t).abs()).unwrap()
            }))
            .collect();
        for r in &snapshots {
            if let Ok(e) = EllipseSpec::new(Vec2::new(r.x_o, r.y_o), r.a, r.b, r.theta_e) {
                for (x, y) in ellipse_outline(&e, 16) {
                    xs.push(x);
                    ys.push(y);
                }
            }
        }
        let (x0, x1) = series_bounds(xs.iter());
        let (y0, y1) = series_bounds(ys.iter());
        let mut c = Canvas::new(
            &format!("{}: trajectory (m)", trace.config.name),
            x0, x1, y0, y1,
        );
        c.polyline(rows.iter().map(|r| (r.x_a, r.y_a)), "#26c", 1.2);
        for r in snapshots {
            if let Ok(e) = EllipseSpec::new(Vec2::new(r.x_o, r.y_o), r.a, r.b, r.theta_e) {
                c.polyline(ellipse_outline(&e, 128).into_iter(), "#1a1", 1.0);
            }
            if let Mission::Convoy(model) = &trace.config.mission {
                if let Ok(snap) = advance_targets(model, r.t) {
                    for p in &snap.positions {
                        c.dot(p.x, p.y, "#c22");
                    }
                }
            }
        }
        if let Some(w) = warn {
            c.note(w);
        }
        write_file(out_dir, "trajectory.svg", c.finish(), &mut files)?;
    }

    // (b) V and omega vs t
    {
        let t1 = rows.last().map_or(1.0, |r| r.t);
        let (v0, v1) = series_bounds(rows.iter().map(|r| &r.v_lyap));
        let mut c = Canvas::new(
            &format!("{}: V (red, own scale) and omega (blue, rad/s)", trace.config.name),
            0.0, t1, -0.35, 0.35,
        );
        let scale = if v1 > 0.0 { 0.3 / v1.max(1e-12) } else { 1.0 };
        c.polyline(rows.iter().map(|r| (r.t, r.v_lyap * scale)), "#c22", 1.0);
        c.polyline(rows.iter().map(|r| (r.t, r.omega)), "#26c", 1.0);
        c.hline(trace.config.limits.omega_max, "#888");
        c.hline(-trace.config.limits.omega_max, "#888");
        if let Some(w) = warn {
            c.note(w);
        }
        let _ = (v0, v1);
        write_file(out_dir, "lyapunov_omega.svg", c.finish(), &mut files)?;
    }

    // (c) gamma, omega, V_A vs t
    {
        let t1 = rows.last().map_or(1.0, |r| r.t);
        let (g0, g1) = series_bounds(rows.iter().map(|r| &r.gamma));
        let hi = g1.max(trace.config.agent_speed * 1.1).max(0.5);
        let mut c = Canvas::new(
            &format!("{}: gamma (red), omega (blue, rad/s), V_A (green, m/s)", trace.config.name),
            0.0, t1, g0.min(-0.5), hi,
        );
        c.polyline(rows.iter().map(|r| (r.t, r.gamma)), "#c22", 1.0);
        c.polyline(rows.iter().map(|r| (r.t, r.omega)), "#26c", 1.0);
        c.polyline(
            rows.iter().map(|r| (r.t, trace.config.agent_speed)),
            "#1a1",
            1.0,
        );
        c.hline(1.0, "#888");
        if let Some(w) = warn {
            c.note(w);
        }
        write_file(out_dir, "gamma_omega_speed.svg", c.finish(), &mut files)?;
    }

    // (d) gamma_Ti vs t per target
    {
        let t1 = rows.last().map_or(1.0, |r| r.t);
        let mut c = Canvas::new(
            &format!("{}: per-target gamma_Ti", trace.config.name),
            0.0, t1, 0.0, 1.3,
        );
        if trace.target_count == 0 {
            c.note("no targets in this scenario");
        } else {
            for i in 0..trace.target_count {
                let color = SERIES_COLORS[i % SERIES_COLORS.len()];
                c.polyline(rows.iter().map(|r| (r.t, r.gamma_targets[i])), color, 1.0);
            }
            c.hline(1.0, "#888");
        }
        if let Some(w) = warn {
            c.note(w);
        }
        write_file(out_dir, "gamma_targets.svg", c.finish(), &mut files)?;
    }

    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario_str;
    use crate::sim::run_simulation;

    #[test]
    fn emits_four_svg_files() {
        let text = r#"
name = "plot_test"
direction = "ccw"
duration = 20.0

[limits]
v_a_min = 10.0
v_a_max = 20.0
v_t_max = 3.0
omega_max = 0.3
standoff = 0.0

[gains]
k_gamma = 0.5
k_psi = 1.0

[agent]
x = 600.0
y = -200.0
psi = 0.7853981633974483
speed = 15.0

[ellipse]
x = 300.0
y = 200.0
a = 250.0
b = 150.0
theta = 0.7853981633974483
"#;
        let cfg = parse_scenario_str(text, "inline").unwrap();
        let trace = run_simulation(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = render_plots(&trace, dir.path(), &[0.0, 10.0, 20.0]).unwrap();
        assert_eq!(files.len(), 4);
        for f in files {
            let text = std::fs::read_to_string(f).unwrap();
            assert!(text.starts_with("<svg"));
            assert!(text.trim_end().ends_with("</svg>"));
        }
    }
}
