//! Layered SVG figures: disks, shaded islands, lattice cells and channel
//! witnesses.

use std::fmt::Write;

use perforate_core::geometry::{CellState, FilledRaster};
use perforate_core::percolation::{ChannelFlow, Crossing, LatticeField};
use perforate_core::{PointCloud, Window};

const PANEL_GAP: f64 = 0.08;
const TITLE_BAND: f64 = 0.1;

fn f(x: f64) -> String {
    // Six decimals keep files small and byte-stable.
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// One panel of a figure in world coordinates.
#[derive(Debug, Clone, Default)]
pub struct Panel {
    pub title: String,
    pub window: Option<Window>,
    body: String,
}

impl Panel {
    pub fn new(title: impl Into<String>, window: &Window) -> Self {
        let mut p = Panel {
            title: title.into(),
            window: Some(*window),
            body: String::new(),
        };
        let (w, h) = (window.side(0), window.side(1));
        let _ = writeln!(
            p.body,
            r#"<g id="frame"><rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black" stroke-width="{}"/></g>"#,
            f(window.lo[0]),
            f(window.lo[1]),
            f(w),
            f(h),
            f(0.004 * h)
        );
        p
    }

    fn layer(&mut self, id: &str, content: &str) {
        if !content.is_empty() {
            let _ = writeln!(self.body, r#"<g id="{id}">{content}</g>"#);
        }
    }

    pub fn disks(&mut self, cloud: &PointCloud, r: f64) -> &mut Self {
        let mut s = String::new();
        for p in cloud.points() {
            let _ = write!(s, r#"<circle cx="{}" cy="{}" r="{}"/>"#, f(p[0]), f(p[1]), f(r));
        }
        let body = if s.is_empty() { s } else { format!(r##"<g fill="#4a78b5" fill-opacity="0.55">{s}</g>"##) };
        self.layer("disks", &body);
        self
    }

    /// Island cells of the raster, merged into row runs.
    pub fn islands(&mut self, raster: &FilledRaster) -> &mut Self {
        let g = &raster.grid;
        let mut s = String::new();
        for j in 0..g.shape[1] {
            let mut i = 0;
            while i < g.shape[0] {
                if raster.state(g.index(i, j, 0)) != CellState::VacantIsland {
                    i += 1;
                    continue;
                }
                let start = i;
                while i < g.shape[0] && raster.state(g.index(i, j, 0)) == CellState::VacantIsland {
                    i += 1;
                }
                let _ = write!(
                    s,
                    r#"<rect x="{}" y="{}" width="{}" height="{}"/>"#,
                    f(g.origin[0] + start as f64 * g.h),
                    f(g.origin[1] + j as f64 * g.h),
                    f((i - start) as f64 * g.h),
                    f(g.h)
                );
            }
        }
        let body = if s.is_empty() { s } else { format!(r##"<g fill="#c0392b" fill-opacity="0.7">{s}</g>"##) };
        self.layer("islands", &body);
        self
    }

    /// Blocked vertices as cubes `k⁻¹[z, z+1]` of side `cell`.
    pub fn lattice(&mut self, field: &LatticeField, cell: f64) -> &mut Self {
        let mut s = String::new();
        for v in 0..field.len() {
            if !field.is_open(v) {
                let z = field.coords(v);
                let _ = write!(
                    s,
                    r#"<rect x="{}" y="{}" width="{}" height="{}"/>"#,
                    f(z[0] as f64 * cell),
                    f(z[1] as f64 * cell),
                    f(cell),
                    f(cell)
                );
            }
        }
        let body = if s.is_empty() { s } else { format!(r##"<g fill="#555555" fill-opacity="0.45">{s}</g>"##) };
        self.layer("lattice", &body);
        self
    }

    fn polyline(field: &LatticeField, cell: f64, path: &[usize]) -> String {
        let pts: Vec<String> = path
            .iter()
            .map(|&v| {
                let z = field.coords(v);
                format!("{},{}", f((z[0] as f64 + 0.5) * cell), f((z[1] as f64 + 0.5) * cell))
            })
            .collect();
        pts.join(" ")
    }

    /// One polyline per channel through the centers of its vertices, in
    /// witness order; the crossing is dashed.
    pub fn witnesses(
        &mut self,
        field: &LatticeField,
        cell: f64,
        flow: Option<&ChannelFlow>,
        crossing: Option<&Crossing>,
    ) -> &mut Self {
        // Widths in world units; viewers disagree on non-scaling strokes.
        let (sw, dash) = (0.2 * cell, 0.5 * cell);
        let mut s = String::new();
        for ch in flow.map(|f| f.channels.as_slice()).unwrap_or_default() {
            let _ = write!(
                s,
                r##"<polyline class="channel" points="{}" fill="none" stroke="#1e8449" stroke-width="{}"/>"##,
                Self::polyline(field, cell, ch),
                f(sw)
            );
        }
        if let Some(c) = crossing {
            let _ = write!(
                s,
                r##"<polyline class="crossing" points="{}" fill="none" stroke="#d35400" stroke-width="{}" stroke-dasharray="{} {}"/>"##,
                Self::polyline(field, cell, &c.path),
                f(sw),
                f(dash),
                f(0.5 * dash)
            );
        }
        self.layer("channels", &s);
        self
    }
}

/// Lays panels out side by side, each scaled to unit height.
pub fn compose(panels: &[Panel], pixel_height: f64) -> String {
    let mut x = 0.0;
    let mut groups = String::new();
    for p in panels {
        let w = p.window.expect("panel window");
        let scale = 1.0 / w.side(1);
        let _ = writeln!(
            groups,
            r#"<g transform="translate({} {}) scale({} {}) translate({} {})">"#,
            f(x),
            f(1.0 + TITLE_BAND),
            f(scale),
            f(-scale),
            f(-w.lo[0]),
            f(-w.lo[1])
        );
        groups.push_str(&p.body);
        groups.push_str("</g>\n");
        if !p.title.is_empty() {
            let _ = writeln!(
                groups,
                r#"<text x="{}" y="{}" font-size="0.06" font-family="sans-serif">{}</text>"#,
                f(x),
                f(TITLE_BAND * 0.7),
                escape(&p.title)
            );
        }
        x += w.side(0) * scale + PANEL_GAP;
    }
    let width = (x - PANEL_GAP).max(0.0);
    let height = 1.0 + TITLE_BAND;
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n{groups}</svg>\n",
        f(pixel_height * width / height),
        f(pixel_height),
        f(width),
        f(height)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
