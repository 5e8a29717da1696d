use std::fmt::Write;
use std::path::Path;

use super::ExperimentReport;
use crate::caratheodory::Method;
use crate::error::{domain, Result};

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#2e8b57", "#c0392b", "#2c6fbb", "#d68910", "#7d3c98", "#17a589"];

/// Log-log axes: whole decades `10^x0 ..= 10^x1` in `k` and `10^y0 ..= 10^y1`
/// in the error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlotGeometry {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl PlotGeometry {
    fn plot_w() -> f64 {
        WIDTH - LEFT - RIGHT
    }

    fn plot_h() -> f64 {
        HEIGHT - TOP - BOTTOM
    }

    pub fn to_px(&self, k: f64, v: f64) -> (f64, f64) {
        let x = LEFT + (k.log10() - self.x0) / (self.x1 - self.x0) * Self::plot_w();
        let y = TOP + (self.y1 - v.log10()) / (self.y1 - self.y0) * Self::plot_h();
        (x, y)
    }

    pub fn from_px(&self, x: f64, y: f64) -> (f64, f64) {
        let lk = self.x0 + (x - LEFT) / Self::plot_w() * (self.x1 - self.x0);
        let lv = self.y1 - (y - TOP) / Self::plot_h() * (self.y1 - self.y0);
        (10f64.powf(lk), 10f64.powf(lv))
    }
}

fn k_max(report: &ExperimentReport) -> u64 {
    report.series.iter().map(|s| s.rows.len() as u64).max().unwrap_or(0)
}

pub fn plot_geometry(report: &ExperimentReport) -> Result<PlotGeometry> {
    let kmax = k_max(report);
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 1.0;
    for r in report.series.iter().flat_map(|s| &s.rows) {
        if r.mean > 0.0 {
            lo = lo.min(r.mean);
            let below = r.mean - r.std;
            if below > 0.0 {
                lo = lo.min(below);
            }
            hi = hi.max(r.mean + r.std);
        }
    }
    if !lo.is_finite() {
        return Err(domain("report has no positive error values to plot"));
    }
    let kmax = kmax.max(10) as f64;
    lo = lo.min(1.0 / kmax.sqrt());
    Ok(PlotGeometry { x0: 0.0, x1: kmax.log10().ceil(), y0: lo.log10().floor(), y1: hi.log10().ceil() })
}

/// Mean error per `k` with ±std bands per series, ordered runs solid and
/// greedy runs dashed, and the gray guide `k^{-1/2}`.
pub fn render_svg(report: &ExperimentReport) -> Result<String> {
    let g = plot_geometry(report)?;
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#).unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    let (px0, py1) = g.to_px(10f64.powf(g.x0), 10f64.powf(g.y1));
    let (px1, py0) = g.to_px(10f64.powf(g.x1), 10f64.powf(g.y0));
    writeln!(s, r#"<rect x="{px0:.3}" y="{py1:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="black"/>"#, px1 - px0, py0 - py1).unwrap();
    for e in g.x0 as i32..=g.x1 as i32 {
        let (x, _) = g.to_px(10f64.powi(e), 1.0);
        writeln!(s, r#"<line x1="{x:.3}" y1="{py0:.3}" x2="{x:.3}" y2="{:.3}" stroke="black"/>"#, py0 + 5.0).unwrap();
        writeln!(s, r#"<text x="{x:.3}" y="{:.3}" text-anchor="middle">1e{e}</text>"#, py0 + 20.0).unwrap();
    }
    for e in g.y0 as i32..=g.y1 as i32 {
        let (_, y) = g.to_px(1.0, 10f64.powi(e));
        writeln!(s, r#"<line x1="{:.3}" y1="{y:.3}" x2="{px0:.3}" y2="{y:.3}" stroke="black"/>"#, px0 - 5.0).unwrap();
        writeln!(s, r#"<text x="{:.3}" y="{:.3}" text-anchor="end">1e{e}</text>"#, px0 - 8.0, y + 4.0).unwrap();
    }
    writeln!(s, r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">k</text>"#, (px0 + px1) / 2.0, HEIGHT - 15.0).unwrap();
    writeln!(s, r#"<text x="20" y="{:.3}" text-anchor="middle" transform="rotate(-90 20 {:.3})">error</text>"#, (py0 + py1) / 2.0, (py0 + py1) / 2.0).unwrap();

    let floor = 10f64.powf(g.y0);
    let mut dims: Vec<usize> = report.series.iter().map(|x| x.d).collect();
    dims.dedup();
    for (i, series) in report.series.iter().enumerate() {
        let color = PALETTE[dims.iter().position(|&d| d == series.d).unwrap_or(0) % PALETTE.len()];
        let pts: Vec<_> = series.rows.iter().filter(|r| r.mean > 0.0).collect();
        if pts.is_empty() {
            continue;
        }
        let mut band = String::new();
        for r in &pts {
            let (x, y) = g.to_px(r.k as f64, r.mean + r.std);
            write!(band, "{x:.3},{y:.3} ").unwrap();
        }
        for r in pts.iter().rev() {
            let (x, y) = g.to_px(r.k as f64, (r.mean - r.std).max(floor));
            write!(band, "{x:.3},{y:.3} ").unwrap();
        }
        writeln!(s, r#"<polygon class="band" points="{}" fill="{color}" fill-opacity="0.15" stroke="none"/>"#, band.trim_end()).unwrap();
        let mut line = String::new();
        for r in &pts {
            let (x, y) = g.to_px(r.k as f64, r.mean);
            write!(line, "{x:.3},{y:.3} ").unwrap();
        }
        let dash = match series.method {
            Method::Ordered => "",
            Method::Greedy => r#" stroke-dasharray="6 4""#,
        };
        writeln!(s, r#"<polyline class="series {}" points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#, series.method, line.trim_end()).unwrap();
        let ly = TOP + 20.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        writeln!(s, r#"<line x1="{lx:.3}" y1="{ly:.3}" x2="{:.3}" y2="{ly:.3}" stroke="{color}" stroke-width="1.5"{dash}/>"#, lx + 30.0).unwrap();
        writeln!(s, r#"<text x="{:.3}" y="{:.3}">d = {}, {}</text>"#, lx + 36.0, ly + 4.0, series.d, series.method).unwrap();
    }
    let kmax = 10f64.powf(g.x1);
    let (gx1, gy1) = g.to_px(1.0, 1.0);
    let (gx2, gy2) = g.to_px(kmax, 1.0 / kmax.sqrt());
    writeln!(s, r##"<line id="guide" x1="{gx1:.3}" y1="{gy1:.3}" x2="{gx2:.3}" y2="{gy2:.3}" stroke="#888888" stroke-width="1"/>"##).unwrap();
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg(report: &ExperimentReport, path: &Path) -> Result<()> {
    let svg = render_svg(report)?;
    std::fs::write(path, svg)?;
    Ok(())
}
