//! Minimal standalone SVG 1.1 line plots.
//!
//! Output depends only on the input data and style, so identical input
//! gives identical bytes. Non-finite points (and non-positive ones on a log
//! axis) split a curve; isolated points are drawn as markers.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use super::{write_file, IoError};

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 84.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 44.0;
const BOTTOM: f64 = 62.0;

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Error)]
pub enum SvgError {
    #[error("nothing to plot")]
    EmptyData,
    #[error(transparent)]
    Io(#[from] IoError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: Scale,
    pub y_scale: Scale,
    /// Display multiplier for x values, e.g. 1e6 to show seconds as µs.
    pub x_factor: f64,
}

impl Default for PlotStyle {
    fn default() -> Self {
        PlotStyle {
            title: String::new(),
            x_label: String::new(),
            y_label: String::new(),
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            x_factor: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Curve {
    pub fn new(label: impl Into<String>, xs: &[f64], ys: &[f64]) -> Self {
        Curve { label: label.into(), points: xs.iter().copied().zip(ys.iter().copied()).collect() }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Axis {
    scale: Scale,
    lo: f64,
    hi: f64,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, scale: Scale) -> Axis {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            let v = match scale {
                Scale::Linear => v,
                Scale::Log => v.log10(),
            };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(lo.abs()).max(1e-300) {
            let pad = if scale == Scale::Log { 0.5 } else { (lo.abs() * 0.1).max(1e-12) };
            lo -= pad;
            hi += pad;
        }
        Axis { scale, lo, hi }
    }

    fn frac(&self, v: f64) -> f64 {
        let v = match self.scale {
            Scale::Linear => v,
            Scale::Log => v.log10(),
        };
        (v - self.lo) / (self.hi - self.lo)
    }

    /// Tick positions (in data units) and labels.
    fn ticks(&self, factor: f64) -> Vec<(f64, String)> {
        match self.scale {
            Scale::Log => {
                let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
                let stride = ((b - a) / 8 + 1).max(1);
                (a..=b).step_by(stride as usize).map(|e| (10f64.powi(e), format!("1e{e}"))).collect()
            }
            Scale::Linear => {
                let (lo, hi) = (self.lo * factor, self.hi * factor);
                let raw = (hi - lo) / 5.0;
                let mag = 10f64.powf(raw.log10().floor());
                let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
                let first = (lo / step).ceil() as i64;
                let last = (hi / step).floor() as i64;
                let exp = step.log10().floor() as i32;
                let biggest = lo.abs().max(hi.abs());
                (first..=last)
                    .map(|k| {
                        let v = k as f64 * step;
                        let label = if k == 0 {
                            "0".to_string()
                        } else if (-4..6).contains(&exp) && biggest < 1e6 {
                            format!("{:.*}", (-exp).max(0) as usize, v)
                        } else {
                            let digits = (biggest.log10().floor() as i32 - exp).max(0) as usize;
                            format!("{:.*e}", digits, v)
                        };
                        (v / factor, label)
                    })
                    .collect()
            }
        }
    }
}

fn visible(p: (f64, f64), style: &PlotStyle) -> bool {
    let ok = |v: f64, s: Scale| v.is_finite() && (s == Scale::Linear || v > 0.0);
    ok(p.0, style.x_scale) && ok(p.1, style.y_scale)
}

pub fn render_svg(curves: &[Curve], style: &PlotStyle) -> Result<String, SvgError> {
    let pts = || curves.iter().flat_map(|c| c.points.iter().copied()).filter(|&p| visible(p, style));
    if pts().next().is_none() {
        return Err(SvgError::EmptyData);
    }
    let xa = Axis::fit(pts().map(|p| p.0), style.x_scale);
    let ya = Axis::fit(pts().map(|p| p.1), style.y_scale);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + xa.frac(x) * pw;
    let sy = |y: f64| TOP + (1.0 - ya.frac(y)) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    if !style.title.is_empty() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + pw / 2.0,
            escape(&style.title)
        );
    }

    let _ = writeln!(s, r##"<g stroke="#cccccc" stroke-width="0.5">"##);
    let x_ticks = xa.ticks(style.x_factor);
    let y_ticks = ya.ticks(1.0);
    for (v, _) in &x_ticks {
        let x = sx(*v);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{:.2}"/>"#, TOP + ph);
    }
    for (v, _) in &y_ticks {
        let y = sy(*v);
        let _ = writeln!(s, r#"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}"/>"#, LEFT + pw);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
    );
    for (v, label) in &x_ticks {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(*v),
            TOP + ph + 16.0,
            escape(label)
        );
    }
    for (v, label) in &y_ticks {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            sy(*v) + 4.0,
            escape(label)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 18.0,
        escape(&style.x_label)
    );
    let (yx, yy) = (20.0, TOP + ph / 2.0);
    let _ = writeln!(
        s,
        r#"<text x="{yx:.2}" y="{yy:.2}" text-anchor="middle" transform="rotate(-90 {yx:.2} {yy:.2})">{}</text>"#,
        escape(&style.y_label)
    );

    for (k, curve) in curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        for &p in &curve.points {
            if visible(p, style) {
                segments.last_mut().unwrap().push((sx(p.0), sy(p.1)));
            } else if !segments.last().unwrap().is_empty() {
                segments.push(Vec::new());
            }
        }
        for seg in segments.iter().filter(|seg| !seg.is_empty()) {
            if seg.len() == 1 {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, seg[0].0, seg[0].1);
            } else {
                let coords: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    coords.join(" ")
                );
            }
        }
    }

    let lx = LEFT + pw + 16.0;
    let _ = writeln!(s, r#"<g id="legend">"#);
    for (k, curve) in curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let y = TOP + 10.0 + 20.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 24.0
        );
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 30.0, y + 4.0, escape(&curve.label));
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg(curves: &[Curve], style: &PlotStyle, path: &Path) -> Result<(), SvgError> {
    let text = render_svg(curves, style)?;
    Ok(write_file(path, text.as_bytes())?)
}
