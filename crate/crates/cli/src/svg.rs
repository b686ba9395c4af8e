//! Minimal SVG output: line plots and filled contour maps.

use std::fmt::Write;

use crate::table::Table;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Data bounds, widened when degenerate.
fn bounds(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return None;
    }
    Some(if hi - lo < 1e-300 { (lo - 0.5, hi + 0.5) } else { (lo, hi) })
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }
    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }

    fn axes(&self, out: &mut String, title: &str, x_label: &str, y_label: &str) {
        let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
        let _ = writeln!(out, r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#, r - l, b - t);
        let _ = writeln!(out, r#"<text x="{}" y="30" text-anchor="middle" font-size="16">{}</text>"#, WIDTH / 2.0, escape(title));
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{}</text>"#, WIDTH / 2.0, HEIGHT - 15.0, escape(x_label));
        let _ = writeln!(
            out,
            r#"<text x="15" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 15 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(y_label)
        );
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let xv = self.x.0 + f * (self.x.1 - self.x.0);
            let yv = self.y.0 + f * (self.y.1 - self.y.0);
            let _ = writeln!(out, r#"<text x="{:.2}" y="{}" text-anchor="middle" font-size="11">{}</text>"#, self.px(xv), b + 16.0, tick(xv));
            let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end" font-size="11">{}</text>"#, l - 4.0, self.py(yv) + 4.0, tick(yv));
        }
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.1e}")
    } else {
        format!("{v:.3}")
    }
}

fn header() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

impl LinePlot {
    /// First column against every other numeric column. Uses a log axis
    /// when all values are positive.
    pub fn from_table(table: &Table, title: &str) -> Self {
        let x: Vec<Option<f64>> = table.rows.iter().map(|r| r.first().and_then(|v| v.as_f64())).collect();
        let series: Vec<Series> = (1..table.columns.len())
            .map(|c| Series {
                name: table.columns[c].clone(),
                points: table.rows.iter().zip(&x).filter_map(|(r, x)| Some(((*x)?, r[c].as_f64()?))).collect(),
            })
            .filter(|s| !s.points.is_empty())
            .collect();
        let log_y = series.iter().flat_map(|s| &s.points).all(|p| p.1 > 0.0);
        LinePlot {
            title: title.to_string(),
            x_label: table.columns.first().cloned().unwrap_or_default(),
            y_label: String::new(),
            log_x: false,
            log_y,
            series,
        }
    }

    pub fn render(&self) -> String {
        let axis = |log: bool, v: f64| if log { (v > 0.0).then(|| v.log10()) } else { Some(v) };
        let pts: Vec<Vec<(f64, f64)>> = self
            .series
            .iter()
            .map(|s| {
                s.points
                    .iter()
                    .filter_map(|&(x, y)| Some((axis(self.log_x, x)?, axis(self.log_y, y)?)))
                    .filter(|p| p.0.is_finite() && p.1.is_finite())
                    .collect()
            })
            .collect();
        let mut out = header();
        let (Some(xb), Some(yb)) = (bounds(pts.iter().flatten().map(|p| p.0)), bounds(pts.iter().flatten().map(|p| p.1))) else {
            out.push_str("</svg>\n");
            return out;
        };
        let frame = Frame { x: xb, y: yb };
        let label = |log: bool, l: &str| if log { format!("log10 {l}").trim().to_string() } else { l.to_string() };
        frame.axes(&mut out, &self.title, &label(self.log_x, &self.x_label), &label(self.log_y, &self.y_label));
        for (i, (s, p)) in self.series.iter().zip(&pts).enumerate() {
            let colour = PALETTE[i % PALETTE.len()];
            let path: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y))).collect();
            let _ = writeln!(out, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
            let ly = MARGIN + 14.0 + 16.0 * i as f64;
            let _ = writeln!(out, r#"<text x="{}" y="{ly}" font-size="12" fill="{colour}">{}</text>"#, WIDTH - MARGIN + 4.0, escape(&s.name));
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Values on a rectangular grid, `values[iy][ix]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourPlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub levels: usize,
}

/// Segments of the `level` iso-line through one cell with corner values
/// `[bottom-left, bottom-right, top-right, top-left]`.
pub fn march_cell(corners: [(f64, f64, f64); 4], level: f64) -> Vec<[(f64, f64); 2]> {
    let case = corners.iter().enumerate().fold(0, |acc, (i, c)| acc | (((c.2 > level) as usize) << i));
    let edge = |a: usize, b: usize| {
        let (p, q) = (corners[a], corners[b]);
        let t = if q.2 == p.2 { 0.5 } else { (level - p.2) / (q.2 - p.2) };
        (p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1))
    };
    let (bottom, right, top, left) = (|| edge(0, 1), || edge(1, 2), || edge(2, 3), || edge(3, 0));
    match case {
        0 | 15 => vec![],
        1 | 14 => vec![[left(), bottom()]],
        2 | 13 => vec![[bottom(), right()]],
        3 | 12 => vec![[left(), right()]],
        4 | 11 => vec![[right(), top()]],
        6 | 9 => vec![[bottom(), top()]],
        7 | 8 => vec![[left(), top()]],
        5 => vec![[left(), top()], [bottom(), right()]],
        10 => vec![[left(), bottom()], [right(), top()]],
        _ => unreachable!("four corner bits"),
    }
}

fn shade(f: f64) -> String {
    let f = f.clamp(0.0, 1.0);
    let r = (40.0 + 215.0 * f) as u8;
    let g = (60.0 + 120.0 * (1.0 - (2.0 * f - 1.0).abs())) as u8;
    let b = (200.0 * (1.0 - f) + 30.0) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

impl ContourPlot {
    pub fn render(&self) -> String {
        let mut out = header();
        let finite = || self.values.iter().flatten().copied().filter(|v| v.is_finite());
        let (Some(xb), Some(yb), Some(zb)) = (bounds(self.xs.iter().copied()), bounds(self.ys.iter().copied()), bounds(finite())) else {
            out.push_str("</svg>\n");
            return out;
        };
        let frame = Frame { x: xb, y: yb };
        let levels = self.levels.max(1);
        let band = |v: f64| ((v - zb.0) / (zb.1 - zb.0) * levels as f64).floor().min(levels as f64 - 1.0) / (levels as f64 - 1.0).max(1.0);
        for iy in 0..self.ys.len().saturating_sub(1) {
            for ix in 0..self.xs.len().saturating_sub(1) {
                let c = [self.values[iy][ix], self.values[iy][ix + 1], self.values[iy + 1][ix + 1], self.values[iy + 1][ix]];
                if c.iter().any(|v| !v.is_finite()) {
                    continue;
                }
                let mean = c.iter().sum::<f64>() / 4.0;
                let (x0, x1) = (frame.px(self.xs[ix]), frame.px(self.xs[ix + 1]));
                let (y0, y1) = (frame.py(self.ys[iy + 1]), frame.py(self.ys[iy]));
                let _ = writeln!(
                    out,
                    r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                    x1 - x0 + 0.3,
                    y1 - y0 + 0.3,
                    shade(band(mean))
                );
            }
        }
        for l in 1..levels {
            let level = zb.0 + (zb.1 - zb.0) * l as f64 / levels as f64;
            let mut d = String::new();
            for iy in 0..self.ys.len().saturating_sub(1) {
                for ix in 0..self.xs.len().saturating_sub(1) {
                    let at = |jx: usize, jy: usize| (self.xs[jx], self.ys[jy], self.values[jy][jx]);
                    let corners = [at(ix, iy), at(ix + 1, iy), at(ix + 1, iy + 1), at(ix, iy + 1)];
                    if corners.iter().any(|c| !c.2.is_finite()) {
                        continue;
                    }
                    for [a, b] in march_cell(corners, level) {
                        let _ = write!(d, "M{:.2},{:.2}L{:.2},{:.2}", frame.px(a.0), frame.py(a.1), frame.px(b.0), frame.py(b.1));
                    }
                }
            }
            if !d.is_empty() {
                let _ = writeln!(out, r#"<path d="{d}" fill="none" stroke="black" stroke-width="0.8"/>"#);
            }
        }
        frame.axes(&mut out, &self.title, &self.x_label, &self.y_label);
        let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="11">range {} .. {}</text>"#, WIDTH - MARGIN - 150.0, MARGIN - 8.0, tick(zb.0), tick(zb.1));
        out.push_str("</svg>\n");
        out
    }
}
