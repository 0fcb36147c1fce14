//! Deterministic SVG figures.
//!
//! Every number is written with a fixed precision and elements are emitted
//! in input order, so identical inputs always give identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::kde::KdeCurve;

const CELL: f64 = 40.0;
const LABEL_W: f64 = 140.0;
const LABEL_H: f64 = 110.0;
const FONT: &str = "font-family=\"sans-serif\" font-size=\"11\"";

pub type Rgb = (u8, u8, u8);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColorScale {
    pub min: f64,
    pub max: f64,
    pub low: Rgb,
    pub high: Rgb,
    /// Optional midpoint color, reached at `(min + max) / 2`.
    pub mid: Option<Rgb>,
}

impl ColorScale {
    pub fn sequential(min: f64, max: f64) -> Self {
        Self { min, max, low: (255, 255, 255), high: (33, 102, 172), mid: None }
    }

    /// Blue-white-red scale symmetric around zero.
    pub fn diverging(abs_max: f64) -> Self {
        let m = if abs_max > 0.0 { abs_max } else { 1.0 };
        Self { min: -m, max: m, low: (178, 24, 43), high: (33, 102, 172), mid: Some((247, 247, 247)) }
    }

    fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::Validation(format!(
                "color scale needs finite min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        Ok(())
    }

    /// Linear interpolation, clamped to the scale's ends.
    pub fn color(&self, v: f64) -> Rgb {
        let t = ((v - self.min) / (self.max - self.min)).clamp(0.0, 1.0);
        match self.mid {
            None => lerp(self.low, self.high, t),
            Some(mid) if t < 0.5 => lerp(self.low, mid, t * 2.0),
            Some(mid) => lerp(mid, self.high, t * 2.0 - 1.0),
        }
    }
}

fn lerp(a: Rgb, b: Rgb, t: f64) -> Rgb {
    let ch = |x: u8, y: u8| (f64::from(x) + (f64::from(y) - f64::from(x)) * t).round() as u8;
    (ch(a.0, b.0), ch(a.1, b.1), ch(a.2, b.2))
}

fn hex(c: Rgb) -> String {
    format!("#{:02x}{:02x}{:02x}", c.0, c.1, c.2)
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn open_svg(out: &mut String, w: f64, h: f64) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">"
    );
    let _ = writeln!(out, "<rect width=\"{w:.0}\" height=\"{h:.0}\" fill=\"#ffffff\"/>");
}

/// A labeled dense matrix for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrix<'a> {
    pub row_labels: &'a [String],
    pub col_labels: &'a [String],
    pub values: &'a [Vec<f64>],
}

impl LabeledMatrix<'_> {
    fn validate(&self) -> Result<()> {
        if self.values.len() != self.row_labels.len()
            || self.values.iter().any(|r| r.len() != self.col_labels.len())
        {
            return Err(Error::Validation("matrix shape does not match its labels".into()));
        }
        for (i, row) in self.values.iter().enumerate() {
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::Validation(format!(
                    "non-finite cell at ({}, {})",
                    self.row_labels[i], self.col_labels[j]
                )));
            }
        }
        Ok(())
    }
}

pub fn render_heatmap(m: &LabeledMatrix<'_>, scale: &ColorScale, annotate: bool) -> Result<String> {
    m.validate()?;
    scale.validate()?;
    let (rows, cols) = (m.row_labels.len(), m.col_labels.len());
    let w = LABEL_W + CELL * cols as f64 + 10.0;
    let h = LABEL_H + CELL * rows as f64 + 10.0;
    let mut out = String::new();
    open_svg(&mut out, w, h);
    for (j, label) in m.col_labels.iter().enumerate() {
        let x = LABEL_W + CELL * (j as f64 + 0.5);
        let y = LABEL_H - 6.0;
        let _ = writeln!(
            out,
            "<text x=\"{x:.1}\" y=\"{y:.1}\" {FONT} transform=\"rotate(-60 {x:.1} {y:.1})\">{}</text>",
            esc(label)
        );
    }
    for (i, label) in m.row_labels.iter().enumerate() {
        let y = LABEL_H + CELL * (i as f64 + 0.5) + 4.0;
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{y:.1}\" {FONT} text-anchor=\"end\">{}</text>",
            LABEL_W - 6.0,
            esc(label)
        );
        for (j, &v) in m.values[i].iter().enumerate() {
            let x = LABEL_W + CELL * j as f64;
            let y = LABEL_H + CELL * i as f64;
            let _ = writeln!(
                out,
                "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{CELL:.1}\" height=\"{CELL:.1}\" fill=\"{}\"/>",
                hex(scale.color(v))
            );
            if annotate {
                let _ = writeln!(
                    out,
                    "<text x=\"{:.1}\" y=\"{:.1}\" {FONT} text-anchor=\"middle\">{v:.2}</text>",
                    x + CELL / 2.0,
                    y + CELL / 2.0 + 4.0
                );
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn write_file(path: &Path, svg: &str) -> Result<()> {
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}

pub fn emit_heatmap(m: &LabeledMatrix<'_>, scale: &ColorScale, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &render_heatmap(m, scale, false)?)
}

/// Gain table: annotated heatmap on a diverging scale centered at zero.
pub fn render_gain_table(m: &LabeledMatrix<'_>) -> Result<String> {
    m.validate()?;
    let abs_max = m.values.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    render_heatmap(m, &ColorScale::diverging(abs_max), true)
}

const PLOT_W: f64 = 480.0;
const PLOT_H: f64 = 300.0;
const MARGIN: f64 = 50.0;

fn axes(out: &mut String, x_label: &str, y_label: &str) {
    let (x0, y0) = (MARGIN, MARGIN + PLOT_H);
    let _ = writeln!(
        out,
        "<path d=\"M{x0:.1} {:.1} L{x0:.1} {y0:.1} L{:.1} {y0:.1}\" stroke=\"#000000\" fill=\"none\"/>",
        MARGIN,
        MARGIN + PLOT_W
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" {FONT} text-anchor=\"middle\">{}</text>",
        MARGIN + PLOT_W / 2.0,
        y0 + 35.0,
        esc(x_label)
    );
    let _ = writeln!(
        out,
        "<text x=\"15.0\" y=\"{:.1}\" {FONT} text-anchor=\"middle\" transform=\"rotate(-90 15.0 {:.1})\">{}</text>",
        MARGIN + PLOT_H / 2.0,
        MARGIN + PLOT_H / 2.0,
        esc(y_label)
    );
}

/// Bars of explained-variance ratio per component plus the cumulative line.
pub fn render_scree(ratios: &[f64]) -> Result<String> {
    if ratios.is_empty() {
        return Err(Error::Validation("scree plot needs at least one component".into()));
    }
    if ratios.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::Validation("explained variance ratios must be finite and non-negative".into()));
    }
    let mut out = String::new();
    open_svg(&mut out, PLOT_W + 2.0 * MARGIN, PLOT_H + 2.0 * MARGIN);
    axes(&mut out, "component", "explained variance ratio");
    let bw = PLOT_W / ratios.len() as f64;
    let y = |r: f64| MARGIN + PLOT_H * (1.0 - r.min(1.0));
    let mut cum = 0.0;
    let mut line = String::new();
    for (i, &r) in ratios.iter().enumerate() {
        let x = MARGIN + bw * i as f64;
        let _ = writeln!(
            out,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#2166ac\"/>",
            x + bw * 0.1,
            y(r),
            bw * 0.8,
            PLOT_H * r.min(1.0)
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" {FONT} text-anchor=\"middle\">PC{i}</text>",
            x + bw / 2.0,
            MARGIN + PLOT_H + 14.0
        );
        cum += r;
        let _ = write!(line, "{}{:.2} {:.2}", if i == 0 { "M" } else { " L" }, x + bw / 2.0, y(cum));
    }
    let _ = writeln!(out, "<path d=\"{line}\" stroke=\"#b2182b\" fill=\"none\"/>");
    out.push_str("</svg>\n");
    Ok(out)
}

const PALETTE: [&str; 6] = ["#2166ac", "#b2182b", "#1b7837", "#762a83", "#e08214", "#4d4d4d"];

/// Overlaid density curves sharing one x range.
pub fn render_kde(curves: &[(String, KdeCurve)], x_label: &str) -> Result<String> {
    if curves.is_empty() {
        return Err(Error::Validation("no curves to plot".into()));
    }
    let pts = curves.iter().flat_map(|(_, c)| c.grid.iter().zip(&c.density));
    let (mut xmin, mut xmax, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for (&x, &d) in pts {
        if !x.is_finite() || !d.is_finite() {
            return Err(Error::Validation("non-finite density curve".into()));
        }
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymax = ymax.max(d);
    }
    let xspan = if xmax > xmin { xmax - xmin } else { 1.0 };
    let yspan = if ymax > 0.0 { ymax } else { 1.0 };
    let mut out = String::new();
    open_svg(&mut out, PLOT_W + 2.0 * MARGIN + 120.0, PLOT_H + 2.0 * MARGIN);
    axes(&mut out, x_label, "density");
    for (k, (name, c)) in curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut d = String::new();
        for (i, (&x, &y)) in c.grid.iter().zip(&c.density).enumerate() {
            let px = MARGIN + PLOT_W * (x - xmin) / xspan;
            let py = MARGIN + PLOT_H * (1.0 - y / yspan);
            let _ = write!(d, "{}{px:.2} {py:.2}", if i == 0 { "M" } else { " L" });
        }
        let _ = writeln!(out, "<path d=\"{d}\" stroke=\"{color}\" fill=\"none\"/>");
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" {FONT} fill=\"{color}\">{}</text>",
            MARGIN + PLOT_W + 10.0,
            MARGIN + 14.0 * (k as f64 + 1.0),
            esc(name)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{MARGIN:.1}\" y=\"{:.1}\" {FONT}>{xmin:.1}</text>\n<text x=\"{:.1}\" y=\"{:.1}\" {FONT} text-anchor=\"end\">{xmax:.1}</text>",
        MARGIN + PLOT_H + 14.0,
        MARGIN + PLOT_W,
        MARGIN + PLOT_H + 14.0
    );
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn write_svg(svg: &str, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn color_interpolation() {
        let s = ColorScale { min: 0.0, max: 1.0, low: (0, 0, 0), high: (255, 255, 255), mid: None };
        assert_eq!(s.color(0.5), (128, 128, 128));
        assert_eq!(s.color(-3.0), (0, 0, 0));
        assert_eq!(s.color(2.0), (255, 255, 255));
        let d = ColorScale::diverging(2.0);
        assert_eq!(d.color(0.0), (247, 247, 247));
    }

    #[test]
    fn nan_rejected() {
        let l = vec!["a".to_string()];
        let v = vec![vec![f64::NAN]];
        let m = LabeledMatrix { row_labels: &l, col_labels: &l, values: &v };
        assert!(matches!(render_heatmap(&m, &ColorScale::sequential(0.0, 1.0), false), Err(Error::Validation(_))));
    }

    #[test]
    fn labels_escaped() {
        let l = vec!["a<b".to_string()];
        let v = vec![vec![0.0]];
        let m = LabeledMatrix { row_labels: &l, col_labels: &l, values: &v };
        let svg = render_gain_table(&m).unwrap();
        assert!(svg.contains("a&lt;b"));
        assert!(!svg.contains("a<b"));
    }
}
