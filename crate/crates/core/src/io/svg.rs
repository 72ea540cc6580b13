//! Minimal deterministic SVG line plots.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 50.0;
const LEGEND_WIDTH: f64 = 150.0;

const PALETTE: [&str; 8] =
    ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// Renders every series on shared axes. Grids may differ.
pub fn render_svg(series: &[(&str, &TimeSeries)]) -> Result<String> {
    if series.is_empty() {
        return Err(Error::InvalidInput("nothing to plot".into()));
    }
    let (mut t0, mut t1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for (_, s) in series {
        t0 = t0.min(s.start());
        t1 = t1.max(s.end());
        let (lo, hi) = s.min_max();
        y0 = y0.min(lo);
        y1 = y1.max(hi);
    }
    if y1 - y0 <= 0.0 {
        let pad = y0.abs().max(1.0);
        y0 -= pad;
        y1 += pad;
    }
    let plot_w = WIDTH - 2.0 * MARGIN - LEGEND_WIDTH;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let x = |t: f64| MARGIN + (t - t0) / (t1 - t0) * plot_w;
    let y = |v: f64| MARGIN + (y1 - v) / (y1 - y0) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (left, right, top, bottom) = (MARGIN, MARGIN + plot_w, MARGIN, MARGIN + plot_h);
    let _ = writeln!(
        out,
        r#"<g stroke="black" stroke-width="1"><line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}"/><line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}"/></g>"#
    );
    let _ = writeln!(out, r#"<g font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(out, r#"<text x="{left}" y="{}" text-anchor="middle">{}</text>"#, bottom + 16.0, label(t0));
    let _ = writeln!(out, r#"<text x="{right}" y="{}" text-anchor="middle">{}</text>"#, bottom + 16.0, label(t1));
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, left - 4.0, bottom, label(y0));
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, left - 4.0, top + 4.0, label(y1));
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(
            out,
            r##"<line x1="{left}" y1="{0:.2}" x2="{right}" y2="{0:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
            y(0.0)
        );
    }
    let _ = writeln!(out, "</g>");

    for (k, (name, s)) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let mut points = String::with_capacity(s.len() * 16);
        for (i, (&t, &v)) in s.times().iter().zip(s.values()).enumerate() {
            if i > 0 {
                points.push(' ');
            }
            let _ = write!(points, "{:.2},{:.2}", x(t), y(v));
        }
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.2" points="{points}"/>"#
        );
        let ly = MARGIN + 10.0 + 18.0 * k as f64;
        let lx = right + 15.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/><text x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn write_svg(path: &Path, series: &[(&str, &TimeSeries)]) -> Result<()> {
    super::csv::write_atomic(path, render_svg(series)?.as_bytes())
}

fn label(v: f64) -> String {
    format!("{v:.3}").trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_is_horizontal() {
        let s = TimeSeries::from_values(vec![2.0; 5]).unwrap();
        let svg = render_svg(&[("flat", &s)]).unwrap();
        let points = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        let ys: Vec<&str> = points.split(' ').map(|p| p.split(',').nth(1).unwrap()).collect();
        assert_eq!(ys.len(), 5);
        assert!(ys.iter().all(|y| *y == ys[0]));
    }

    #[test]
    fn distinct_colours() {
        let a = TimeSeries::from_values(vec![0.0, 1.0, 0.0]).unwrap();
        let b = TimeSeries::new(vec![0.5, 1.0, 3.0], vec![1.0, -1.0, 2.0]).unwrap();
        let svg = render_svg(&[("a", &a), ("b & c", &b)]).unwrap();
        let strokes: Vec<&str> = svg
            .lines()
            .filter(|l| l.starts_with("<polyline"))
            .map(|l| l.split("stroke=\"").nth(1).unwrap().split('"').next().unwrap())
            .collect();
        assert_eq!(strokes.len(), 2);
        assert_ne!(strokes[0], strokes[1]);
        assert!(svg.contains("b &amp; c"));
    }

    #[test]
    fn deterministic_files() {
        let dir = tempfile::tempdir().unwrap();
        let s = TimeSeries::sample(0.0, 100.0, 1.0, |t| (t / 7.0).sin()).unwrap();
        let (p, q) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
        write_svg(&p, &[("s", &s)]).unwrap();
        write_svg(&q, &[("s", &s)]).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&q).unwrap());
    }

    #[test]
    fn errors() {
        assert!(render_svg(&[]).is_err());
        let s = TimeSeries::from_values(vec![0.0, 1.0]).unwrap();
        assert!(write_svg(Path::new("/nonexistent/dir/x.svg"), &[("s", &s)]).is_err());
    }
}
