//! Minimal SVG line plots.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 300.0;
const MARGIN: f64 = 50.0;
const MAX_POINTS: usize = 2000;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub struct Series<'a> {
    pub label: String,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bounds<'a>(cols: impl Iterator<Item = &'a [f64]>) -> (f64, f64) {
    cols.flat_map(|c| c.iter().copied().filter(|v| v.is_finite()))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// One panel; non-finite points break the polyline.
pub fn line_plot(title: &str, xlabel: &str, series: &[Series]) -> String {
    let (mut x0, mut x1) = bounds(series.iter().map(|s| s.x));
    let (mut y0, mut y1) = bounds(series.iter().map(|s| s.y));
    if x0 >= x1 || x0.is_nan() || x1.is_nan() {
        (x0, x1) = (x0 - 0.5, x0 + 0.5);
    }
    if y0 >= y1 || y0.is_nan() || y1.is_nan() {
        (y0, y1) = (y0 - 0.5, y0 + 0.5);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(xlabel)
    );
    for (v, x, anchor, y) in [
        (x0, sx(x0), "start", HEIGHT - MARGIN + 14.0),
        (x1, sx(x1), "end", HEIGHT - MARGIN + 14.0),
    ] {
        let _ = writeln!(out, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{v:.4}</text>"#);
    }
    for (v, y) in [(y0, sy(y0)), (y1, sy(y1))] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end">{v:.4}</text>"#,
            MARGIN - 4.0,
            y + 4.0
        );
    }

    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let n = s.x.len().min(s.y.len());
        let stride = n.div_ceil(MAX_POINTS).max(1);
        let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        for i in (0..n).step_by(stride) {
            if s.x[i].is_finite() && s.y[i].is_finite() {
                segments.last_mut().unwrap().push((sx(s.x[i]), sy(s.y[i])));
            } else if !segments.last().unwrap().is_empty() {
                segments.push(Vec::new());
            }
        }
        for seg in segments.iter().filter(|s| s.len() > 1) {
            let pts: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
                pts.join(" ")
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{color}" text-anchor="end">{}</text>"#,
            WIDTH - MARGIN - 6.0,
            MARGIN + 14.0 * (k as f64 + 1.0),
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}
