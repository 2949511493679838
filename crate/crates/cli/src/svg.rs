//! Minimal static line charts: polylines with optional shaded bands.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const MAX_POINTS: usize = 400;
const PALETTE: &[&str] = &[
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

pub struct Series<'a> {
    pub name: &'a str,
    pub y: &'a [f64],
    /// Half-width of the shaded band around `y`.
    pub band: Option<Vec<f64>>,
}

/// Trial indices to plot, at most `MAX_POINTS` of them, always including
/// the last.
fn sample_points(n: usize) -> Vec<usize> {
    if n <= MAX_POINTS {
        return (0..n).collect();
    }
    let step = n as f64 / MAX_POINTS as f64;
    let mut idx: Vec<usize> = (0..MAX_POINTS)
        .map(|i| (i as f64 * step) as usize)
        .collect();
    idx.push(n - 1);
    idx.dedup();
    idx
}

pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let n = series.iter().map(|s| s.y.len()).max().unwrap_or(0).max(1);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in series {
        for (i, &v) in s.y.iter().enumerate() {
            let w = s.band.as_ref().map_or(0.0, |b| b[i]);
            if v.is_finite() {
                lo = lo.min(v - w);
                hi = hi.max(v + w);
            }
        }
    }
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        hi = lo + 1.0;
    }
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |i: usize| LEFT + pw * i as f64 / (n.max(2) - 1) as f64;
    let sy = |v: f64| TOP + ph * (1.0 - (v - lo) / (hi - lo));

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let y = sy(v);
        let _ = writeln!(
            out,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            y + 4.0,
            tick(v)
        );
        let i = ((n - 1) as f64 * k as f64 / 4.0).round() as usize;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(i),
            TOP + ph + 18.0,
            i + 1
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(y_label)
    );

    for (si, s) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let pts = sample_points(s.y.len());
        if let Some(band) = &s.band {
            let mut poly = String::new();
            for &i in &pts {
                let _ = write!(poly, "{:.2},{:.2} ", sx(i), sy(s.y[i] + band[i]));
            }
            for &i in pts.iter().rev() {
                let _ = write!(poly, "{:.2},{:.2} ", sx(i), sy(s.y[i] - band[i]));
            }
            let _ = writeln!(
                out,
                r#"<polygon points="{}" fill="{color}" fill-opacity="0.18" stroke="none"/>"#,
                poly.trim_end()
            );
        }
        let mut line = String::new();
        for &i in &pts {
            if s.y[i].is_finite() {
                let _ = write!(line, "{:.2},{:.2} ", sx(i), sy(s.y[i]));
            }
        }
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"/>"#,
            line.trim_end()
        );
        let ly = TOP + 14.0 + 18.0 * si as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="3"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(s.name)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn tick(v: f64) -> String {
    if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else if v.abs() >= 1.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
