//! Self-contained SVG line plots with a logarithmic abscissa.

use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    /// `(abscissa, value)`; points with a nonpositive abscissa are dropped.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 220.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Fixed-precision coordinates keep the output byte-stable.
fn px(v: f64) -> String {
    format!("{v:.2}")
}

fn usable(series: &[Series]) -> Vec<(usize, Vec<(f64, f64)>)> {
    series
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let pts = s.points.iter().copied().filter(|&(x, y)| x > 0.0 && x.is_finite() && y.is_finite()).collect();
            (i, pts)
        })
        .collect()
}

fn bounds(data: &[(usize, Vec<(f64, f64)>)]) -> Option<((f64, f64), (f64, f64))> {
    let all: Vec<(f64, f64)> = data.iter().flat_map(|(_, p)| p.iter().copied()).collect();
    if all.is_empty() {
        return None;
    }
    let fold = |f: fn(&(f64, f64)) -> f64| {
        all.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (mut x0, mut x1) = fold(|p| p.0.log10());
    let (mut y0, mut y1) = fold(|p| p.1);
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let pad = if y1 - y0 < 1e-12 { 0.5 * y0.abs().max(1.0) } else { 0.05 * (y1 - y0) };
    y0 -= pad;
    y1 += pad;
    Some(((x0.floor(), x1.ceil()), (y0, y1)))
}

pub fn svg(fig: &Figure) -> String {
    let mut out = String::new();
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        px(LEFT + pw / 2.0),
        escape(&fig.title)
    );
    let data = usable(&fig.series);
    let Some(((x0, x1), (y0, y1))) = bounds(&data) else {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">no data</text>"#,
            px(LEFT + pw / 2.0),
            px(TOP + ph / 2.0)
        );
        out.push_str("</svg>\n");
        return out;
    };
    let sx = |x: f64| LEFT + (x.log10() - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;
    let _ = writeln!(
        out,
        r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##
    );
    // one tick per decade, thinned to at most ten labels
    let decades = (x1 - x0).round() as i64;
    let step = (decades / 10 + 1).max(1);
    for d in (0..=decades).step_by(step as usize) {
        let e = x0 as i64 + d;
        let x = sx(10f64.powi(e as i32));
        let _ = writeln!(
            out,
            r##"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#ddd"/><text x="{0}" y="{3}" text-anchor="middle">1e{e}</text>"##,
            px(x),
            px(TOP),
            px(TOP + ph),
            px(TOP + ph + 16.0)
        );
    }
    for i in 0..=4 {
        let y = y0 + (y1 - y0) * i as f64 / 4.0;
        let _ = writeln!(
            out,
            r##"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="#ddd"/><text x="{3}" y="{4}" text-anchor="end">{5:.4}</text>"##,
            px(LEFT),
            px(sy(y)),
            px(LEFT + pw),
            px(LEFT - 6.0),
            px(sy(y) + 4.0),
            y
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{} (log scale)</text>"#,
        px(LEFT + pw / 2.0),
        px(HEIGHT - 16.0),
        escape(&fig.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">{1}</text>"#,
        px(TOP + ph / 2.0),
        escape(&fig.y_label)
    );
    for (slot, (i, pts)) in data.iter().enumerate() {
        let color = PALETTE[slot % PALETTE.len()];
        if !pts.is_empty() {
            let line: Vec<String> = pts.iter().map(|&(x, y)| format!("{},{}", px(sx(x)), px(sy(y)))).collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                line.join(" ")
            );
        }
        let ly = TOP + 10.0 + 18.0 * slot as f64;
        let lx = LEFT + pw + 14.0;
        let _ = writeln!(
            out,
            r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="{color}" stroke-width="2"/><text x="{3}" y="{4}">{5}</text>"#,
            px(lx),
            px(ly),
            px(lx + 20.0),
            px(lx + 26.0),
            px(ly + 4.0),
            escape(&fig.series[*i].label)
        );
    }
    out.push_str("</svg>\n");
    out
}
