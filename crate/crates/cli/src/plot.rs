//! Learning-curve chart: per-method mean with a ±1 std band, as SVG.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use lantern_core::metrics::{mean, std_dev, RunMetrics};

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Trailing moving average.
fn smooth(values: &[f64], window: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    for (i, v) in values.iter().enumerate() {
        sum += v;
        if i >= window {
            sum -= values[i - window];
        }
        out.push(sum / (i + 1).min(window) as f64);
    }
    out
}

struct Band {
    mean: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

fn band(runs: &[RunMetrics], window: usize) -> Band {
    let curves: Vec<Vec<f64>> = runs.iter().map(|r| smooth(&r.rewards(), window)).collect();
    let len = curves.iter().map(Vec::len).min().unwrap_or(0);
    let mut b = Band {
        mean: Vec::with_capacity(len),
        lo: Vec::with_capacity(len),
        hi: Vec::with_capacity(len),
    };
    for t in 0..len {
        let col: Vec<f64> = curves.iter().map(|c| c[t]).collect();
        let (m, s) = (mean(&col), std_dev(&col));
        b.mean.push(m);
        b.lo.push(m - s);
        b.hi.push(m + s);
    }
    b
}

pub fn learning_curves_svg(runs: &BTreeMap<String, Vec<RunMetrics>>, title: &str) -> String {
    let longest = runs.values().flatten().map(|r| r.episodes.len()).max().unwrap_or(0);
    let window = (longest / 50).max(1);
    let bands: Vec<(&String, Band)> = runs.iter().map(|(m, r)| (m, band(r, window))).collect();
    let (mut ymin, mut ymax) = bands
        .iter()
        .flat_map(|(_, b)| b.lo.iter().chain(&b.hi))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    if !ymin.is_finite() {
        (ymin, ymax) = (0.0, 1.0);
    }
    if ymax - ymin < 1e-9 {
        ymax = ymin + 1.0;
    }
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let xmax = longest.saturating_sub(1).max(1) as f64;
    let x = |t: usize| LEFT + t as f64 / xmax * plot_w;
    let y = |v: f64| TOP + (ymax - v) / (ymax - ymin) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{LEFT}" y="18" font-size="14">{}</text>"#, escape(title));
    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#444"/>"##
    );
    for i in 0..=4 {
        let v = ymin + (ymax - ymin) * i as f64 / 4.0;
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" x2="{:.1}" y1="{py:.1}" y2="{py:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{v:.2}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y(v) + 4.0,
            py = y(v),
        );
        let t = (xmax * i as f64 / 4.0).round() as usize;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{t}</text>"#,
            x(t),
            TOP + plot_h + 18.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">episode</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate(16 {:.1}) rotate(-90)" text-anchor="middle">reward (moving mean, window {window})</text>"#,
        TOP + plot_h / 2.0
    );
    for (i, (method, b)) in bands.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut area = String::new();
        for (t, v) in b.hi.iter().enumerate() {
            let _ = write!(area, "{:.1},{:.1} ", x(t), y(*v));
        }
        for (t, v) in b.lo.iter().enumerate().rev() {
            let _ = write!(area, "{:.1},{:.1} ", x(t), y(*v));
        }
        let line: String = b
            .mean
            .iter()
            .enumerate()
            .map(|(t, v)| format!("{:.1},{:.1}", x(t), y(*v)))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            svg,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.18" stroke="none"/>"#,
            area.trim_end()
        );
        let _ = writeln!(
            svg,
            r#"<polyline points="{line}" fill="none" stroke="{color}" stroke-width="1.6"/>"#
        );
        let ly = TOP + 14.0 + i as f64 * 20.0;
        let lx = WIDTH - RIGHT + 14.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" x2="{:.1}" y1="{ly:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="3"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 22.0,
            lx + 28.0,
            ly + 4.0,
            escape(method)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
