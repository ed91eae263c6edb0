//! Standalone SVG plots.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 56.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD)
    }
}

fn open(title: &str, xlabel: &str, ylabel: &str, f: &Frame) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    let (l, r, t, b) = (PAD, W - PAD, PAD, H - PAD);
    let _ = writeln!(s, r#"<path d="M{l} {t} L{l} {b} L{r} {b}" fill="none" stroke="black"/>"#);
    for i in 0..=4 {
        let fx = f.x0 + (f.x1 - f.x0) * i as f64 / 4.0;
        let fy = f.y0 + (f.y1 - f.y0) * i as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#, f.px(fx), b + 16.0, tick(fx));
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, l - 6.0, f.py(fy) + 4.0, tick(fy));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 14.0, escape(xlabel));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(ylabel)
    );
    s
}

fn tick(v: f64) -> String {
    format!("{:.3}", v).trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Polyline of `points` with an optional vertical marker.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, points: &[(f64, f64)], marker: Option<(f64, &str)>) -> String {
    let (x0, x1) = span(points.iter().map(|p| p.0).chain(marker.map(|m| m.0)));
    let (y0, y1) = span(points.iter().map(|p| p.1).chain([0.0, 1.0]));
    let f = Frame { x0, x1, y0, y1 };
    let mut s = open(title, xlabel, ylabel, &f);
    let path: Vec<String> = points
        .iter()
        .filter(|p| p.1.is_finite())
        .map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
        .collect();
    let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#, path.join(" "));
    for &(x, y) in points.iter().filter(|p| p.1.is_finite()) {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, f.px(x), f.py(y));
    }
    if let Some((x, label)) = marker {
        let px = f.px(x);
        let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{PAD}" x2="{px:.2}" y2="{}" stroke="firebrick" stroke-dasharray="4 3"/>"#, H - PAD);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{}" fill="firebrick">{}</text>"#, px + 4.0, PAD + 12.0, escape(label));
    }
    s.push_str("</svg>\n");
    s
}

/// Grouped bars: one group per label, one bar per series.
pub fn bar_plot(title: &str, xlabel: &str, ylabel: &str, labels: &[String], series: &[(&str, Vec<f64>)]) -> String {
    let (_, y1) = span(series.iter().flat_map(|(_, v)| v.iter().copied()).chain([0.0]));
    let f = Frame { x0: 0.0, x1: labels.len().max(1) as f64, y0: 0.0, y1 };
    let mut s = open(title, xlabel, ylabel, &f);
    let colors = ["steelblue", "darkorange", "seagreen"];
    let group = (W - 2.0 * PAD) / labels.len().max(1) as f64;
    let bar = group * 0.8 / series.len().max(1) as f64;
    for (j, (name, values)) in series.iter().enumerate() {
        let color = colors[j % colors.len()];
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                continue;
            }
            let x = PAD + i as f64 * group + group * 0.1 + j as f64 * bar;
            let y = f.py(v);
            let _ = writeln!(s, r#"<rect x="{x:.2}" y="{y:.2}" width="{bar:.2}" height="{:.2}" fill="{color}"/>"#, f.py(0.0) - y);
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" fill="{color}">{}</text>"#, W - PAD - 120.0, PAD + 14.0 * j as f64, escape(name));
    }
    s.push_str("</svg>\n");
    s
}
