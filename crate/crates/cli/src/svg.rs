//! Minimal SVG output: axes, polylines and histogram bars.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 50.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let widen = |a: f64, b: f64| if b > a { (a, b) } else { (a - 0.5, a + 0.5) };
        let (x0, x1) = widen(x0, x1);
        let (y0, y1) = widen(y0, y1);
        Frame { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD)
    }

    fn axes(&self, out: &mut String, title: &str, x_label: &str, y_label: &str) {
        let _ = write!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">"#
        );
        let _ = write!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = write!(out, r#"<path d="M{PAD} {} V{} H{}" stroke="black" fill="none"/>"#, PAD, H - PAD, W - PAD);
        let _ =
            write!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#, W / 2.0, escape(title));
        let _ =
            write!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 10.0, escape(x_label));
        let _ = write!(
            out,
            r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
            H / 2.0,
            H / 2.0,
            escape(y_label)
        );
        for (v, anchor_x, anchor_y) in
            [(self.x0, self.px(self.x0), H - PAD + 14.0), (self.x1, self.px(self.x1), H - PAD + 14.0)]
        {
            let _ = write!(out, r#"<text x="{anchor_x}" y="{anchor_y}" text-anchor="middle">{v:.3e}</text>"#);
        }
        for v in [self.y0, self.y1] {
            let _ = write!(out, r#"<text x="{}" y="{}" text-anchor="end">{v:.3e}</text>"#, PAD - 4.0, self.py(v) + 4.0);
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Histogram of `values` with `bins` equal-width bars.
pub fn histogram(values: &[f64], bins: usize, title: &str, x_label: &str) -> String {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if values.is_empty() { (0.0, 1.0) } else { (lo, hi) };
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0u64; bins.max(1)];
    for v in values {
        let b = (((v - lo) / width) as usize).min(counts.len() - 1);
        counts[b] += 1;
    }
    let top = counts.iter().copied().max().unwrap_or(1) as f64;
    let frame = Frame::new(lo, lo + width * counts.len() as f64, 0.0, top);
    let mut out = String::new();
    frame.axes(&mut out, title, x_label, "count");
    for (i, c) in counts.iter().enumerate() {
        let x = frame.px(lo + width * i as f64);
        let x_next = frame.px(lo + width * (i + 1) as f64);
        let y = frame.py(*c as f64);
        let _ = write!(
            out,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}" stroke="white"/>"#,
            (x_next - x).max(0.5),
            frame.py(0.0) - y,
            COLOURS[0]
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Line plot of named series. With `log_y`, the y axis shows `log10` of
/// the values and non-positive points are dropped.
pub fn lines(series: &[(String, Vec<(f64, f64)>)], log_y: bool, title: &str, x_label: &str, y_label: &str) -> String {
    let map_y = |y: f64| if log_y { (y > 0.0).then(|| y.log10()) } else { Some(y) };
    let pts: Vec<(f64, f64)> =
        series.iter().flat_map(|(_, s)| s.iter().filter_map(|&(x, y)| map_y(y).map(|y| (x, y)))).collect();
    let fold = |f: fn(f64, f64) -> f64, init: f64, sel: fn(&(f64, f64)) -> f64| pts.iter().map(sel).fold(init, f);
    let frame = if pts.is_empty() {
        Frame::new(0.0, 1.0, 0.0, 1.0)
    } else {
        Frame::new(
            fold(f64::min, f64::INFINITY, |p| p.0),
            fold(f64::max, f64::NEG_INFINITY, |p| p.0),
            fold(f64::min, f64::INFINITY, |p| p.1),
            fold(f64::max, f64::NEG_INFINITY, |p| p.1),
        )
    };
    let y_label = if log_y { format!("log10 {y_label}") } else { y_label.to_string() };
    let mut out = String::new();
    frame.axes(&mut out, title, x_label, &y_label);
    for (k, (name, s)) in series.iter().enumerate() {
        let colour = COLOURS[k % COLOURS.len()];
        let coords: Vec<String> =
            s.iter().filter_map(|&(x, y)| map_y(y).map(|y| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))).collect();
        let _ = write!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
            coords.join(" ")
        );
        for c in &coords {
            let (x, y) = c.split_once(',').unwrap();
            let _ = write!(out, r#"<circle cx="{x}" cy="{y}" r="2.5" fill="{colour}"/>"#);
        }
        let _ = write!(
            out,
            r#"<text x="{}" y="{}" fill="{colour}">{}</text>"#,
            W - PAD - 120.0,
            PAD + 14.0 * k as f64,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}
