//! Minimal SVG emitters: scatter, line and horizontal bar charts.
//! Every document carries one version comment line; everything else is a
//! pure function of the inputs.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

pub const CLASS_COLORS: [&str; 2] = ["#1f77b4", "#d62728"];

fn header(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, "<!-- covhess {} -->", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn num(v: f64) -> String {
    format!("{v:.2}")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.1e}")
    } else {
        format!("{v:.2}")
    }
}

#[derive(Debug, Clone)]
enum Series {
    Scatter { points: Vec<(f64, f64)>, color: String, label: String },
    Line { points: Vec<(f64, f64)>, color: String, label: String, dashed: bool },
}

/// Two-axis chart. Axis ranges cover the scatter data when present,
/// otherwise all series; lines are clipped to the plot area.
#[derive(Debug, Clone, Default)]
pub struct Plot {
    title: String,
    x_label: String,
    y_label: String,
    series: Vec<Series>,
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Plot { title: title.into(), x_label: x_label.into(), y_label: y_label.into(), series: Vec::new() }
    }

    pub fn scatter(&mut self, points: Vec<(f64, f64)>, color: &str, label: &str) -> &mut Self {
        self.series.push(Series::Scatter { points, color: color.into(), label: label.into() });
        self
    }

    pub fn line(&mut self, points: Vec<(f64, f64)>, color: &str, label: &str, dashed: bool) -> &mut Self {
        self.series.push(Series::Line { points, color: color.into(), label: label.into(), dashed });
        self
    }

    fn bounds(&self) -> ((f64, f64), (f64, f64)) {
        let has_scatter = self.series.iter().any(|s| matches!(s, Series::Scatter { .. }));
        let mut xs = (f64::INFINITY, f64::NEG_INFINITY);
        let mut ys = xs;
        for s in &self.series {
            let pts = match s {
                Series::Scatter { points, .. } => points,
                Series::Line { points, .. } if !has_scatter => points,
                Series::Line { .. } => continue,
            };
            for &(x, y) in pts.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
                xs = (xs.0.min(x), xs.1.max(x));
                ys = (ys.0.min(y), ys.1.max(y));
            }
        }
        (pad(xs), pad(ys))
    }

    pub fn render(&self) -> String {
        let ((x0, x1), (y0, y1)) = self.bounds();
        let pw = W - MARGIN_L - MARGIN_R;
        let ph = H - MARGIN_T - MARGIN_B;
        let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| MARGIN_T + ph - (y - y0) / (y1 - y0) * ph;

        let mut out = String::new();
        header(&mut out, W, H);
        let _ = writeln!(
            out,
            r#"<clipPath id="area"><rect x="{}" y="{}" width="{}" height="{}"/></clipPath>"#,
            num(MARGIN_L),
            num(MARGIN_T),
            num(pw),
            num(ph)
        );
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            num(MARGIN_L),
            num(MARGIN_T),
            num(pw),
            num(ph)
        );
        for k in 0..=4 {
            let fx = x0 + (x1 - x0) * k as f64 / 4.0;
            let fy = y0 + (y1 - y0) * k as f64 / 4.0;
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
                num(sx(fx)),
                num(H - MARGIN_B + 16.0),
                tick_label(fx)
            );
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
                num(MARGIN_L - 6.0),
                num(sy(fy) + 4.0),
                tick_label(fy)
            );
        }
        let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, num(MARGIN_L + pw / 2.0), escape(&self.title));
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, num(MARGIN_L + pw / 2.0), num(H - 10.0), escape(&self.x_label));
        let _ = writeln!(
            out,
            r#"<text transform="translate(16,{}) rotate(-90)" text-anchor="middle">{}</text>"#,
            num(MARGIN_T + ph / 2.0),
            escape(&self.y_label)
        );

        let _ = writeln!(out, r#"<g clip-path="url(#area)">"#);
        for s in &self.series {
            match s {
                Series::Scatter { points, color, .. } => {
                    for &(x, y) in points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
                        let _ = writeln!(
                            out,
                            r#"<circle cx="{}" cy="{}" r="2.5" fill="{color}" fill-opacity="0.7"/>"#,
                            num(sx(x)),
                            num(sy(y))
                        );
                    }
                }
                Series::Line { points, color, dashed, .. } => {
                    let path: Vec<String> = points
                        .iter()
                        .filter(|(x, y)| x.is_finite() && y.is_finite())
                        .map(|&(x, y)| format!("{},{}", num(sx(x)), num(sy(y))))
                        .collect();
                    let dash = if *dashed { r#" stroke-dasharray="6,4""# } else { "" };
                    let _ = writeln!(
                        out,
                        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                        path.join(" ")
                    );
                }
            }
        }
        out.push_str("</g>\n");

        for (k, s) in self.series.iter().enumerate() {
            let (color, label) = match s {
                Series::Scatter { color, label, .. } | Series::Line { color, label, .. } => (color, label),
            };
            let y = MARGIN_T + 10.0 + 18.0 * k as f64;
            let x = W - MARGIN_R + 10.0;
            let _ = writeln!(out, r#"<rect x="{}" y="{}" width="10" height="10" fill="{color}"/>"#, num(x), num(y - 9.0));
            let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, num(x + 14.0), num(y), escape(label));
        }
        out.push_str("</svg>\n");
        out
    }
}

fn pad((lo, hi): (f64, f64)) -> (f64, f64) {
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    let span = hi - lo;
    if span <= 0.0 {
        let d = lo.abs().max(1.0) * 0.5;
        return (lo - d, hi + d);
    }
    (lo - 0.05 * span, hi + 0.05 * span)
}

/// Horizontal bars, one per `(label, value)`, in the given order. Values are non-negative.
pub fn bar_chart(title: &str, items: &[(String, f64)]) -> String {
    let row = 16.0;
    let label_w = 200.0;
    let bar_w = 380.0;
    let width = label_w + bar_w + 80.0;
    let height = MARGIN_T + row * items.len() as f64 + 20.0;
    let max = items.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut out = String::new();
    header(&mut out, width, height);
    let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, num(width / 2.0), escape(title));
    for (k, (label, v)) in items.iter().enumerate() {
        let y = MARGIN_T + row * k as f64;
        let len = v.abs() / max * bar_w;
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, num(label_w - 6.0), num(y + 11.0), escape(label));
        let _ = writeln!(
            out,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#4c72b0"/>"##,
            num(label_w),
            num(y + 2.0),
            num(len),
            num(row - 4.0)
        );
        let _ = writeln!(out, r#"<text x="{}" y="{}">{:.3}</text>"#, num(label_w + len + 4.0), num(y + 11.0), v);
    }
    out.push_str("</svg>\n");
    out
}

/// Drops the version comment so documents can be compared across releases.
pub fn strip_version_comment(svg: &str) -> String {
    svg.lines().filter(|l| !l.starts_with("<!-- covhess ")).collect::<Vec<_>>().join("\n")
}
