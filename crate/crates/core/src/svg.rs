//! Minimal self-contained SVG charts: line charts, heatmaps and histograms.
//!
//! Coordinates are written with two decimals so output is byte-stable.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn finite_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn plot_width() -> f64 {
        WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    }

    fn plot_height() -> f64 {
        HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * Self::plot_width()
    }

    fn py(&self, y: f64) -> f64 {
        MARGIN_TOP + (1.0 - (y - self.y.0) / (self.y.1 - self.y.0)) * Self::plot_height()
    }
}

fn open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let (x0, x1) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let (y0, y1) = (HEIGHT - MARGIN_BOTTOM, MARGIN_TOP);
    let _ = writeln!(
        out,
        r#"<path d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let t = f64::from(i) / 4.0;
        let xv = frame.x.0 + t * (frame.x.1 - frame.x.0);
        let yv = frame.y.0 + t * (frame.y.1 - frame.y.0);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            frame.px(xv),
            y0 + 16.0,
            tick(xv)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 6.0,
            frame.py(yv) + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 20.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

fn tick(v: f64) -> String {
    if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else if v.abs() >= 1.0 {
        format!("{v:.2}")
    } else {
        format!("{v:.3}")
    }
}

/// Line chart with markers, one colour per series and a legend on the right.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let frame = Frame {
        x: finite_range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0))),
        y: finite_range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1))),
    };
    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, &frame, x_label, y_label);
    for (k, s) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let mut d = String::new();
        for (i, &(x, y)) in s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .enumerate()
        {
            let _ = write!(
                d,
                "{}{:.2},{:.2} ",
                if i == 0 { "M" } else { "L" },
                frame.px(x),
                frame.py(y)
            );
        }
        let _ = writeln!(
            out,
            r#"<path d="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
            d.trim_end()
        );
        for &(x, y) in s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
        {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{colour}"/>"#,
                frame.px(x),
                frame.py(y)
            );
        }
        let ly = MARGIN_TOP + 16.0 * k as f64;
        let lx = WIDTH - MARGIN_RIGHT + 12.0;
        let _ = writeln!(
            out,
            r#"<rect x="{lx:.2}" y="{:.2}" width="10" height="10" fill="{colour}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            ly,
            lx + 14.0,
            ly + 9.0,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn heat_colour(t: f64) -> String {
    // white -> dark blue
    let t = if t.is_finite() {
        t.clamp(0.0, 1.0)
    } else {
        0.0
    };
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        lerp(247.0, 8.0),
        lerp(251.0, 48.0),
        lerp(255.0, 107.0)
    )
}

/// Heatmap of `values[row][col]`, rows along the y axis (`y_values`) and
/// columns along the x axis (`x_values`). The colour scale spans `range`.
pub fn heatmap(
    title: &str,
    x_label: &str,
    y_label: &str,
    x_values: &[f64],
    y_values: &[f64],
    values: &[Vec<f64>],
    range: (f64, f64),
) -> String {
    let mut out = String::new();
    open(&mut out, title);
    let cw = Frame::plot_width() / x_values.len().max(1) as f64;
    let ch = Frame::plot_height() / y_values.len().max(1) as f64;
    let span = (range.1 - range.0).max(1e-12);
    for (r, row) in values.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            let x = MARGIN_LEFT + c as f64 * cw;
            let y = HEIGHT - MARGIN_BOTTOM - (r as f64 + 1.0) * ch;
            let _ = writeln!(
                out,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{cw:.2}" height="{ch:.2}" fill="{}"><title>{}</title></rect>"#,
                heat_colour((v - range.0) / span),
                v
            );
        }
    }
    for (c, xv) in x_values
        .iter()
        .enumerate()
        .step_by((x_values.len() / 6).max(1))
    {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + (c as f64 + 0.5) * cw,
            HEIGHT - MARGIN_BOTTOM + 16.0,
            tick(*xv)
        );
    }
    for (r, yv) in y_values
        .iter()
        .enumerate()
        .step_by((y_values.len() / 6).max(1))
    {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 6.0,
            HEIGHT - MARGIN_BOTTOM - (r as f64 + 0.5) * ch + 4.0,
            tick(*yv)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + Frame::plot_width() / 2.0,
        HEIGHT - 20.0,
        escape(x_label)
    );
    let mid = MARGIN_TOP + Frame::plot_height() / 2.0;
    let _ = writeln!(
        out,
        r#"<text x="18" y="{mid:.2}" text-anchor="middle" transform="rotate(-90 18 {mid:.2})">{}</text>"#,
        escape(y_label)
    );
    // colour bar
    let bx = WIDTH - MARGIN_RIGHT + 20.0;
    for i in 0..20 {
        let t = f64::from(i) / 19.0;
        let y = HEIGHT - MARGIN_BOTTOM - (f64::from(i) + 1.0) * Frame::plot_height() / 20.0;
        let _ = writeln!(
            out,
            r#"<rect x="{bx:.2}" y="{y:.2}" width="16" height="{:.2}" fill="{}"/>"#,
            Frame::plot_height() / 20.0,
            heat_colour(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}">{}</text><text x="{:.2}" y="{:.2}">{}</text>"#,
        bx + 20.0,
        HEIGHT - MARGIN_BOTTOM,
        tick(range.0),
        bx + 20.0,
        MARGIN_TOP + 10.0,
        tick(range.1)
    );
    out.push_str("</svg>\n");
    out
}

/// Density histogram (area one) of each sample, drawn as step lines.
pub fn histogram(
    title: &str,
    x_label: &str,
    samples: &[(String, Vec<f64>)],
    bins: usize,
) -> String {
    let bins = bins.max(1);
    let (lo, hi) = finite_range(samples.iter().flat_map(|(_, v)| v.iter().copied()));
    let width = (hi - lo) / bins as f64;
    let series: Vec<Series> = samples
        .iter()
        .map(|(label, values)| {
            let mut counts = vec![0usize; bins];
            for &v in values.iter().filter(|v| v.is_finite()) {
                let b = (((v - lo) / width) as usize).min(bins - 1);
                counts[b] += 1;
            }
            let total = values.len().max(1) as f64;
            let mut points = Vec::with_capacity(2 * bins);
            for (b, &n) in counts.iter().enumerate() {
                let density = n as f64 / (total * width);
                points.push((lo + b as f64 * width, density));
                points.push((lo + (b + 1) as f64 * width, density));
            }
            Series {
                label: label.clone(),
                points,
            }
        })
        .collect();
    line_chart(title, x_label, "density", &series).replace(r#"r="2.5""#, r#"r="0""#)
}
