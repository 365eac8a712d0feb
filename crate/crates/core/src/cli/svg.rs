//! Minimal SVG output: heatmaps built from rectangles and line plots built
//! from polylines.

use std::fmt::Write as _;

use crate::floquet::{ep_boundary, PhaseLabel};
use crate::sweeps::{open_interval_samples, PhaseDiagram};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

const PTSP_COLOR: &str = "#3b6fb6";
const PTBP_COLOR: &str = "#c8553d";
const EP_COLOR: &str = "#111111";

fn plot_w() -> f64 {
    WIDTH - 2.0 * MARGIN
}

fn plot_h() -> f64 {
    HEIGHT - 2.0 * MARGIN
}

fn open(s: &mut String, title: &str) {
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        MARGIN / 2.0,
        title
    )
    .unwrap();
}

fn axes(s: &mut String, x_label: &str, y_label: &str, x: (f64, f64), y: (f64, f64)) {
    let (x0, y0) = (MARGIN, HEIGHT - MARGIN);
    writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        plot_w(),
        plot_h()
    )
    .unwrap();
    for (text, px, py, anchor) in [
        (format!("{:.3}", x.0), x0, y0 + 16.0, "start"),
        (format!("{:.3}", x.1), x0 + plot_w(), y0 + 16.0, "end"),
        (format!("{:.3}", y.0), x0 - 4.0, y0, "end"),
        (format!("{:.3}", y.1), x0 - 4.0, MARGIN + 10.0, "end"),
    ] {
        writeln!(
            s,
            r#"<text x="{px}" y="{py}" text-anchor="{anchor}">{text}</text>"#
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#,
        MARGIN + plot_w() / 2.0,
        HEIGHT - MARGIN / 3.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" transform="rotate(-90 {} {})">{y_label}</text>"#,
        MARGIN / 3.0,
        MARGIN + plot_h() / 2.0,
        MARGIN / 3.0,
        MARGIN + plot_h() / 2.0
    )
    .unwrap();
}

/// Linear map from data to pixel coordinates.
struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * plot_w()
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * plot_h()
    }
}

fn lerp_color(a: (u8, u8, u8), b: (u8, u8, u8), t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let mix = |x: u8, y: u8| (x as f64 + (y as f64 - x as f64) * t).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(a.0, b.0),
        mix(a.1, b.1),
        mix(a.2, b.2)
    )
}

/// What a heatmap cell is colored by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel {
    /// Phase label; cells with `|D − 1| ≤ band` are drawn in the EP color.
    Phase {
        band: f64,
    },
    Kappa,
}

fn cell_color(diagram: &PhaseDiagram, index: usize, channel: Channel, kappa_max: f64) -> String {
    let c = &diagram.cells[index];
    match channel {
        Channel::Phase { band } => {
            if c.phase == PhaseLabel::Ep || (c.discriminant - 1.0).abs() <= band {
                EP_COLOR.to_string()
            } else if c.phase == PhaseLabel::Ptsp {
                PTSP_COLOR.to_string()
            } else {
                PTBP_COLOR.to_string()
            }
        }
        Channel::Kappa => {
            let t = if kappa_max > 0.0 {
                (c.kappa / kappa_max).sqrt()
            } else {
                0.0
            };
            lerp_color((253, 231, 37), (68, 1, 84), t)
        }
    }
}

/// Heatmap over `(Ωt₀, γt₁)` with the EP curve overlaid.
pub fn heatmap(diagram: &PhaseDiagram, channel: Channel, title: &str) -> String {
    let spec = &diagram.spec;
    let (nx, ny) = (spec.omega_t0.count, spec.gamma_t1.count);
    let omegas = spec.omega_t0.values(spec.spacing);
    let gammas = spec.gamma_t1.values(spec.spacing);
    let frame = Frame {
        x: (spec.omega_t0.min, spec.omega_t0.max),
        y: (spec.gamma_t1.min, spec.gamma_t1.max),
    };
    let kappa_max = diagram
        .cells
        .iter()
        .map(|c| c.kappa)
        .filter(|k| k.is_finite())
        .fold(0.0, f64::max);

    // cell edges halfway between nodes, clamped to the axis range
    let edges = |v: &[f64]| -> Vec<f64> {
        let mut e = Vec::with_capacity(v.len() + 1);
        e.push(v[0]);
        for w in v.windows(2) {
            e.push(0.5 * (w[0] + w[1]));
        }
        e.push(v[v.len() - 1]);
        e
    };
    let xe = edges(&omegas);
    let ye = edges(&gammas);

    let mut s = String::new();
    open(&mut s, title);
    for row in 0..ny {
        let (top, bottom) = (frame.py(ye[row + 1]), frame.py(ye[row]));
        let mut col = 0;
        while col < nx {
            // merge runs of equal color within a row
            let color = cell_color(diagram, row * nx + col, channel, kappa_max);
            let mut end = col + 1;
            while end < nx && cell_color(diagram, row * nx + end, channel, kappa_max) == color {
                end += 1;
            }
            let (left, right) = (frame.px(xe[col]), frame.px(xe[end]));
            writeln!(
                s,
                r#"<rect x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{color}" shape-rendering="crispEdges"/>"#,
                right - left,
                bottom - top
            )
            .unwrap();
            col = end;
        }
    }

    let lo = spec.omega_t0.min.max(0.0);
    let hi = spec.omega_t0.max.min(std::f64::consts::PI);
    if hi > lo {
        let pts: Vec<String> = open_interval_samples(lo, hi, 400)
            .into_iter()
            .filter_map(|a| ep_boundary(a).ok().map(|g| (a, g)))
            .filter(|&(_, g)| g >= spec.gamma_t1.min && g <= spec.gamma_t1.max)
            .map(|(a, g)| format!("{:.2},{:.2}", frame.px(a), frame.py(g)))
            .collect();
        if pts.len() > 1 {
            writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="white" stroke-width="2"/>"#,
                pts.join(" ")
            )
            .unwrap();
        }
    }
    axes(&mut s, "Ωt₀", "γt₁", frame.x, frame.y);
    s.push_str("</svg>\n");
    s
}

/// Line plot of one or more named series over a shared x axis.
pub fn line_plot(title: &str, x_label: &str, x: &[f64], series: &[(&str, Vec<f64>)]) -> String {
    let x_range = (
        x.first().copied().unwrap_or(0.0),
        x.last().copied().unwrap_or(1.0),
    );
    let x_range = if x_range.1 > x_range.0 {
        x_range
    } else {
        (x_range.0, x_range.0 + 1.0)
    };
    let frame = Frame {
        x: x_range,
        y: (0.0, 1.0),
    };
    let colors = ["#1f4e9c", "#c8553d", "#2a9d5b"];
    let mut s = String::new();
    open(&mut s, title);
    for (k, (name, ys)) in series.iter().enumerate() {
        let pts: Vec<String> = x
            .iter()
            .zip(ys)
            .map(|(&a, &b)| format!("{:.2},{:.2}", frame.px(a), frame.py(b.clamp(0.0, 1.0))))
            .collect();
        let color = colors[k % colors.len()];
        writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.join(" ")
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{name}</text>"#,
            WIDTH - MARGIN - 80.0,
            MARGIN + 16.0 * (k as f64 + 1.0)
        )
        .unwrap();
    }
    axes(&mut s, x_label, "P₀", frame.x, frame.y);
    s.push_str("</svg>\n");
    s
}
