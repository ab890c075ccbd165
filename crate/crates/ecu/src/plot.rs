//! CSV and SVG export of triangle maps and two-prize curves.

use std::fmt::Write;

use ecu_core::geometry::{Point, Polyline, ThresholdLine, TriangleMap};

/// Noted in every export: which context applies exactly on the threshold.
pub const CONTEXT_NOTE: &str = "lotteries whose disappointment mass equals tau are valued with u (inclusive convention)";

/// Rows `curve,kind,segment,x,y`; `kind` is `point` or `break`.
pub fn curves_csv(curves: &[(String, &Polyline)]) -> String {
    let mut out = String::from("curve,kind,segment,x,y\n");
    for (name, line) in curves {
        for (s, seg) in line.segments.iter().enumerate() {
            for p in seg {
                let _ = writeln!(out, "{name},point,{s},{},{}", p.x, p.y);
            }
        }
        for p in &line.breaks {
            let _ = writeln!(out, "{name},break,,{},{}", p.x, p.y);
        }
    }
    out
}

pub fn triangle_csv(map: &TriangleMap) -> String {
    let named: Vec<(String, &Polyline)> = map.levels.iter().zip(&map.curves).map(|(l, c)| (format!("level={l}"), c)).collect();
    curves_csv(&named)
}

struct Frame {
    size: f64,
    pad: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl Frame {
    fn map(&self, p: &Point) -> (f64, f64) {
        let span = self.size - 2.0 * self.pad;
        let fx = (p.x - self.x_range.0) / (self.x_range.1 - self.x_range.0);
        let fy = (p.y - self.y_range.0) / (self.y_range.1 - self.y_range.0);
        (self.pad + fx * span, self.size - self.pad - fy * span)
    }

    fn polyline(&self, pts: &[Point], style: &str) -> String {
        let coords: Vec<String> = pts
            .iter()
            .map(|p| {
                let (x, y) = self.map(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        format!("<polyline fill=\"none\" {style} points=\"{}\"/>\n", coords.join(" "))
    }
}

fn svg_curves(frame: &Frame, title: &str, background: &str, curves: &[&Polyline]) -> String {
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n<title>{title}</title>\n<desc>{CONTEXT_NOTE}</desc>\n",
        frame.size
    );
    out += background;
    for c in curves {
        for seg in &c.segments {
            out += &frame.polyline(seg, "stroke=\"#1f4e79\" stroke-width=\"1.5\"");
        }
        for b in &c.breaks {
            let (x, y) = frame.map(b);
            let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"white\" stroke=\"#b22222\"/>");
        }
    }
    out += "</svg>\n";
    out
}

/// The triangle with `p_L` across and `p_H` up, its threshold line dashed.
pub fn triangle_svg(map: &TriangleMap) -> String {
    let frame = Frame { size: 420.0, pad: 30.0, x_range: (0.0, 1.0), y_range: (0.0, 1.0) };
    let corners = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0), Point::new(0.0, 0.0)];
    let mut bg = frame.polyline(&corners, "stroke=\"black\" stroke-width=\"1\"");
    if let Some(line) = map.threshold {
        let (a, b) = match line {
            ThresholdLine::Vertical { value } => (Point::new(value, 0.0), Point::new(value, 1.0 - value)),
            ThresholdLine::Horizontal { value } => (Point::new(0.0, value), Point::new(1.0 - value, value)),
        };
        bg += &frame.polyline(&[a, b], "stroke=\"gray\" stroke-dasharray=\"4 3\"");
    }
    let title = format!("H={} M={} L={} case {:?}", map.spec.high, map.spec.mid, map.spec.low, map.case);
    svg_curves(&frame, &title, &bg, &map.curves.iter().collect::<Vec<_>>())
}

/// A curve in its own bounding box, for two-prize plots.
pub fn curve_svg(title: &str, curve: &Polyline) -> String {
    let pts: Vec<&Point> = curve.points().chain(&curve.breaks).collect();
    let bounds = |f: fn(&Point) -> f64| {
        let lo = pts.iter().map(|p| f(p)).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| f(p)).fold(f64::NEG_INFINITY, f64::max);
        if lo.is_finite() && hi > lo { (lo, hi) } else { (0.0, 1.0) }
    };
    let frame = Frame { size: 420.0, pad: 30.0, x_range: bounds(|p| p.x), y_range: bounds(|p| p.y) };
    svg_curves(&frame, title, "", &[curve])
}
