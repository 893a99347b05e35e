//! Minimal SVG writer for polygons, hull outlines and contact markers.

use std::fmt::Write;

use dragon_core::Point;

pub struct Layer {
    pub class: &'static str,
    pub kind: LayerKind,
}

pub enum LayerKind {
    Polyline { points: Vec<Point>, stroke: &'static str },
    ClosedPath { points: Vec<Point>, stroke: &'static str, fill: &'static str },
    Markers { points: Vec<Point>, fill: &'static str },
}

impl Layer {
    fn points(&self) -> &[Point] {
        match &self.kind {
            LayerKind::Polyline { points, .. }
            | LayerKind::ClosedPath { points, .. }
            | LayerKind::Markers { points, .. } => points,
        }
    }
}

fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" || s.is_empty() {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Renders layers in order. Math coordinates are kept in the document; a
/// `scale(1,-1)` group flips them so that y points up.
pub fn render(layers: &[Layer], title: &str) -> String {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in layers.iter().flat_map(|l| l.points()) {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    if !lo.x.is_finite() {
        lo = Point::new(0.0, 0.0);
        hi = Point::new(1.0, 1.0);
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
    let pad = 0.03 * span;
    let stroke_w = span / 800.0;
    let marker_r = span / 250.0;
    // After the flip, y runs over [-hi.y, -lo.y].
    let (vx, vy) = (lo.x - pad, -hi.y - pad);
    let (vw, vh) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);
    let width = 800.0;
    let height = (width * vh / vw).round().max(1.0);

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="{} {} {} {}">"#,
        num(vx),
        num(vy),
        num(vw),
        num(vh)
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, r#"<g transform="scale(1,-1)">"#);
    for layer in layers {
        match &layer.kind {
            LayerKind::Polyline { points, stroke } => {
                let pts: Vec<String> = points.iter().map(|p| format!("{},{}", num(p.x), num(p.y))).collect();
                let _ = writeln!(
                    out,
                    r#"<polyline class="{}" fill="none" stroke="{stroke}" stroke-width="{}" stroke-linejoin="round" points="{}"/>"#,
                    layer.class,
                    num(stroke_w),
                    pts.join(" ")
                );
            }
            LayerKind::ClosedPath { points, stroke, fill } => {
                let mut d = String::new();
                for (i, p) in points.iter().enumerate() {
                    let _ = write!(d, "{}{} {} ", if i == 0 { "M" } else { "L" }, num(p.x), num(p.y));
                }
                d.push('Z');
                let _ = writeln!(
                    out,
                    r#"<path class="{}" fill="{fill}" fill-opacity="0.25" stroke="{stroke}" stroke-width="{}" d="{d}"/>"#,
                    layer.class,
                    num(stroke_w)
                );
            }
            LayerKind::Markers { points, fill } => {
                for p in points {
                    let _ = writeln!(
                        out,
                        r#"<circle class="{}" cx="{}" cy="{}" r="{}" fill="{fill}"/>"#,
                        layer.class,
                        num(p.x),
                        num(p.y),
                        num(marker_r)
                    );
                }
            }
        }
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
