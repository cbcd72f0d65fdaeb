//! Encoders. Rationals go out as `[num, den]` pairs; integers that do not
//! fit in an `i64` are written as decimal strings.

use std::fmt::Write as _;

use ascover_core::nt::Q;
use ascover_core::polygon::{Polygon, SlopeMultiset};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

pub fn int(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

pub fn rational(r: &Q) -> Value {
    json!([int(r.numer()), int(r.denom())])
}

pub fn polygon(p: &Polygon) -> Value {
    Value::Array(
        p.vertices()
            .iter()
            .map(|(x, y)| json!({"x": rational(x), "y": rational(y)}))
            .collect(),
    )
}

pub fn slopes(s: &SlopeMultiset) -> Value {
    Value::Array(
        s.iter()
            .map(|(slope, len)| json!({"slope": rational(slope), "length": rational(len)}))
            .collect(),
    )
}

/// `0:0 1:1/3 2:1`, comma-free so it sits in one CSV field.
pub fn vertex_list(p: &Polygon) -> String {
    p.vertices()
        .iter()
        .map(|(x, y)| format!("{x}:{y}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

fn to_f64(r: &Q) -> f64 {
    r.numer().to_f64().unwrap_or(0.0) / r.denom().to_f64().unwrap_or(1.0)
}

const PALETTE: &[&str] = &["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

/// Overlays labelled polygons on a reference polygon drawn dashed in black.
pub fn svg_overlay(title: &str, reference: &Polygon, series: &[(String, Polygon)]) -> String {
    let (w, h, margin) = (640.0, 480.0, 50.0);
    let all = std::iter::once(reference).chain(series.iter().map(|(_, p)| p));
    let mut xmax: f64 = 1.0;
    let mut ymax: f64 = 1.0;
    for p in all {
        let (x, y) = p.end();
        xmax = xmax.max(to_f64(x));
        ymax = ymax.max(to_f64(y));
    }
    let sx = |x: &Q| margin + to_f64(x) / xmax * (w - 2.0 * margin);
    let sy = |y: &Q| h - margin - to_f64(y) / ymax * (h - 2.0 * margin);
    let path = |p: &Polygon| {
        p.vertices()
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{margin}" y="30" font-family="sans-serif" font-size="16">{}</text>"#, escape(title));
    let zero = Q::zero();
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray"/>"#,
        sx(&zero), sy(&zero), w - margin, sy(&zero)
    );
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray"/>"#,
        sx(&zero), sy(&zero), sx(&zero), margin
    );
    for (i, (label, p)) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"><title>{}</title></polyline>"#,
            path(p),
            escape(label)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" fill="{colour}">{}</text>"#,
            w - margin + 4.0,
            margin + 14.0 * i as f64,
            escape(label)
        );
    }
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="black" stroke-width="2" stroke-dasharray="6 4"><title>HP</title></polyline>"#,
        path(reference)
    );
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
