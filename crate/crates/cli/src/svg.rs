use std::fmt::Write;

use num_complex::Complex64;
use qprod_core::potential::Boundary;
use qprod_core::regint::Wedge;
use qprod_core::spectrum::{Kind, SpectralPoint};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 48.0;

struct Frame {
    re: (f64, f64),
    im: (f64, f64),
}

impl Frame {
    fn x(&self, re: f64) -> f64 {
        MARGIN + (re - self.re.0) / (self.re.1 - self.re.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, im: f64) -> f64 {
        HEIGHT - MARGIN - (im - self.im.0) / (self.im.1 - self.im.0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn class_of(p: &SpectralPoint) -> &'static str {
    match (p.kind, p.family.bc) {
        (Kind::Bound, _) => "bound",
        (Kind::AntiBound, _) => "anti-bound",
        (Kind::Resonance, Boundary::In) => "resonance",
        (Kind::AntiResonance, Boundary::In) => "anti-resonance",
        (Kind::Resonance, Boundary::Out) => "incoming-resonance",
        (Kind::AntiResonance, Boundary::Out) => "incoming-anti-resonance",
    }
}

fn glyph(out: &mut String, class: &str, x: f64, y: f64, title: &str) {
    let r = 4.5;
    let shape = match class {
        "bound" => format!(r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="black"/>"#),
        "anti-bound" => format!(r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="white" stroke="black"/>"#),
        "resonance" => format!(
            r#"<rect x="{:.2}" y="{:.2}" width="{w}" height="{w}" fill="black"/>"#,
            x - r,
            y - r,
            w = 2.0 * r
        ),
        "anti-resonance" => format!(
            r#"<rect x="{:.2}" y="{:.2}" width="{w}" height="{w}" fill="white" stroke="black"/>"#,
            x - r,
            y - r,
            w = 2.0 * r
        ),
        "incoming-resonance" => {
            format!(r#"<path d="M{x:.2},{:.2}L{:.2},{y:.2}L{x:.2},{:.2}L{:.2},{y:.2}Z" fill="gray"/>"#, y - r, x + r, y + r, x - r)
        }
        _ => format!(
            r#"<path d="M{x:.2},{:.2}L{:.2},{y:.2}L{x:.2},{:.2}L{:.2},{y:.2}Z" fill="white" stroke="gray"/>"#,
            y - r,
            x + r,
            y + r,
            x - r
        ),
    };
    let _ = writeln!(out, r#"<g class="{class}"><title>{title}</title>{shape}</g>"#);
}

/// Momentum-plane scatter over `re × im`. With a wedge, points falling
/// inside it get the extra class `divergent`.
pub fn figure(points: &[SpectralPoint], re: (f64, f64), im: (f64, f64), wedge: Option<(Wedge, String)>) -> String {
    let f = Frame { re, im };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let (x0, x1, y0, y1) = (f.x(re.0), f.x(re.1), f.y(im.1), f.y(im.0));
    let _ = writeln!(
        s,
        r#"<defs><clipPath id="plot"><rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}"/></clipPath></defs>"#,
        x1 - x0,
        y1 - y0
    );
    let _ = writeln!(s, r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#, x1 - x0, y1 - y0);

    if let Some((w, label)) = &wedge {
        let (ax, ay) = (f.x(w.apex.re), f.y(w.apex.im));
        let reach = 4.0 * (re.1 - re.0 + im.1 - im.0);
        let left = w.apex + Complex64::new(-reach, -reach);
        let right = w.apex + Complex64::new(reach, -reach);
        let _ = writeln!(
            s,
            r##"<g class="wedge" clip-path="url(#plot)"><title>divergence wedge of {label}</title><path d="M{ax:.2},{ay:.2}L{:.2},{:.2}L{:.2},{:.2}Z" fill="#f4c7c3" fill-opacity="0.6" stroke="#c0392b" stroke-dasharray="4 3"/></g>"##,
            f.x(left.re),
            f.y(left.im),
            f.x(right.re),
            f.y(right.im)
        );
    }

    if re.0 < 0.0 && re.1 > 0.0 {
        let _ = writeln!(s, r#"<line class="axis" x1="{:.2}" y1="{y0:.2}" x2="{:.2}" y2="{y1:.2}" stroke="black" stroke-width="0.8"/>"#, f.x(0.0), f.x(0.0));
    }
    if im.0 < 0.0 && im.1 > 0.0 {
        let _ = writeln!(s, r#"<line class="axis" x1="{x0:.2}" y1="{:.2}" x2="{x1:.2}" y2="{:.2}" stroke="black" stroke-width="0.8"/>"#, f.y(0.0), f.y(0.0));
    }
    for t in ticks(re) {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#, f.x(t), y1 + 16.0);
    }
    for t in ticks(im) {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{t}</text>"#, x0 - 6.0, f.y(t) + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Re z</text>"#, 0.5 * (x0 + x1), HEIGHT - 8.0);
    let _ = writeln!(s, r#"<text x="12" y="{:.2}" transform="rotate(-90 12 {:.2})" text-anchor="middle">Im z</text>"#, 0.5 * (y0 + y1), 0.5 * (y0 + y1));

    for p in points {
        let mut class = class_of(p).to_string();
        if let Some((w, _)) = &wedge {
            if w.test(p.z) {
                class.push_str(" divergent");
            }
        }
        glyph(&mut s, &class, f.x(p.z.re), f.y(p.z.im), &format!("{} {} z={}", p.kind, p.family, p.z));
    }
    s.push_str("</svg>\n");
    s
}

fn ticks((lo, hi): (f64, f64)) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * span {
        out.push(if t.abs() < 1e-12 * span { 0.0 } else { t });
        t += step;
    }
    out
}
