//! SVG output.

use std::collections::HashMap;
use std::fmt::Write;

use super::layout::LaidOutDiagram;
use super::NodeKind;
use crate::syntax::Signature;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Rect,
    Triangle,
    Circle,
}

impl Shape {
    fn parse(s: &str) -> Option<Shape> {
        match s {
            "rect" | "box" | "rectangle" => Some(Shape::Rect),
            "triangle" => Some(Shape::Triangle),
            "circle" => Some(Shape::Circle),
            _ => None,
        }
    }
}

/// How to draw each generator.
#[derive(Clone, Debug, Default)]
pub struct StyleSheet {
    pub shapes: HashMap<String, Shape>,
    pub fills: HashMap<String, String>,
}

impl StyleSheet {
    /// Shapes follow the type (A⊗A→A is a triangle, A⊗B→B⊗A a circle)
    /// unless a style tag says otherwise.
    pub fn from_signature(sig: &Signature) -> StyleSheet {
        let mut s = StyleSheet::default();
        for g in &sig.generators {
            let (a, b) = (g.source.arity(), g.target.arity());
            let mut shape = match (a.0.as_slice(), b.0.as_slice()) {
                ([x, y], [z]) if x == y && y == z => Shape::Triangle,
                ([x, y], [z, w]) if x == w && y == z && x != y => Shape::Circle,
                _ => Shape::Rect,
            };
            if let Some(tag) = g.style.shape.as_deref().and_then(Shape::parse) {
                shape = tag;
            }
            s.shapes.insert(g.name.clone(), shape);
            if let Some(c) = &g.style.color {
                s.fills.insert(g.name.clone(), c.clone());
            }
        }
        s
    }
}

/// A stable colour per object name.
pub fn wire_color(label: &str) -> String {
    let mut h: u32 = 0x811c_9dc5;
    for b in label.bytes() {
        h ^= u32::from(b);
        h = h.wrapping_mul(0x0100_0193);
    }
    format!("hsl({}, 65%, 42%)", h % 360)
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn body(out: &mut String, l: &LaidOutDiagram, styles: &StyleSheet) {
    for (i, route) in l.routes.iter().enumerate() {
        let label = l.diagram.source_label(l.diagram.edges[i].from).unwrap_or("");
        let pts: Vec<String> = route.iter().map(|p| format!("{:.2},{:.2}", p.x, p.y)).collect();
        let _ = writeln!(
            out,
            r#"<polyline class="wire" data-edge="{i}" points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            pts.join(" "),
            wire_color(label)
        );
    }
    for (i, node) in l.diagram.nodes.iter().enumerate() {
        let b = &l.nodes[i];
        let (cx, cy) = (b.center.x, b.center.y);
        let (x0, y0) = (cx - b.w / 2.0, cy - b.h / 2.0);
        match &node.kind {
            NodeKind::Generator { name } => {
                let fill = styles.fills.get(name).map_or("#f4f4f4", String::as_str);
                let shape = styles.shapes.get(name).copied().unwrap_or(Shape::Rect);
                let attrs = format!(r#"class="node" data-node="{i}" fill="{}" stroke="black""#, esc(fill));
                let _ = match shape {
                    Shape::Rect => writeln!(
                        out,
                        r#"<rect {attrs} x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" rx="4"/>"#,
                        b.w, b.h
                    ),
                    Shape::Circle => writeln!(
                        out,
                        r#"<ellipse {attrs} cx="{cx:.2}" cy="{cy:.2}" rx="{:.2}" ry="{:.2}"/>"#,
                        b.w / 2.0,
                        b.h / 2.0
                    ),
                    Shape::Triangle => writeln!(
                        out,
                        r#"<polygon {attrs} points="{x0:.2},{y0:.2} {:.2},{y0:.2} {cx:.2},{:.2}"/>"#,
                        x0 + b.w,
                        y0 + b.h
                    ),
                };
                let _ = writeln!(
                    out,
                    r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
                    cy + 4.0,
                    esc(name)
                );
            }
            NodeKind::Boxed { outline, .. } => {
                match outline {
                    Some(p) => {
                        let pts: Vec<String> =
                            p.translate(cx, cy).points.iter().map(|q| format!("{:.2},{:.2}", q.x, q.y)).collect();
                        let _ = writeln!(
                            out,
                            r#"<polygon class="box" data-node="{i}" points="{}" fill="none" stroke="black" stroke-dasharray="6 3"/>"#,
                            pts.join(" ")
                        );
                    }
                    None => {
                        let _ = writeln!(
                            out,
                            r#"<rect class="box" data-node="{i}" x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black" stroke-dasharray="6 3"/>"#,
                            b.w, b.h
                        );
                    }
                }
                if let Some(child) = &l.children[i] {
                    let _ = writeln!(
                        out,
                        r#"<g transform="translate({:.2},{:.2})">"#,
                        cx - child.width / 2.0,
                        cy - child.height / 2.0
                    );
                    body(out, child, styles);
                    out.push_str("</g>\n");
                }
            }
        }
    }
}

pub fn render_svg(l: &LaidOutDiagram, styles: &StyleSheet) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.2} {h:.2}">"#,
        w = l.width,
        h = l.height
    );
    body(&mut out, l, styles);
    for (a, p) in l.diagram.inputs.iter().zip(&l.inputs) {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">{}</text>"#,
            p.x + 4.0,
            p.y,
            esc(a)
        );
    }
    for (a, p) in l.diagram.outputs.iter().zip(&l.outputs) {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">{}</text>"#,
            p.x + 4.0,
            p.y + 10.0,
            esc(a)
        );
    }
    out.push_str("</svg>\n");
    out
}
