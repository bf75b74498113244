//! SVG output for substitution patches and plane tilings.

use std::fmt::Write;

/// Axis-parallel box in drawing units, `y` pointing up.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Box2 {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

pub struct Cell {
    pub rect: Box2,
    pub label: String,
    pub color: usize,
}

/// Outlines of one hierarchy level.
pub struct Outline {
    pub level: usize,
    pub boxes: Vec<Box2>,
}

const PALETTE: [&str; 8] = [
    "#e8c547", "#5c80bc", "#cdd1c4", "#d1495b", "#66a182", "#edae49", "#30638e", "#8e7dbe",
];

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Draws cells over `frame`, then each outline level with strokes getting
/// heavier with the level.
pub fn render(title: &str, frame: Box2, scale: f64, cells: &[Cell], outlines: &[Outline]) -> String {
    let (w, h) = (frame.w * scale, frame.h * scale);
    let tx = |x: f64| (x - frame.x) * scale;
    let ty = |y: f64| (frame.y + frame.h - y) * scale;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.3}" height="{h:.3}" viewBox="0 0 {w:.3} {h:.3}">"#
    )
    .unwrap();
    writeln!(out, "<title>{}</title>", escape(title)).unwrap();
    writeln!(out, r##"<g stroke="#444444" stroke-width="0.5">"##).unwrap();
    for c in cells {
        let r = c.rect;
        writeln!(
            out,
            r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"><title>{}</title></rect>"#,
            tx(r.x),
            ty(r.y + r.h),
            r.w * scale,
            r.h * scale,
            PALETTE[c.color % PALETTE.len()],
            escape(&c.label)
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();
    for o in outlines {
        writeln!(
            out,
            r##"<g fill="none" stroke="#000000" stroke-width="{:.1}" data-level="{}">"##,
            1.0 + o.level as f64,
            o.level
        )
        .unwrap();
        for r in &o.boxes {
            writeln!(
                out,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}"/>"#,
                tx(r.x),
                ty(r.y + r.h),
                r.w * scale,
                r.h * scale
            )
            .unwrap();
        }
        writeln!(out, "</g>").unwrap();
    }
    out.push_str("</svg>\n");
    out
}
