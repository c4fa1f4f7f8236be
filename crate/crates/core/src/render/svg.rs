//! SVG generation (vector source of record). All numbers are written with
//! fixed two-decimal formatting so output is reproducible byte for byte.

use std::fmt::Write;

use super::{DiagramSpec, PALETTE};
use crate::composite::{SppInstance, TspInstance};
use crate::scene::Scene;

fn rgb(c: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn header(spec: &DiagramSpec) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
<rect width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>\n",
        w = spec.width,
        h = spec.height
    )
}

fn marker(out: &mut String, spec: &DiagramSpec, x: f64, y: f64, color: [u8; 3], label: char) {
    let (px, py) = spec.to_pixel(x, y);
    let r = spec.marker_radius;
    writeln!(
        out,
        "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"{r}\" fill=\"{}\"/>",
        rgb(color)
    )
    .unwrap();
    writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"{}\" fill=\"#000000\">{label}</text>",
        px + r as f64 + 4.0,
        py - r as f64 - 4.0,
        7 * spec.font_scale
    )
    .unwrap();
}

pub fn scene_svg(scene: &Scene, spec: &DiagramSpec) -> String {
    let mut out = header(spec);
    for (i, obj) in scene.objects.iter().enumerate() {
        marker(
            &mut out,
            spec,
            obj.point.x as f64,
            obj.point.y as f64,
            PALETTE[i % PALETTE.len()],
            obj.label,
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn spp_svg(instance: &SppInstance, spec: &DiagramSpec) -> String {
    let n = instance.grid_n as f64;
    let m = spec.margin as f64;
    let side = (spec.width.min(spec.height) as f64 - 2.0 * m).min(spec.width as f64 - 2.0 * m);
    let cell = side / n;
    let mut out = header(spec);
    for i in 0..=instance.grid_n {
        let t = m + i as f64 * cell;
        writeln!(
            out,
            "<line x1=\"{t:.2}\" y1=\"{m:.2}\" x2=\"{t:.2}\" y2=\"{:.2}\" stroke=\"#000000\" stroke-width=\"1\"/>",
            m + side
        )
        .unwrap();
        writeln!(
            out,
            "<line x1=\"{m:.2}\" y1=\"{t:.2}\" x2=\"{:.2}\" y2=\"{t:.2}\" stroke=\"#000000\" stroke-width=\"1\"/>",
            m + side
        )
        .unwrap();
    }
    let center = |c: crate::composite::Cell| {
        (m + (c.col as f64 + 0.5) * cell, m + (c.row as f64 + 0.5) * cell)
    };
    for &obs in &instance.obstacles {
        let (cx, cy) = center(obs);
        writeln!(
            out,
            "<rect class=\"obstacle\" x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#444444\"/>",
            cx - cell / 2.0,
            cy - cell / 2.0,
            cell,
            cell
        )
        .unwrap();
    }
    let (sx, sy) = center(instance.start);
    let half = cell * 0.3;
    writeln!(
        out,
        "<rect class=\"start\" x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
        sx - half,
        sy - half,
        2.0 * half,
        2.0 * half,
        rgb(PALETTE[2])
    )
    .unwrap();
    let (ex, ey) = center(instance.end);
    writeln!(
        out,
        "<circle class=\"end\" cx=\"{ex:.2}\" cy=\"{ey:.2}\" r=\"{:.2}\" fill=\"none\" stroke=\"{}\" stroke-width=\"4\"/>",
        half,
        rgb(PALETTE[0])
    )
    .unwrap();
    writeln!(
        out,
        "<text x=\"{m:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"{}\" fill=\"#000000\">GREEN SQUARE = START  RED RING = END</text>",
        m + side + 24.0,
        7 * spec.font_scale
    )
    .unwrap();
    out.push_str("</svg>\n");
    out
}

pub fn tsp_svg(instance: &TspInstance, spec: &DiagramSpec) -> String {
    let mut out = header(spec);
    for (i, &(label, p)) in instance.objects.iter().enumerate() {
        if label == instance.start_label {
            let (px, py) = spec.to_pixel(p.x as f64, p.y as f64);
            writeln!(
                out,
                "<circle class=\"start-ring\" cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"{}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"2\"/>",
                spec.marker_radius + 5
            )
            .unwrap();
        }
        marker(&mut out, spec, p.x as f64, p.y as f64, PALETTE[i % PALETTE.len()], label);
    }
    writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"{}\" fill=\"#000000\">RINGED OBJECT = START</text>",
        spec.margin,
        spec.height - spec.margin / 2,
        7 * spec.font_scale
    )
    .unwrap();
    out.push_str("</svg>\n");
    out
}
