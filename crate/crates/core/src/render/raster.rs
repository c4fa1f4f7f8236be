//! In-crate rasterizer. No anti-aliasing: a pixel is painted iff its center
//! passes the primitive's coverage test, which keeps PNG output bit-exact.

use image::codecs::png::{CompressionType, FilterType, PngEncoder};
use image::{ExtendedColorType, ImageEncoder, Rgb, RgbImage};

use super::font::{glyph, GLYPH_HEIGHT, GLYPH_WIDTH};
use super::{DiagramSpec, PALETTE};
use crate::composite::{Cell, SppInstance, TspInstance};
use crate::scene::Scene;

const BLACK: Rgb<u8> = Rgb([0, 0, 0]);
const WHITE: Rgb<u8> = Rgb([255, 255, 255]);

fn blank(spec: &DiagramSpec) -> RgbImage {
    RgbImage::from_pixel(spec.width, spec.height, WHITE)
}

fn fill_disk(img: &mut RgbImage, cx: f64, cy: f64, r: f64, color: Rgb<u8>) {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let x0 = ((cx - r).floor() as i64).max(0);
    let x1 = ((cx + r).ceil() as i64).min(w - 1);
    let y0 = ((cy - r).floor() as i64).max(0);
    let y1 = ((cy + r).ceil() as i64).min(h - 1);
    for py in y0..=y1 {
        for px in x0..=x1 {
            let dx = px as f64 + 0.5 - cx;
            let dy = py as f64 + 0.5 - cy;
            if dx * dx + dy * dy <= r * r {
                img.put_pixel(px as u32, py as u32, color);
            }
        }
    }
}

fn stroke_ring(img: &mut RgbImage, cx: f64, cy: f64, r: f64, width: f64, color: Rgb<u8>) {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let outer = r + width / 2.0;
    let inner = r - width / 2.0;
    let x0 = ((cx - outer).floor() as i64).max(0);
    let x1 = ((cx + outer).ceil() as i64).min(w - 1);
    let y0 = ((cy - outer).floor() as i64).max(0);
    let y1 = ((cy + outer).ceil() as i64).min(h - 1);
    for py in y0..=y1 {
        for px in x0..=x1 {
            let dx = px as f64 + 0.5 - cx;
            let dy = py as f64 + 0.5 - cy;
            let d2 = dx * dx + dy * dy;
            if d2 <= outer * outer && d2 >= inner * inner {
                img.put_pixel(px as u32, py as u32, color);
            }
        }
    }
}

fn fill_rect(img: &mut RgbImage, x: f64, y: f64, w: f64, h: f64, color: Rgb<u8>) {
    let x0 = (x.round() as i64).max(0);
    let y0 = (y.round() as i64).max(0);
    let x1 = ((x + w).round() as i64).min(img.width() as i64);
    let y1 = ((y + h).round() as i64).min(img.height() as i64);
    for py in y0..y1 {
        for px in x0..x1 {
            img.put_pixel(px as u32, py as u32, color);
        }
    }
}

fn draw_text(img: &mut RgbImage, x: f64, y: f64, scale: u32, text: &str, color: Rgb<u8>) {
    let mut cursor = x.round() as i64;
    let top = y.round() as i64;
    for c in text.chars() {
        if let Some(rows) = glyph(c) {
            for (ry, row) in rows.iter().enumerate() {
                for rx in 0..GLYPH_WIDTH {
                    if row >> (GLYPH_WIDTH - 1 - rx) & 1 == 1 {
                        fill_rect(
                            img,
                            (cursor + (rx * scale) as i64) as f64,
                            (top + (ry as u32 * scale) as i64) as f64,
                            scale as f64,
                            scale as f64,
                            color,
                        );
                    }
                }
            }
        }
        cursor += ((GLYPH_WIDTH + 1) * scale) as i64;
    }
}

pub fn scene_raster(scene: &Scene, spec: &DiagramSpec) -> RgbImage {
    let mut img = blank(spec);
    // labels first, disks last: a label may be clipped by a nearby marker,
    // but a marker disk is never occluded (centroid round-trips exactly)
    for obj in &scene.objects {
        let (px, py) = spec.to_pixel(obj.point.x as f64, obj.point.y as f64);
        draw_text(
            &mut img,
            px + spec.marker_radius as f64 + 4.0,
            py - spec.marker_radius as f64 - 4.0 - (GLYPH_HEIGHT * spec.font_scale) as f64,
            spec.font_scale,
            &obj.label.to_string(),
            BLACK,
        );
    }
    for (i, obj) in scene.objects.iter().enumerate() {
        let (px, py) = spec.to_pixel(obj.point.x as f64, obj.point.y as f64);
        fill_disk(&mut img, px, py, spec.marker_radius as f64, Rgb(PALETTE[i % PALETTE.len()]));
    }
    img
}

pub fn spp_raster(instance: &SppInstance, spec: &DiagramSpec) -> RgbImage {
    let mut img = blank(spec);
    let n = instance.grid_n as f64;
    let m = spec.margin as f64;
    let side = spec.width.min(spec.height) as f64 - 2.0 * m;
    let cell = side / n;
    for i in 0..=instance.grid_n {
        let t = (m + i as f64 * cell).round();
        fill_rect(&mut img, t, m, 1.0, side + 1.0, BLACK);
        fill_rect(&mut img, m, t, side + 1.0, 1.0, BLACK);
    }
    let center =
        |c: Cell| (m + (c.col as f64 + 0.5) * cell, m + (c.row as f64 + 0.5) * cell);
    for &obs in &instance.obstacles {
        let (cx, cy) = center(obs);
        fill_rect(
            &mut img,
            cx - cell / 2.0 + 1.0,
            cy - cell / 2.0 + 1.0,
            cell - 2.0,
            cell - 2.0,
            Rgb([68, 68, 68]),
        );
    }
    let half = cell * 0.3;
    let (sx, sy) = center(instance.start);
    fill_rect(&mut img, sx - half, sy - half, 2.0 * half, 2.0 * half, Rgb(PALETTE[2]));
    let (ex, ey) = center(instance.end);
    stroke_ring(&mut img, ex, ey, half, 4.0, Rgb(PALETTE[0]));
    draw_text(
        &mut img,
        m,
        m + side + 12.0,
        spec.font_scale,
        "GREEN SQUARE = START  RED RING = END",
        BLACK,
    );
    img
}

pub fn tsp_raster(instance: &TspInstance, spec: &DiagramSpec) -> RgbImage {
    let mut img = blank(spec);
    for &(label, p) in &instance.objects {
        let (px, py) = spec.to_pixel(p.x as f64, p.y as f64);
        if label == instance.start_label {
            stroke_ring(&mut img, px, py, spec.marker_radius as f64 + 5.0, 2.0, BLACK);
        }
        draw_text(
            &mut img,
            px + spec.marker_radius as f64 + 7.0,
            py - spec.marker_radius as f64 - 7.0 - (GLYPH_HEIGHT * spec.font_scale) as f64,
            spec.font_scale,
            &label.to_string(),
            BLACK,
        );
    }
    for (i, &(_, p)) in instance.objects.iter().enumerate() {
        let (px, py) = spec.to_pixel(p.x as f64, p.y as f64);
        fill_disk(&mut img, px, py, spec.marker_radius as f64, Rgb(PALETTE[i % PALETTE.len()]));
    }
    draw_text(
        &mut img,
        spec.margin as f64,
        (spec.height - spec.margin / 2) as f64,
        spec.font_scale,
        "RINGED OBJECT = START",
        BLACK,
    );
    img
}

/// Encodes with fixed compression and filter settings so bytes never vary.
pub fn encode_png(img: &RgbImage) -> Vec<u8> {
    let mut out = Vec::new();
    let enc = PngEncoder::new_with_quality(&mut out, CompressionType::Default, FilterType::NoFilter);
    enc.write_image(img.as_raw(), img.width(), img.height(), ExtendedColorType::Rgb8)
        .expect("in-memory PNG encoding cannot fail");
    out
}
