//! Deterministic rendering of scenes, SPP grids, and TSP point sets.
//!
//! Vector-first: the SVG string is the source of record; the PNG raster is
//! produced by an in-crate rasterizer with no anti-aliasing so that both
//! outputs are byte-identical across runs and platforms.

mod font;
mod raster;
mod svg;

use serde::{Deserialize, Serialize};

use crate::composite::{SppInstance, TspInstance};
use crate::geometry::CANVAS_SIZE;
use crate::scene::Scene;

/// Fixed marker palette (RGB). Distinct for up to eight objects, cycling after.
pub const PALETTE: [[u8; 3]; 8] = [
    [204, 51, 51],
    [51, 102, 204],
    [34, 153, 84],
    [204, 136, 0],
    [136, 51, 187],
    [0, 153, 153],
    [170, 51, 106],
    [102, 102, 34],
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramSpec {
    pub width: u32,
    pub height: u32,
    /// Canvas-edge margin in pixels.
    pub margin: u32,
    pub marker_radius: u32,
    /// Integer scale factor applied to the built-in 5x7 font.
    pub font_scale: u32,
}

impl Default for DiagramSpec {
    fn default() -> Self {
        DiagramSpec {
            width: 512,
            height: 512,
            margin: 40,
            marker_radius: 10,
            font_scale: 2,
        }
    }
}

impl DiagramSpec {
    /// Maps y-up canvas coordinates to pixel coordinates (y flipped).
    pub fn to_pixel(&self, x: f64, y: f64) -> (f64, f64) {
        let sx = (self.width - 2 * self.margin) as f64 / CANVAS_SIZE as f64;
        let sy = (self.height - 2 * self.margin) as f64 / CANVAS_SIZE as f64;
        (
            self.margin as f64 + x * sx,
            self.height as f64 - (self.margin as f64 + y * sy),
        )
    }

    /// Inverse of [`Self::to_pixel`].
    pub fn to_canvas(&self, px: f64, py: f64) -> (f64, f64) {
        let sx = (self.width - 2 * self.margin) as f64 / CANVAS_SIZE as f64;
        let sy = (self.height - 2 * self.margin) as f64 / CANVAS_SIZE as f64;
        (
            (px - self.margin as f64) / sx,
            (self.height as f64 - py - self.margin as f64) / sy,
        )
    }
}

/// A rendered diagram: SVG source plus encoded PNG bytes.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageDocument {
    pub svg: String,
    pub png: Vec<u8>,
}

pub fn render_scene(scene: &Scene, spec: &DiagramSpec) -> ImageDocument {
    ImageDocument {
        svg: svg::scene_svg(scene, spec),
        png: raster::encode_png(&raster::scene_raster(scene, spec)),
    }
}

pub fn render_spp(instance: &SppInstance, spec: &DiagramSpec) -> ImageDocument {
    ImageDocument {
        svg: svg::spp_svg(instance, spec),
        png: raster::encode_png(&raster::spp_raster(instance, spec)),
    }
}

pub fn render_tsp(instance: &TspInstance, spec: &DiagramSpec) -> ImageDocument {
    ImageDocument {
        svg: svg::tsp_svg(instance, spec),
        png: raster::encode_png(&raster::tsp_raster(instance, spec)),
    }
}
