//! Seeded, reproducible sampling of labeled object sets with rejection rules
//! that guarantee unambiguous ground truth for every downstream question.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    self, euclidean_distance, near_sector_boundary, Point, SectorConfig, CANVAS_SIZE,
    REGION_LOWER, REGION_UPPER,
};
use crate::seed::derive_seed;

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("generation exhausted after {attempts} attempts at index {index}; config is over-tight")]
    GenerationExhausted { index: u64, attempts: u32 },
    #[error("invalid generation config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneObject {
    pub label: char,
    pub point: Point,
}

/// A sampled object set with unique single-letter labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub scene_id: String,
    pub seed: u64,
    pub objects: Vec<SceneObject>,
    pub canvas: (u32, u32),
}

impl Scene {
    pub fn labels(&self) -> Vec<char> {
        self.objects.iter().map(|o| o.label).collect()
    }

    pub fn point_of(&self, label: char) -> Option<Point> {
        self.objects.iter().find(|o| o.label == label).map(|o| o.point)
    }

    /// Resolves label pairs to point pairs and ranks them by distance.
    pub fn rank_pairs(
        &self,
        pairs: &[(char, char)],
    ) -> Result<geometry::PairRanking, geometry::GeometryError> {
        let resolved: Vec<(Point, Point)> = pairs
            .iter()
            .map(|&(a, b)| (self.point_of(a).unwrap(), self.point_of(b).unwrap()))
            .collect();
        geometry::rank_pairs_by_distance(&resolved)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n_objects: RangeInclusive<usize>,
    /// Minimum pairwise object distance in canvas units.
    pub min_separation: f64,
    /// Objects may not sit closer than this to a region boundary.
    pub region_margin: f64,
    /// All pairwise distances must differ by at least this much, so
    /// distance-comparison questions never tie.
    pub min_distance_gap: f64,
    pub sector: SectorConfig,
    /// Rejection attempts per scene before giving up.
    pub max_attempts: u32,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n_objects: 4..=6,
            min_separation: 80.0,
            region_margin: 5.0,
            min_distance_gap: 1.0,
            sector: SectorConfig::default(),
            max_attempts: 1000,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.n_objects.is_empty() {
            return Err(GenError::InvalidConfig("empty object-count range".into()));
        }
        if *self.n_objects.end() > 26 {
            return Err(GenError::InvalidConfig("more objects than letters".into()));
        }
        if self.min_separation <= 0.0 {
            return Err(GenError::InvalidConfig("min_separation must be positive".into()));
        }
        if !self.sector.validate() {
            return Err(GenError::InvalidConfig("bad sector config".into()));
        }
        Ok(())
    }
}

/// Samples one candidate point respecting the region-boundary margin.
fn sample_point(rng: &mut ChaCha8Rng, margin: f64) -> Point {
    loop {
        let x = rng.gen_range(0..=CANVAS_SIZE);
        let y = rng.gen_range(0..=CANVAS_SIZE);
        let near = |v: i32| {
            let v = v as f64;
            (v - REGION_LOWER * CANVAS_SIZE as f64).abs() < margin
                || (v - REGION_UPPER * CANVAS_SIZE as f64).abs() < margin
        };
        if !near(x) && !near(y) {
            return Point::new(x, y);
        }
    }
}

/// All-pairs validity check for a candidate point set.
pub(crate) fn points_admissible(points: &[Point], cfg: &GenConfig) -> bool {
    let mut dists = Vec::new();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d = euclidean_distance(points[i], points[j]);
            if d < cfg.min_separation {
                return false;
            }
            if near_sector_boundary(points[i], points[j], &cfg.sector) {
                return false;
            }
            dists.push(d);
        }
    }
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for w in dists.windows(2) {
        if w[1] - w[0] < cfg.min_distance_gap {
            return false;
        }
    }
    true
}

/// Deterministically samples the scene at `index`. Whole-scene rejection on
/// any invariant violation.
pub fn sample_scene(master_seed: u64, index: u64, cfg: &GenConfig) -> Result<Scene, GenError> {
    cfg.validate()?;
    let scene_seed = derive_seed(master_seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(scene_seed);
    for _attempt in 0..cfg.max_attempts {
        let n = rng.gen_range(cfg.n_objects.clone());
        let points: Vec<Point> = (0..n).map(|_| sample_point(&mut rng, cfg.region_margin)).collect();
        if !points_admissible(&points, cfg) {
            continue;
        }
        let objects = points
            .into_iter()
            .enumerate()
            .map(|(i, point)| SceneObject {
                label: (b'A' + i as u8) as char,
                point,
            })
            .collect();
        return Ok(Scene {
            scene_id: format!("scene-{master_seed:016x}-{index:06}"),
            seed: scene_seed,
            objects,
            canvas: (CANVAS_SIZE as u32, CANVAS_SIZE as u32),
        });
    }
    Err(GenError::GenerationExhausted {
        index,
        attempts: cfg.max_attempts,
    })
}

/// Samples `count` scenes; equal to mapping [`sample_scene`] over `0..count`
/// regardless of execution order.
pub fn sample_batch(master_seed: u64, count: u64, cfg: &GenConfig) -> Result<Vec<Scene>, GenError> {
    (0..count).map(|i| sample_scene(master_seed, i, cfg)).collect()
}
