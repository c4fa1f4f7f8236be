//! Deterministic toolkit for 2D spatial-reasoning instruction datasets:
//! seeded scene generation, diagram rendering, instruction and MCQ building,
//! exact composite-task solving (grid shortest path, small-n TSP), free-text
//! answer extraction, and accuracy scoring.

pub mod agents;
pub mod composite;
pub mod dataset;
pub mod eval;
pub mod geometry;
pub mod instruct;
pub mod oracles;
pub mod parse;
pub mod render;
pub mod scene;
pub mod seed;

pub use geometry::{DirectionLabel, Point, RegionLabel, SectorConfig};
pub use scene::{GenConfig, Scene};
