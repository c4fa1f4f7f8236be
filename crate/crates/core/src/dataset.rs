//! Dataset serialization and statistics: line-delimited JSON manifests with
//! stable key order, atomically written files, and recomputed-label stats.
//!
//! Seed lineage (master seed plus per-item index) is stored in every record
//! so any item is regenerable in isolation.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::EvalItem;
use crate::composite::{
    gen_spp, gen_tsp, solve_spp, solve_tsp, SppInstance, SppSolution, TspInstance, TspSolution,
};
use crate::geometry::DirectionLabel;
use crate::instruct::{
    build_eval_mcq_direction, build_eval_mcq_distance, build_eval_mcq_region, build_spp_prompt,
    build_training_bundle, build_tsp_prompt, Capability, InstructionItem, McqItem,
};
use crate::render::{render_scene, render_spp, render_tsp, DiagramSpec, ImageDocument};
use crate::scene::{sample_scene, GenConfig, GenError, Scene};
use crate::seed::derive_stream;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("io failure at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed manifest line {line} in {path}: {source}")]
    Malformed {
        path: PathBuf,
        line: usize,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Composite(#[from] crate::composite::CompositeError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io { path: path.to_path_buf(), source }
}

/// One manifest line. Training items carry prompt/answer; evaluation items
/// additionally carry the exact instance and reference solution needed for
/// offline scoring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ManifestRecord {
    Training {
        item_id: String,
        scene_id: String,
        capability: Capability,
        prompt: String,
        answer: String,
        image: String,
        master_seed: u64,
        scene_index: u64,
    },
    BasicMcq {
        item_id: String,
        scene_id: String,
        capability: Capability,
        prompt: String,
        options: [String; 4],
        answer_key: char,
        answer: String,
        image: String,
        master_seed: u64,
        item_index: u64,
    },
    Spp {
        item_id: String,
        prompt: String,
        image: String,
        instance: SppInstance,
        solution: SppSolution,
        master_seed: u64,
        item_index: u64,
    },
    Tsp {
        item_id: String,
        prompt: String,
        image: String,
        instance: TspInstance,
        solution: TspSolution,
        master_seed: u64,
        item_index: u64,
    },
}

impl ManifestRecord {
    pub fn item_id(&self) -> &str {
        match self {
            ManifestRecord::Training { item_id, .. }
            | ManifestRecord::BasicMcq { item_id, .. }
            | ManifestRecord::Spp { item_id, .. }
            | ManifestRecord::Tsp { item_id, .. } => item_id,
        }
    }

    pub fn image(&self) -> &str {
        match self {
            ManifestRecord::Training { image, .. }
            | ManifestRecord::BasicMcq { image, .. }
            | ManifestRecord::Spp { image, .. }
            | ManifestRecord::Tsp { image, .. } => image,
        }
    }

    /// Evaluation records convert into harness items; training records don't.
    pub fn to_eval_item(&self) -> Option<EvalItem> {
        match self {
            ManifestRecord::Training { .. } => None,
            ManifestRecord::BasicMcq {
                item_id,
                scene_id,
                capability,
                prompt,
                options,
                answer_key,
                answer,
                image,
                ..
            } => Some(EvalItem::BasicMcq {
                item: McqItem {
                    base: InstructionItem {
                        item_id: item_id.clone(),
                        scene_id: scene_id.clone(),
                        capability: *capability,
                        prompt: prompt.clone(),
                        answer: answer.clone(),
                        image_ref: image.clone(),
                    },
                    options: options.clone(),
                    answer_key: *answer_key,
                },
            }),
            ManifestRecord::Spp { item_id, prompt, image, instance, solution, .. } => {
                Some(EvalItem::Spp {
                    item_id: item_id.clone(),
                    prompt: prompt.clone(),
                    image_ref: image.clone(),
                    instance: instance.clone(),
                    solution: solution.clone(),
                })
            }
            ManifestRecord::Tsp { item_id, prompt, image, instance, solution, .. } => {
                Some(EvalItem::Tsp {
                    item_id: item_id.clone(),
                    prompt: prompt.clone(),
                    image_ref: image.clone(),
                    instance: instance.clone(),
                    solution: solution.clone(),
                })
            }
        }
    }
}

/// A model (or agent) reply keyed by item id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub item_id: String,
    pub response: String,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DatasetError> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(io_err(&tmp))?;
    f.write_all(bytes).map_err(io_err(&tmp))?;
    f.sync_all().map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))?;
    Ok(())
}

fn jsonl<T: Serialize>(records: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, r).expect("manifest records serialize");
        out.push(b'\n');
    }
    out
}

pub fn write_manifest(records: &[ManifestRecord], path: &Path) -> Result<(), DatasetError> {
    write_atomic(path, &jsonl(records))
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRecord>, DatasetError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|source| DatasetError::Malformed {
                path: path.to_path_buf(),
                line: i + 1,
                source,
            })
        })
        .collect()
}

pub fn write_responses(records: &[ResponseRecord], path: &Path) -> Result<(), DatasetError> {
    write_atomic(path, &jsonl(records))
}

pub fn read_responses(path: &Path) -> Result<Vec<ResponseRecord>, DatasetError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|source| DatasetError::Malformed {
                path: path.to_path_buf(),
                line: i + 1,
                source,
            })
        })
        .collect()
}

/// Writes images plus `manifest.jsonl` under `out_dir`; returns the manifest
/// path. All files go through temp-and-rename.
pub fn write_dataset(
    records: &[ManifestRecord],
    images: &[(String, ImageDocument)],
    out_dir: &Path,
) -> Result<PathBuf, DatasetError> {
    let image_dir = out_dir.join("images");
    fs::create_dir_all(&image_dir).map_err(io_err(&image_dir))?;
    for (id, doc) in images {
        write_atomic(&image_dir.join(format!("{id}.svg")), doc.svg.as_bytes())?;
        write_atomic(&image_dir.join(format!("{id}.png")), &doc.png)?;
    }
    let manifest = out_dir.join("manifest.jsonl");
    write_manifest(records, &manifest)?;
    Ok(manifest)
}

// ---------------------------------------------------------------------------
// Generation drivers (shared by the CLI and the acceptance suite)
// ---------------------------------------------------------------------------

/// Training output for one run: manifest records plus per-scene renderables.
pub struct TrainingSet {
    pub records: Vec<ManifestRecord>,
    pub scenes: Vec<Scene>,
}

pub fn build_training_set(
    master_seed: u64,
    n_scenes: u64,
    cfg: &GenConfig,
) -> Result<TrainingSet, DatasetError> {
    let mut records = Vec::with_capacity(n_scenes as usize * 17);
    let mut scenes = Vec::with_capacity(n_scenes as usize);
    for index in 0..n_scenes {
        let scene = sample_scene(master_seed, index, cfg)?;
        for item in build_training_bundle(&scene, &cfg.sector) {
            records.push(ManifestRecord::Training {
                item_id: item.item_id,
                scene_id: scene.scene_id.clone(),
                capability: item.capability,
                prompt: item.prompt,
                answer: item.answer,
                image: item.image_ref,
                master_seed,
                scene_index: index,
            });
        }
        scenes.push(scene);
    }
    Ok(TrainingSet { records, scenes })
}

/// Which basic capabilities a `gen-eval --task basic` run draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasicEvalMix {
    All,
    Direction,
    Distance,
    Localization,
}

pub struct BasicEvalSet {
    pub records: Vec<ManifestRecord>,
    pub scenes: Vec<Scene>,
}

/// Builds basic-task MCQ items. Direction items cycle through the four
/// quadrant targets so the evaluation answer labels come out evenly
/// distributed; scenes lacking a pair in the target quadrant are skipped
/// deterministically.
pub fn build_basic_eval_set(
    master_seed: u64,
    count: u64,
    mix: BasicEvalMix,
    cfg: &GenConfig,
) -> Result<BasicEvalSet, DatasetError> {
    let mut records = Vec::with_capacity(count as usize);
    let mut scenes = Vec::with_capacity(count as usize);
    let mut direction_cursor = 0u64;
    for i in 0..count {
        let slot = match mix {
            BasicEvalMix::All => i % 3,
            BasicEvalMix::Direction => 0,
            BasicEvalMix::Distance => 1,
            BasicEvalMix::Localization => 2,
        };
        let sub_seed = derive_stream(master_seed, &format!("eval-basic-{i}"));
        let (scene, mcq) = match slot {
            0 => {
                let target = DirectionLabel::DIAGONALS[(direction_cursor % 4) as usize];
                direction_cursor += 1;
                let mut found = None;
                for attempt in 0..200 {
                    let scene = sample_scene(sub_seed, attempt, cfg)?;
                    if let Some(mcq) =
                        build_eval_mcq_direction(&scene, sub_seed, Some(target), &cfg.sector)
                    {
                        found = Some((scene, mcq));
                        break;
                    }
                }
                found.ok_or(GenError::GenerationExhausted { index: i, attempts: 200 })?
            }
            1 => {
                let scene = sample_scene(sub_seed, 0, cfg)?;
                let mcq = build_eval_mcq_distance(&scene, sub_seed);
                (scene, mcq)
            }
            _ => {
                let scene = sample_scene(sub_seed, 0, cfg)?;
                let mcq = build_eval_mcq_region(&scene, sub_seed);
                (scene, mcq)
            }
        };
        records.push(ManifestRecord::BasicMcq {
            item_id: format!("{}-{i:06}", mcq.base.item_id),
            scene_id: scene.scene_id.clone(),
            capability: mcq.base.capability,
            prompt: mcq.base.prompt,
            options: mcq.options,
            answer_key: mcq.answer_key,
            answer: mcq.base.answer,
            image: mcq.base.image_ref,
            master_seed,
            item_index: i,
        });
        scenes.push(scene);
    }
    Ok(BasicEvalSet { records, scenes })
}

pub struct SppEvalSet {
    pub records: Vec<ManifestRecord>,
    pub instances: Vec<SppInstance>,
}

pub fn build_spp_eval_set(
    master_seed: u64,
    count: u64,
    grid_n: i32,
) -> Result<SppEvalSet, DatasetError> {
    let mut records = Vec::with_capacity(count as usize);
    let mut instances = Vec::with_capacity(count as usize);
    for i in 0..count {
        let id = format!("spp{grid_n}-{master_seed:016x}-{i:06}");
        let instance = gen_spp(derive_stream(master_seed, &format!("spp-{i}")), grid_n);
        let solution = solve_spp(&instance)?;
        records.push(ManifestRecord::Spp {
            item_id: id.clone(),
            prompt: build_spp_prompt(&instance),
            image: format!("images/{id}.png"),
            instance: instance.clone(),
            solution,
            master_seed,
            item_index: i,
        });
        instances.push(instance);
    }
    Ok(SppEvalSet { records, instances })
}

pub struct TspEvalSet {
    pub records: Vec<ManifestRecord>,
    pub instances: Vec<TspInstance>,
}

pub fn build_tsp_eval_set(
    master_seed: u64,
    count: u64,
    n_objects: usize,
) -> Result<TspEvalSet, DatasetError> {
    let mut records = Vec::with_capacity(count as usize);
    let mut instances = Vec::with_capacity(count as usize);
    for i in 0..count {
        let id = format!("tsp{n_objects}-{master_seed:016x}-{i:06}");
        let instance = gen_tsp(derive_stream(master_seed, &format!("tsp-{i}")), n_objects)?;
        let solution = solve_tsp(&instance)?;
        records.push(ManifestRecord::Tsp {
            item_id: id.clone(),
            prompt: build_tsp_prompt(&instance),
            image: format!("images/{id}.png"),
            instance: instance.clone(),
            solution,
            master_seed,
            item_index: i,
        });
        instances.push(instance);
    }
    Ok(TspEvalSet { records, instances })
}

/// Renders every distinct scene/instance referenced by a generation run.
pub fn render_scenes(scenes: &[Scene], spec: &DiagramSpec) -> Vec<(String, ImageDocument)> {
    let mut seen = std::collections::BTreeSet::new();
    scenes
        .iter()
        .filter(|s| seen.insert(s.scene_id.clone()))
        .map(|s| (s.scene_id.clone(), render_scene(s, spec)))
        .collect()
}

pub fn render_spp_instances(
    records: &[ManifestRecord],
    spec: &DiagramSpec,
) -> Vec<(String, ImageDocument)> {
    records
        .iter()
        .filter_map(|r| match r {
            ManifestRecord::Spp { item_id, instance, .. } => {
                Some((item_id.clone(), render_spp(instance, spec)))
            }
            _ => None,
        })
        .collect()
}

pub fn render_tsp_instances(
    records: &[ManifestRecord],
    spec: &DiagramSpec,
) -> Vec<(String, ImageDocument)> {
    records
        .iter()
        .filter_map(|r| match r {
            ManifestRecord::Tsp { item_id, instance, .. } => {
                Some((item_id.clone(), render_tsp(instance, spec)))
            }
            _ => None,
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

/// Label-frequency tables and solution-length histograms, always recomputed
/// from manifest records rather than cached at generation time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    /// Named frequency tables; each table's values sum to 1.
    pub tables: BTreeMap<String, BTreeMap<String, f64>>,
    pub spp_length_histogram: BTreeMap<i32, u64>,
    /// Optimal tour lengths bucketed into 250-unit bins ("1750-2000", ...).
    pub tsp_length_histogram: BTreeMap<String, u64>,
    pub record_count: usize,
}

fn normalized(counts: BTreeMap<String, u64>) -> BTreeMap<String, f64> {
    let total: u64 = counts.values().sum();
    counts
        .into_iter()
        .map(|(k, v)| (k, v as f64 / total.max(1) as f64))
        .collect()
}

pub fn stats(records: &[ManifestRecord]) -> StatsReport {
    let mut direction: BTreeMap<String, u64> = BTreeMap::new();
    let mut region: BTreeMap<String, u64> = BTreeMap::new();
    let mut capability: BTreeMap<String, u64> = BTreeMap::new();
    let mut answer_key: BTreeMap<String, u64> = BTreeMap::new();
    let mut spp_hist: BTreeMap<i32, u64> = BTreeMap::new();
    let mut tsp_hist: BTreeMap<String, u64> = BTreeMap::new();
    for r in records {
        match r {
            ManifestRecord::Training { capability: cap, answer, .. } => {
                *capability.entry(cap.as_str().to_string()).or_default() += 1;
                match cap {
                    Capability::Direction => {
                        *direction.entry(answer.clone()).or_default() += 1;
                    }
                    Capability::LocalizationRegion => {
                        *region.entry(answer.clone()).or_default() += 1;
                    }
                    _ => {}
                }
            }
            ManifestRecord::BasicMcq { capability: cap, answer, answer_key: key, .. } => {
                *capability.entry(cap.as_str().to_string()).or_default() += 1;
                *answer_key.entry(key.to_string()).or_default() += 1;
                match cap {
                    Capability::Direction => {
                        *direction.entry(answer.clone()).or_default() += 1;
                    }
                    Capability::LocalizationRegion => {
                        *region.entry(answer.clone()).or_default() += 1;
                    }
                    _ => {}
                }
            }
            ManifestRecord::Spp { solution, .. } => {
                *capability.entry("spp".to_string()).or_default() += 1;
                *spp_hist.entry(solution.optimal_length).or_default() += 1;
            }
            ManifestRecord::Tsp { solution, .. } => {
                *capability.entry("tsp".to_string()).or_default() += 1;
                let bin = (solution.tour_length / 250.0).floor() as i64 * 250;
                *tsp_hist.entry(format!("{bin}-{}", bin + 250)).or_default() += 1;
            }
        }
    }
    let mut tables = BTreeMap::new();
    for (name, counts) in [
        ("direction-answers", direction),
        ("region-answers", region),
        ("capability", capability),
        ("mcq-answer-keys", answer_key),
    ] {
        if !counts.is_empty() {
            tables.insert(name.to_string(), normalized(counts));
        }
    }
    StatsReport {
        tables,
        spp_length_histogram: spp_hist,
        tsp_length_histogram: tsp_hist,
        record_count: records.len(),
    }
}
