//! Builds the 17-item training bundle per scene, multiple-choice evaluation
//! items for the three basic capabilities, and the composite-task prompts.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::composite::{SppInstance, TspInstance};
use crate::geometry::{
    direction_sector, euclidean_distance, region_of_default, DirectionLabel, SectorConfig,
    SectorMode,
};
use crate::scene::Scene;
use crate::seed::derive_stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Capability {
    Direction,
    DistanceCompare,
    DistanceNumeric,
    LocalizationRegion,
    LocalizationCoordinate,
    SceneDescription,
}

impl Capability {
    pub fn as_str(self) -> &'static str {
        match self {
            Capability::Direction => "direction",
            Capability::DistanceCompare => "distance-compare",
            Capability::DistanceNumeric => "distance-numeric",
            Capability::LocalizationRegion => "localization-region",
            Capability::LocalizationCoordinate => "localization-coordinate",
            Capability::SceneDescription => "scene-description",
        }
    }
}

/// Capabilities that have a multiple-choice evaluation form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum McqCapability {
    Direction,
    DistanceCompare,
    LocalizationRegion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionItem {
    pub item_id: String,
    pub scene_id: String,
    pub capability: Capability,
    pub prompt: String,
    pub answer: String,
    pub image_ref: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct McqItem {
    #[serde(flatten)]
    pub base: InstructionItem,
    pub options: [String; 4],
    pub answer_key: char,
}

fn image_ref(scene: &Scene) -> String {
    format!("images/{}.png", scene.scene_id)
}

fn ordered_pairs(labels: &[char]) -> Vec<(char, char)> {
    let mut v = Vec::new();
    for &a in labels {
        for &b in labels {
            if a != b {
                v.push((a, b));
            }
        }
    }
    v
}

fn unordered_pairs(labels: &[char]) -> Vec<(char, char)> {
    let mut v = Vec::new();
    for i in 0..labels.len() {
        for j in (i + 1)..labels.len() {
            v.push((labels[i], labels[j]));
        }
    }
    v
}

fn direction_prompt(rng: &mut ChaCha8Rng, a: char, b: char) -> String {
    let templates = [
        format!("What is the direction of object {b} relative to object {a}?"),
        format!("Looking from object {a}, in which direction does object {b} lie?"),
        format!("Relative to object {a}, where is object {b} positioned?"),
    ];
    templates[rng.gen_range(0..templates.len())].clone()
}

fn numeric_prompt(rng: &mut ChaCha8Rng, a: char, b: char) -> String {
    let templates = [
        format!("What is the distance between object {a} and object {b}, in canvas units (one decimal)?"),
        format!("Measure the straight-line distance from object {a} to object {b} in canvas units, to one decimal."),
    ];
    templates[rng.gen_range(0..templates.len())].clone()
}

fn region_prompt(rng: &mut ChaCha8Rng, a: char) -> String {
    let templates = [
        format!("In which of the nine canvas regions is object {a} located?"),
        format!("Which region of the image contains object {a}?"),
        format!("Name the region (center, top, bottom, left, right, top-left, top-right, bottom-left, or bottom-right) where object {a} sits."),
    ];
    templates[rng.gen_range(0..templates.len())].clone()
}

fn coordinate_prompt(rng: &mut ChaCha8Rng, a: char) -> String {
    let templates = [
        format!("What are the (x, y) coordinates of object {a} on the 1000x1000 canvas?"),
        format!("Estimate the exact position of object {a} as integer canvas coordinates (x, y)."),
    ];
    templates[rng.gen_range(0..templates.len())].clone()
}

fn pair_text(a: char, b: char) -> String {
    format!("{a} and {b}")
}

/// Builds the fixed 17-item instruction bundle for one scene:
/// 3 direction, 4 distance-comparison, 3 numeric-distance, 3 region,
/// 3 coordinate, and 1 scene-description item.
pub fn build_training_bundle(scene: &Scene, sector: &SectorConfig) -> Vec<InstructionItem> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_stream(scene.seed, "bundle"));
    let labels = scene.labels();
    let mut items = Vec::with_capacity(17);
    let push = |capability: Capability, prompt: String, answer: String, items: &mut Vec<InstructionItem>| {
        items.push(InstructionItem {
            item_id: format!("{}-t{:02}", scene.scene_id, items.len()),
            scene_id: scene.scene_id.clone(),
            capability,
            prompt,
            answer,
            image_ref: image_ref(scene),
        });
    };

    // 3 direction items over distinct ordered pairs
    let mut dir_pairs = ordered_pairs(&labels);
    dir_pairs.shuffle(&mut rng);
    for &(a, b) in dir_pairs.iter().take(3) {
        let label = direction_sector(
            scene.point_of(a).unwrap(),
            scene.point_of(b).unwrap(),
            SectorMode::Eight,
            sector,
        )
        .expect("scene invariants guarantee sector labels");
        let prompt = direction_prompt(&mut rng, a, b);
        push(Capability::Direction, prompt, label.as_text().to_string(), &mut items);
    }

    // 4 distance-comparison items, one per phrasing
    let all_pairs = unordered_pairs(&labels);
    let ranking = scene.rank_pairs(&all_pairs).expect("scene invariants forbid ties");
    let list = all_pairs
        .iter()
        .map(|&(a, b)| pair_text(a, b))
        .collect::<Vec<_>>()
        .join("; ");
    let (sa, sb) = all_pairs[ranking.argmin];
    push(
        Capability::DistanceCompare,
        format!("Among the object pairs {list}: which pair has the shortest distance?"),
        pair_text(sa, sb),
        &mut items,
    );
    let mut two = all_pairs.clone();
    two.shuffle(&mut rng);
    let (p, q) = (two[0], two[1]);
    let shorter = if euclidean_distance(scene.point_of(p.0).unwrap(), scene.point_of(p.1).unwrap())
        < euclidean_distance(scene.point_of(q.0).unwrap(), scene.point_of(q.1).unwrap())
    {
        p
    } else {
        q
    };
    push(
        Capability::DistanceCompare,
        format!(
            "Which distance is shorter: between objects {} and {}, or between objects {} and {}?",
            p.0, p.1, q.0, q.1
        ),
        pair_text(shorter.0, shorter.1),
        &mut items,
    );
    let (r, s) = (two[2], two[3]);
    let longer = if euclidean_distance(scene.point_of(r.0).unwrap(), scene.point_of(r.1).unwrap())
        > euclidean_distance(scene.point_of(s.0).unwrap(), scene.point_of(s.1).unwrap())
    {
        r
    } else {
        s
    };
    push(
        Capability::DistanceCompare,
        format!(
            "Which distance is longer: between objects {} and {}, or between objects {} and {}?",
            r.0, r.1, s.0, s.1
        ),
        pair_text(longer.0, longer.1),
        &mut items,
    );
    let (la, lb) = all_pairs[ranking.argmax];
    push(
        Capability::DistanceCompare,
        format!("Among the object pairs {list}: which pair has the longest distance?"),
        pair_text(la, lb),
        &mut items,
    );

    // 3 numeric-distance items
    let mut num_pairs = all_pairs.clone();
    num_pairs.shuffle(&mut rng);
    for &(a, b) in num_pairs.iter().take(3) {
        let d = euclidean_distance(scene.point_of(a).unwrap(), scene.point_of(b).unwrap());
        let prompt = numeric_prompt(&mut rng, a, b);
        push(Capability::DistanceNumeric, prompt, format!("{d:.1}"), &mut items);
    }

    // 3 region + 3 coordinate items over distinct objects
    let mut objs = labels.clone();
    objs.shuffle(&mut rng);
    for &a in objs.iter().take(3) {
        let region = region_of_default(scene.point_of(a).unwrap());
        let prompt = region_prompt(&mut rng, a);
        push(Capability::LocalizationRegion, prompt, region.as_text().to_string(), &mut items);
    }
    let mut coords = labels.clone();
    coords.shuffle(&mut rng);
    for &a in coords.iter().take(3) {
        let p = scene.point_of(a).unwrap();
        let prompt = coordinate_prompt(&mut rng, a);
        push(
            Capability::LocalizationCoordinate,
            prompt,
            format!("({}, {})", p.x, p.y),
            &mut items,
        );
    }

    // 1 scene-description item
    push(
        Capability::SceneDescription,
        "Describe the overall spatial relationships between the labeled objects in the image.".to_string(),
        describe_scene(scene, sector),
        &mut items,
    );

    debug_assert_eq!(items.len(), 17);
    items
}

/// Deterministic free-text description: each object's region, then each
/// ordered pair's 8-way direction.
pub fn describe_scene(scene: &Scene, sector: &SectorConfig) -> String {
    let mut sentences = Vec::new();
    for o in &scene.objects {
        sentences.push(format!(
            "Object {} is in the {} region at ({}, {}).",
            o.label,
            region_of_default(o.point).as_text(),
            o.point.x,
            o.point.y
        ));
    }
    for (a, b) in ordered_pairs(&scene.labels()) {
        let label = direction_sector(
            scene.point_of(a).unwrap(),
            scene.point_of(b).unwrap(),
            SectorMode::Eight,
            sector,
        )
        .unwrap();
        sentences.push(format!("Object {b} is to the {} of object {a}.", label.as_text()));
    }
    sentences.join(" ")
}

fn assemble_mcq(
    rng: &mut ChaCha8Rng,
    item_id: String,
    scene: &Scene,
    capability: Capability,
    question: String,
    correct: String,
    mut distractors: Vec<String>,
) -> McqItem {
    distractors.truncate(3);
    let mut options: Vec<String> = distractors;
    options.push(correct.clone());
    options.shuffle(rng);
    let key_idx = options.iter().position(|o| *o == correct).unwrap();
    let answer_key = (b'A' + key_idx as u8) as char;
    let lettered: Vec<String> = options
        .iter()
        .enumerate()
        .map(|(i, o)| format!("{}) {o}", (b'A' + i as u8) as char))
        .collect();
    let prompt = format!(
        "{question}\n{}\nAnswer with the letter of the correct option.",
        lettered.join("\n")
    );
    McqItem {
        base: InstructionItem {
            item_id,
            scene_id: scene.scene_id.clone(),
            capability,
            prompt,
            answer: correct,
            image_ref: image_ref(scene),
        },
        options: [
            options[0].clone(),
            options[1].clone(),
            options[2].clone(),
            options[3].clone(),
        ],
        answer_key,
    }
}

/// Builds one evaluation MCQ for the given capability. Direction questions use
/// the four diagonal (quadrant) labels as the option set; an optional target
/// restricts the sampled pair to a specific quadrant (used to keep the eval
/// set evenly distributed) and yields `None` when the scene has no such pair.
pub fn build_eval_mcq_direction(
    scene: &Scene,
    seed: u64,
    target: Option<DirectionLabel>,
    sector: &SectorConfig,
) -> Option<McqItem> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_stream(seed, "mcq-direction"));
    let mut pairs = ordered_pairs(&scene.labels());
    pairs.shuffle(&mut rng);
    let (a, b, label) = pairs.iter().find_map(|&(a, b)| {
        let label = direction_sector(
            scene.point_of(a).unwrap(),
            scene.point_of(b).unwrap(),
            SectorMode::Four,
            sector,
        )
        .ok()?;
        match target {
            Some(t) if t != label => None,
            _ => Some((a, b, label)),
        }
    })?;
    let distractors: Vec<String> = DirectionLabel::DIAGONALS
        .iter()
        .filter(|&&d| d != label)
        .map(|d| d.as_text().to_string())
        .collect();
    let question = direction_prompt(&mut rng, a, b);
    Some(assemble_mcq(
        &mut rng,
        format!("{}-mcq-direction", scene.scene_id),
        scene,
        Capability::Direction,
        question,
        label.as_text().to_string(),
        distractors,
    ))
}

pub fn build_eval_mcq_distance(scene: &Scene, seed: u64) -> McqItem {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_stream(seed, "mcq-distance"));
    let mut pairs = unordered_pairs(&scene.labels());
    pairs.shuffle(&mut rng);
    let candidates: Vec<(char, char)> = pairs.into_iter().take(4).collect();
    let ranking = scene.rank_pairs(&candidates).expect("scene invariants forbid ties");
    let ask_min = rng.gen_bool(0.5);
    let winner = candidates[if ask_min { ranking.argmin } else { ranking.argmax }];
    let others: Vec<String> = candidates
        .iter()
        .filter(|&&p| p != winner)
        .map(|&(a, b)| pair_text(a, b))
        .collect();
    let question = format!(
        "Which pair of objects has the {} distance between them?",
        if ask_min { "shortest" } else { "longest" }
    );
    assemble_mcq(
        &mut rng,
        format!("{}-mcq-distance", scene.scene_id),
        scene,
        Capability::DistanceCompare,
        question,
        pair_text(winner.0, winner.1),
        others,
    )
}

pub fn build_eval_mcq_region(scene: &Scene, seed: u64) -> McqItem {
    use crate::geometry::RegionLabel;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_stream(seed, "mcq-region"));
    let labels = scene.labels();
    let obj = labels[rng.gen_range(0..labels.len())];
    let region = region_of_default(scene.point_of(obj).unwrap());
    let mut distractors: Vec<String> = RegionLabel::ALL
        .iter()
        .filter(|&&r| r != region)
        .map(|r| r.as_text().to_string())
        .collect();
    distractors.shuffle(&mut rng);
    let question = region_prompt(&mut rng, obj);
    assemble_mcq(
        &mut rng,
        format!("{}-mcq-region", scene.scene_id),
        scene,
        Capability::LocalizationRegion,
        question,
        region.as_text().to_string(),
        distractors,
    )
}

pub fn build_eval_mcq(scene: &Scene, capability: McqCapability, seed: u64, sector: &SectorConfig) -> McqItem {
    match capability {
        McqCapability::Direction => build_eval_mcq_direction(scene, seed, None, sector)
            .expect("untargeted direction MCQ always finds a pair"),
        McqCapability::DistanceCompare => build_eval_mcq_distance(scene, seed),
        McqCapability::LocalizationRegion => build_eval_mcq_region(scene, seed),
    }
}

/// Prompt for a shortest-path instance, including the grid addressing
/// convention and the required answer format.
pub fn build_spp_prompt(instance: &SppInstance) -> String {
    let n = instance.grid_n;
    let obstacle_clause = if instance.obstacles.is_empty() {
        String::new()
    } else {
        format!(
            " Cells {} are blocked and cannot be entered.",
            instance
                .obstacles
                .iter()
                .map(|c| format!("({},{})", c.col, c.row))
                .collect::<Vec<_>>()
                .join(", ")
        )
    };
    format!(
        "The image shows a {n}x{n} grid. Cells are addressed as (col,row); (0,0) is the top-left cell, \
col increases to the right and row increases downward. Starting from the marked start cell \
({},{}) reach the marked end cell ({},{}), moving one cell at a time up, down, left, or right.{} \
Find a shortest path and answer with the full cell sequence from start to end, for example: \
(0,0) -> (1,0) -> (1,1).",
        instance.start.col, instance.start.row, instance.end.col, instance.end.row, obstacle_clause
    )
}

/// Prompt for a TSP instance with a fixed starting object.
pub fn build_tsp_prompt(instance: &TspInstance) -> String {
    let labels: Vec<String> = instance.labels().iter().map(|c| c.to_string()).collect();
    format!(
        "The image shows {} labeled objects: {}. Starting from object {}, find the shortest closed \
route that visits every object exactly once and returns to {}. Answer with the visiting order as \
labels separated by arrows, starting with {}, for example: {} -> ...",
        labels.len(),
        labels.join(", "),
        instance.start_label,
        instance.start_label,
        instance.start_label,
        instance.start_label
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composite::{gen_spp, gen_tsp};
    use crate::scene::{sample_scene, GenConfig};

    fn scene() -> (Scene, SectorConfig) {
        let cfg = GenConfig::default();
        (sample_scene(21, 0, &cfg).unwrap(), cfg.sector)
    }

    #[test]
    fn bundle_histogram_is_fixed() {
        let (s, sector) = scene();
        let items = build_training_bundle(&s, &sector);
        assert_eq!(items.len(), 17);
        let count = |c: Capability| items.iter().filter(|i| i.capability == c).count();
        assert_eq!(count(Capability::Direction), 3);
        assert_eq!(count(Capability::DistanceCompare), 4);
        assert_eq!(count(Capability::DistanceNumeric), 3);
        assert_eq!(count(Capability::LocalizationRegion), 3);
        assert_eq!(count(Capability::LocalizationCoordinate), 3);
        assert_eq!(count(Capability::SceneDescription), 1);
    }

    #[test]
    fn bundle_is_deterministic() {
        let (s, sector) = scene();
        assert_eq!(build_training_bundle(&s, &sector), build_training_bundle(&s, &sector));
    }

    #[test]
    fn answers_match_recomputed_ground_truth() {
        let cfg = GenConfig::default();
        for idx in 0..50 {
            let s = sample_scene(33, idx, &cfg).unwrap();
            for item in build_training_bundle(&s, &cfg.sector) {
                match item.capability {
                    Capability::DistanceNumeric => {
                        let v: f64 = item.answer.parse().unwrap();
                        // answer must be a 1-decimal distance between two scene objects
                        let ok = unordered_pairs(&s.labels()).iter().any(|&(a, b)| {
                            let d = euclidean_distance(s.point_of(a).unwrap(), s.point_of(b).unwrap());
                            format!("{d:.1}") == item.answer
                        });
                        assert!(ok, "{} -> {v}", item.prompt);
                    }
                    Capability::LocalizationCoordinate => {
                        let ok = s.objects.iter().any(|o| {
                            item.answer == format!("({}, {})", o.point.x, o.point.y)
                        });
                        assert!(ok);
                    }
                    Capability::Direction => {
                        assert!(DirectionLabel::ALL.iter().any(|d| d.as_text() == item.answer));
                    }
                    _ => {}
                }
                assert!(!item.prompt.is_empty() && !item.answer.is_empty());
            }
        }
    }

    #[test]
    fn direction_mcq_uses_quadrant_options() {
        let (s, sector) = scene();
        let mcq = build_eval_mcq(&s, McqCapability::Direction, 5, &sector);
        let mut got: Vec<&str> = mcq.options.iter().map(String::as_str).collect();
        got.sort_unstable();
        let mut want = vec!["bottom left", "bottom right", "top left", "top right"];
        want.sort_unstable();
        assert_eq!(got, want);
    }

    #[test]
    fn mcq_exactly_one_correct_option() {
        let cfg = GenConfig::default();
        for idx in 0..30 {
            let s = sample_scene(44, idx, &cfg).unwrap();
            for cap in [
                McqCapability::Direction,
                McqCapability::DistanceCompare,
                McqCapability::LocalizationRegion,
            ] {
                let mcq = build_eval_mcq(&s, cap, idx, &cfg.sector);
                let correct = mcq.options.iter().filter(|o| **o == mcq.base.answer).count();
                assert_eq!(correct, 1, "{:?}", mcq);
                let distinct: std::collections::BTreeSet<_> = mcq.options.iter().collect();
                assert_eq!(distinct.len(), 4);
                let idx = (mcq.answer_key as u8 - b'A') as usize;
                assert_eq!(mcq.options[idx], mcq.base.answer);
            }
        }
    }

    #[test]
    fn targeted_direction_mcq_hits_target() {
        let cfg = GenConfig::default();
        let mut hits = 0;
        for idx in 0..20 {
            let s = sample_scene(55, idx, &cfg).unwrap();
            if let Some(mcq) =
                build_eval_mcq_direction(&s, idx, Some(DirectionLabel::TopLeft), &cfg.sector)
            {
                assert_eq!(mcq.base.answer, "top left");
                hits += 1;
            }
        }
        assert!(hits > 10);
    }

    #[test]
    fn spp_prompt_contract() {
        let inst = gen_spp(9, 4);
        let p = build_spp_prompt(&inst);
        assert!(p.contains("4x4"));
        assert!(p.contains(&format!("({},{})", inst.start.col, inst.start.row)));
        assert!(p.contains(&format!("({},{})", inst.end.col, inst.end.row)));
        assert!(p.contains("->"));
        assert_eq!(p, build_spp_prompt(&inst));
    }

    #[test]
    fn tsp_prompt_contract() {
        let inst = gen_tsp(9, 5).unwrap();
        let p = build_tsp_prompt(&inst);
        assert!(p.contains(&format!("Starting from object {}", inst.start_label)));
        assert_eq!(p, build_tsp_prompt(&inst));
    }
}
