//! Simulated responders exercising the full prompt -> response -> parse ->
//! score loop. Agents speak free text so the deterministic parser is always
//! on the tested path. The same trait is the plug-in point for real model
//! clients (prompt text + image path in, response text out).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::composite::{Cell, SppInstance, SppSolution, TspInstance, TspSolution};
use crate::instruct::McqItem;
use crate::seed::derive_stream;

/// One evaluation item with everything the harness needs to prompt and score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case")]
pub enum EvalItem {
    BasicMcq {
        item: McqItem,
    },
    Spp {
        item_id: String,
        prompt: String,
        image_ref: String,
        instance: SppInstance,
        solution: SppSolution,
    },
    Tsp {
        item_id: String,
        prompt: String,
        image_ref: String,
        instance: TspInstance,
        solution: TspSolution,
    },
}

impl EvalItem {
    pub fn item_id(&self) -> &str {
        match self {
            EvalItem::BasicMcq { item } => &item.base.item_id,
            EvalItem::Spp { item_id, .. } | EvalItem::Tsp { item_id, .. } => item_id,
        }
    }

    pub fn prompt(&self) -> &str {
        match self {
            EvalItem::BasicMcq { item } => &item.base.prompt,
            EvalItem::Spp { prompt, .. } | EvalItem::Tsp { prompt, .. } => prompt,
        }
    }

    pub fn image_ref(&self) -> &str {
        match self {
            EvalItem::BasicMcq { item } => &item.base.image_ref,
            EvalItem::Spp { image_ref, .. } | EvalItem::Tsp { image_ref, .. } => image_ref,
        }
    }
}

/// A responder: maps an item to free text. Real model clients implement this
/// over the prompt and image path alone; built-in agents may peek at ground
/// truth (oracle) or ignore it (random, adversarial).
pub trait Agent {
    fn respond(&self, item: &EvalItem) -> String;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    Oracle,
    Random,
    Adversarial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub kind: AgentKind,
    pub seed: u64,
}

impl Agent for AgentSpec {
    fn respond(&self, item: &EvalItem) -> String {
        // per-item stream: responses are deterministic in (kind, seed, item)
        let mut rng = ChaCha8Rng::seed_from_u64(derive_stream(
            self.seed,
            &format!("{:?}:{}", self.kind, item.item_id()),
        ));
        match self.kind {
            AgentKind::Oracle => oracle_response(&mut rng, item),
            AgentKind::Random => random_response(&mut rng, item),
            AgentKind::Adversarial => adversarial_response(&mut rng, item),
        }
    }
}

fn format_cells(cells: &[Cell], sep: &str) -> String {
    cells
        .iter()
        .map(|c| format!("({},{})", c.col, c.row))
        .collect::<Vec<_>>()
        .join(sep)
}

fn format_order(order: &[char], sep: &str) -> String {
    order.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(sep)
}

/// Number of phrasing styles the oracle rotates through per task.
pub const ORACLE_STYLES: usize = 3;

/// Correct answer wrapped in one of three phrasing templates.
pub fn oracle_response_styled(item: &EvalItem, style: usize) -> String {
    match item {
        EvalItem::BasicMcq { item } => {
            let k = item.answer_key;
            match style % ORACLE_STYLES {
                0 => format!("The answer is ({k})."),
                1 => format!("Looking at the image, I conclude the answer is {k}: {}.", item.base.answer),
                _ => format!("answer: {k}"),
            }
        }
        EvalItem::Spp { solution, .. } => {
            let p = &solution.one_optimal_path;
            match style % ORACLE_STYLES {
                0 => format_cells(p, " -> "),
                1 => format!("[{}]", format_cells(p, ", ")),
                _ => format!(
                    "Start at {}, then follow {} to reach the goal.",
                    format_cells(&p[..1], ""),
                    format_cells(&p[1..], ", then ")
                ),
            }
        }
        EvalItem::Tsp { solution, .. } => {
            let o = &solution.order;
            match style % ORACLE_STYLES {
                0 => format_order(o, " -> "),
                // closed-tour phrasing repeats the start; the parser drops it
                1 => {
                    let mut closed = o.clone();
                    closed.push(o[0]);
                    format_order(&closed, " -> ")
                }
                _ => format!("Visit {} in that exact sequence.", format_order(o, ", then ")),
            }
        }
    }
}

fn oracle_response(rng: &mut ChaCha8Rng, item: &EvalItem) -> String {
    oracle_response_styled(item, rng.gen_range(0..ORACLE_STYLES))
}

fn random_response(rng: &mut ChaCha8Rng, item: &EvalItem) -> String {
    match item {
        EvalItem::BasicMcq { .. } => {
            let letter = (b'A' + rng.gen_range(0..4u8)) as char;
            format!("The answer is ({letter}).")
        }
        EvalItem::Spp { instance, .. } => {
            // random walk from the start of a plausible length
            let len = rng.gen_range(1..=(2 * instance.grid_n as usize));
            let mut cells = vec![instance.start];
            for _ in 0..len {
                let options: Vec<Cell> = cells
                    .last()
                    .unwrap()
                    .neighbors()
                    .into_iter()
                    .filter(|&c| instance.in_grid(c))
                    .collect();
                cells.push(*options.choose(rng).unwrap());
            }
            format_cells(&cells, " -> ")
        }
        EvalItem::Tsp { instance, .. } => {
            let mut order = instance.labels();
            order.shuffle(rng);
            format_order(&order, " -> ")
        }
    }
}

fn adversarial_response(rng: &mut ChaCha8Rng, item: &EvalItem) -> String {
    match item {
        EvalItem::BasicMcq { .. } => match rng.gen_range(0..3) {
            0 => String::new(),
            1 => "E".to_string(),
            _ => "I refuse to commit to any of these options.".to_string(),
        },
        EvalItem::Spp { instance, .. } => match rng.gen_range(0..4) {
            0 => String::new(),
            // diagonal step
            1 => format!(
                "({},{}) -> ({},{})",
                instance.start.col,
                instance.start.row,
                instance.start.col + 1,
                instance.start.row + 1
            ),
            // off-grid cell
            2 => format!("(0,0) -> ({},{})", instance.grid_n, instance.grid_n),
            // does not start at the start cell
            _ => format!("({},{})", instance.end.col, instance.end.row),
        },
        EvalItem::Tsp { instance, .. } => match rng.gen_range(0..3) {
            0 => String::new(),
            // drops a label
            1 => format_order(&instance.labels()[1..], " -> "),
            _ => "1 -> 2 -> 3".to_string(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composite::{gen_spp, gen_tsp, solve_spp, solve_tsp};
    use crate::eval::{score_mcq, score_spp, score_tsp, TspScoringMode, Verdict};
    use crate::instruct::{build_eval_mcq, build_spp_prompt, build_tsp_prompt, McqCapability};
    use crate::parse::{parse_mcq, parse_order, parse_path};
    use crate::scene::{sample_scene, GenConfig};

    fn items(seed: u64) -> Vec<EvalItem> {
        let cfg = GenConfig::default();
        let mut v = Vec::new();
        for i in 0..10 {
            let scene = sample_scene(seed, i, &cfg).unwrap();
            let cap = [
                McqCapability::Direction,
                McqCapability::DistanceCompare,
                McqCapability::LocalizationRegion,
            ][i as usize % 3];
            v.push(EvalItem::BasicMcq { item: build_eval_mcq(&scene, cap, i, &cfg.sector) });
            let spp = gen_spp(i, 4 + (i % 2) as i32);
            let sol = solve_spp(&spp).unwrap();
            v.push(EvalItem::Spp {
                item_id: format!("spp-{i}"),
                prompt: build_spp_prompt(&spp),
                image_ref: String::new(),
                instance: spp,
                solution: sol,
            });
            let tsp = gen_tsp(i, 4 + (i % 2) as usize).unwrap();
            let sol = solve_tsp(&tsp).unwrap();
            v.push(EvalItem::Tsp {
                item_id: format!("tsp-{i}"),
                prompt: build_tsp_prompt(&tsp),
                image_ref: String::new(),
                instance: tsp,
                solution: sol,
            });
        }
        v
    }

    fn score(item: &EvalItem, response: &str) -> Verdict {
        match item {
            EvalItem::BasicMcq { item } => {
                let parsed = parse_mcq(response, &item.options);
                score_mcq(item, &parsed).unwrap().verdict
            }
            EvalItem::Spp { item_id, instance, solution, .. } => {
                let parsed = parse_path(response, instance.grid_n);
                score_spp(item_id, instance, solution, &parsed).unwrap().verdict
            }
            EvalItem::Tsp { item_id, instance, solution, .. } => {
                let parsed = parse_order(response, &instance.labels());
                score_tsp(item_id, instance, solution, &parsed, TspScoringMode::Strict)
                    .unwrap()
                    .verdict
            }
        }
    }

    #[test]
    fn oracle_is_always_correct_in_every_style() {
        for item in items(7) {
            for style in 0..ORACLE_STYLES {
                let resp = oracle_response_styled(&item, style);
                assert_eq!(score(&item, &resp), Verdict::Correct, "style {style}: {resp}");
            }
        }
    }

    #[test]
    fn adversarial_is_never_correct() {
        let agent = AgentSpec { kind: AgentKind::Adversarial, seed: 3 };
        for item in items(8) {
            let v = score(&item, &agent.respond(&item));
            assert!(matches!(v, Verdict::Invalid | Verdict::Unparseable), "{v:?}");
        }
    }

    #[test]
    fn responses_are_deterministic() {
        let agent = AgentSpec { kind: AgentKind::Random, seed: 5 };
        for item in items(9) {
            assert_eq!(agent.respond(&item), agent.respond(&item));
        }
    }
}
