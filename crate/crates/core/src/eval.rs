//! Scores parsed responses and aggregates accuracy per task and configuration.
//!
//! Accuracy counts only `correct`; `invalid` and `unparseable` are kept as
//! separate verdicts in the breakdown but contribute zero, matching the
//! all-or-nothing accuracy metric.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::composite::{check_path, PathValidity, SppInstance, SppSolution, TspInstance, TspSolution};
use crate::instruct::McqItem;
use crate::parse::ParsedResponse;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("parsed response kind does not match task {0}")]
    TaskMismatch(&'static str),
    #[error("cannot aggregate an empty record set")]
    EmptyRun,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    BasicMcq,
    Spp,
    Tsp,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::BasicMcq => "basic-mcq",
            TaskKind::Spp => "spp",
            TaskKind::Tsp => "tsp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Correct,
    Incorrect,
    Invalid,
    Unparseable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TspScoringMode {
    /// Correct only on exact match with the solver's canonical order.
    Strict,
    /// Correct when the submitted tour attains the optimal closed-tour length.
    LengthOptimal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub item_id: String,
    pub task: TaskKind,
    /// Configuration cell this record belongs to (e.g. "grid4", "obj5", "basic").
    pub config: String,
    pub verdict: Verdict,
    pub detail: String,
}

pub fn score_mcq(item: &McqItem, parsed: &ParsedResponse) -> Result<EvalRecord, EvalError> {
    let verdict = match parsed {
        ParsedResponse::McqChoice { choice } => {
            if *choice == item.answer_key {
                (Verdict::Correct, format!("chose {choice}"))
            } else {
                (Verdict::Incorrect, format!("chose {choice}, key {}", item.answer_key))
            }
        }
        ParsedResponse::Unparseable { diagnostics } => (Verdict::Unparseable, diagnostics.clone()),
        _ => return Err(EvalError::TaskMismatch("basic-mcq")),
    };
    Ok(EvalRecord {
        item_id: item.base.item_id.clone(),
        task: TaskKind::BasicMcq,
        config: "basic".into(),
        verdict: verdict.0,
        detail: verdict.1,
    })
}

pub fn score_spp(
    item_id: &str,
    instance: &SppInstance,
    solution: &SppSolution,
    parsed: &ParsedResponse,
) -> Result<EvalRecord, EvalError> {
    let (verdict, detail) = match parsed {
        ParsedResponse::CellPath { cells } => match check_path(instance, cells) {
            PathValidity::Valid => {
                let steps = cells.len() as i32 - 1;
                if steps == solution.optimal_length {
                    (Verdict::Correct, format!("optimal path of {steps} steps"))
                } else {
                    (
                        Verdict::Incorrect,
                        format!("valid but {steps} steps vs optimal {}", solution.optimal_length),
                    )
                }
            }
            bad => (Verdict::Invalid, format!("{bad:?}")),
        },
        ParsedResponse::Unparseable { diagnostics } => (Verdict::Unparseable, diagnostics.clone()),
        _ => return Err(EvalError::TaskMismatch("spp")),
    };
    Ok(EvalRecord {
        item_id: item_id.to_string(),
        task: TaskKind::Spp,
        config: format!("grid{}", instance.grid_n),
        verdict,
        detail,
    })
}

pub fn score_tsp(
    item_id: &str,
    instance: &TspInstance,
    solution: &TspSolution,
    parsed: &ParsedResponse,
    mode: TspScoringMode,
) -> Result<EvalRecord, EvalError> {
    let (verdict, detail) = match parsed {
        ParsedResponse::VisitOrder { order } => {
            let mut sorted = order.clone();
            sorted.sort_unstable();
            let mut labels = instance.labels();
            labels.sort_unstable();
            if sorted != labels || order.first() != Some(&instance.start_label) {
                (Verdict::Invalid, "not a start-anchored permutation of all labels".into())
            } else {
                match mode {
                    TspScoringMode::Strict => {
                        if *order == solution.order {
                            (Verdict::Correct, "matches canonical solver order".into())
                        } else {
                            (Verdict::Incorrect, "valid tour but not the solver order".into())
                        }
                    }
                    TspScoringMode::LengthOptimal => {
                        let len = instance.tour_length(order);
                        let rel = (len - solution.tour_length).abs()
                            / solution.tour_length.max(f64::MIN_POSITIVE);
                        if rel <= 1e-6 {
                            (Verdict::Correct, format!("tour length {len:.3} is optimal"))
                        } else {
                            (
                                Verdict::Incorrect,
                                format!("tour {len:.3} vs optimal {:.3}", solution.tour_length),
                            )
                        }
                    }
                }
            }
        }
        ParsedResponse::Unparseable { diagnostics } => (Verdict::Unparseable, diagnostics.clone()),
        _ => return Err(EvalError::TaskMismatch("tsp")),
    };
    Ok(EvalRecord {
        item_id: item_id.to_string(),
        task: TaskKind::Tsp,
        config: format!("obj{}", instance.objects.len()),
        verdict,
        detail,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub task: TaskKind,
    pub config: String,
    pub total: usize,
    pub correct: usize,
    pub incorrect: usize,
    pub invalid: usize,
    pub unparseable: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub rows: Vec<ReportRow>,
}

impl RunReport {
    pub fn accuracy_for(&self, task: TaskKind, config: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.task == task && r.config == config)
            .map(|r| r.accuracy)
    }

    /// Aligned plain-text table, one row per (task, config) cell.
    pub fn to_text_table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:<10} {:<8} {:>6} {:>8} {:>10} {:>8} {:>12} {:>9}",
            "task", "config", "total", "correct", "incorrect", "invalid", "unparseable", "accuracy"
        )
        .unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:<10} {:<8} {:>6} {:>8} {:>10} {:>8} {:>12} {:>8.1}%",
                r.task.as_str(),
                r.config,
                r.total,
                r.correct,
                r.incorrect,
                r.invalid,
                r.unparseable,
                r.accuracy * 100.0
            )
            .unwrap();
        }
        out
    }
}

/// Groups records into (task, config) cells and computes accuracies.
pub fn aggregate(records: &[EvalRecord]) -> Result<RunReport, EvalError> {
    if records.is_empty() {
        return Err(EvalError::EmptyRun);
    }
    let mut cells: BTreeMap<(TaskKind, String), Vec<&EvalRecord>> = BTreeMap::new();
    for r in records {
        cells.entry((r.task, r.config.clone())).or_default().push(r);
    }
    let rows = cells
        .into_iter()
        .map(|((task, config), rs)| {
            let count = |v: Verdict| rs.iter().filter(|r| r.verdict == v).count();
            let correct = count(Verdict::Correct);
            ReportRow {
                task,
                config,
                total: rs.len(),
                correct,
                incorrect: count(Verdict::Incorrect),
                invalid: count(Verdict::Invalid),
                unparseable: count(Verdict::Unparseable),
                accuracy: correct as f64 / rs.len() as f64,
            }
        })
        .collect();
    Ok(RunReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composite::{gen_spp, gen_tsp, solve_spp, solve_tsp, Cell};

    fn record(v: Verdict) -> EvalRecord {
        EvalRecord {
            item_id: "x".into(),
            task: TaskKind::BasicMcq,
            config: "basic".into(),
            verdict: v,
            detail: String::new(),
        }
    }

    #[test]
    fn aggregate_basic_accuracy() {
        let recs: Vec<EvalRecord> = [Verdict::Correct, Verdict::Correct, Verdict::Correct, Verdict::Incorrect]
            .into_iter()
            .map(record)
            .collect();
        let rep = aggregate(&recs).unwrap();
        assert_eq!(rep.rows.len(), 1);
        assert!((rep.rows[0].accuracy - 0.75).abs() < 1e-12);
    }

    #[test]
    fn aggregate_all_unparseable_and_empty() {
        let recs: Vec<EvalRecord> = (0..3).map(|_| record(Verdict::Unparseable)).collect();
        let rep = aggregate(&recs).unwrap();
        assert_eq!(rep.rows[0].accuracy, 0.0);
        assert_eq!(rep.rows[0].unparseable, 3);
        assert_eq!(aggregate(&[]), Err(EvalError::EmptyRun));
    }

    #[test]
    fn aggregate_is_permutation_invariant() {
        let mut recs: Vec<EvalRecord> = [Verdict::Correct, Verdict::Incorrect, Verdict::Invalid]
            .into_iter()
            .map(record)
            .collect();
        let a = aggregate(&recs).unwrap();
        recs.reverse();
        assert_eq!(a, aggregate(&recs).unwrap());
    }

    #[test]
    fn spp_scoring_examples() {
        let inst = gen_spp(1, 4);
        let sol = solve_spp(&inst).unwrap();
        let ok = ParsedResponse::CellPath { cells: sol.one_optimal_path.clone() };
        let rec = score_spp("i", &inst, &sol, &ok).unwrap();
        assert_eq!(rec.verdict, Verdict::Correct);
        assert_eq!(rec.config, "grid4");

        let diagonal = ParsedResponse::CellPath { cells: vec![Cell::new(1, 1), Cell::new(2, 2)] };
        assert_eq!(score_spp("i", &inst, &sol, &diagonal).unwrap().verdict, Verdict::Invalid);

        let mismatch = ParsedResponse::VisitOrder { order: vec!['A'] };
        assert_eq!(score_spp("i", &inst, &sol, &mismatch), Err(EvalError::TaskMismatch("spp")));
    }

    #[test]
    fn tsp_strict_vs_length_optimal() {
        let inst = gen_tsp(3, 5).unwrap();
        let sol = solve_tsp(&inst).unwrap();
        let exact = ParsedResponse::VisitOrder { order: sol.order.clone() };
        for mode in [TspScoringMode::Strict, TspScoringMode::LengthOptimal] {
            assert_eq!(score_tsp("i", &inst, &sol, &exact, mode).unwrap().verdict, Verdict::Correct);
        }
        let mut rev = sol.order.clone();
        rev[1..].reverse();
        if rev != sol.order {
            let parsed = ParsedResponse::VisitOrder { order: rev };
            assert_eq!(
                score_tsp("i", &inst, &sol, &parsed, TspScoringMode::Strict).unwrap().verdict,
                Verdict::Incorrect
            );
            assert_eq!(
                score_tsp("i", &inst, &sol, &parsed, TspScoringMode::LengthOptimal).unwrap().verdict,
                Verdict::Correct
            );
        }
        let missing = ParsedResponse::VisitOrder { order: sol.order[..sol.order.len() - 1].to_vec() };
        assert_eq!(
            score_tsp("i", &inst, &sol, &missing, TspScoringMode::Strict).unwrap().verdict,
            Verdict::Invalid
        );
    }
}
