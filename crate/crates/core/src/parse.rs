//! Deterministic extraction of structured answers from free-text model
//! responses. Parsing is total: every input yields a `ParsedResponse`,
//! with `Unparseable` carrying diagnostics instead of an error.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::composite::Cell;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParsedResponse {
    McqChoice { choice: char },
    CellPath { cells: Vec<Cell> },
    VisitOrder { order: Vec<char> },
    Unparseable { diagnostics: String },
}

impl ParsedResponse {
    pub fn unparseable(why: impl Into<String>) -> Self {
        ParsedResponse::Unparseable { diagnostics: why.into() }
    }
}

fn explicit_answer_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?i)answer\s*(?:is|:)\s*[\*\(\[]*\s*([A-D])\b").unwrap()
    })
}

fn standalone_letter_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    // a bare option letter token, optionally wrapped in (), [], ** or trailed by . ) :
    RE.get_or_init(|| {
        Regex::new(r"(?:^|[\s\(\[\*])([A-D])(?:[\s\)\]\.\,:\*]|$)").unwrap()
    })
}

/// Extracts a multiple-choice letter.
///
/// Precedence: (1) last explicit "answer is X" / "answer: X"; (2) last
/// standalone A-D token; (3) unique case-insensitive occurrence of exactly
/// one option's full text.
pub fn parse_mcq(text: &str, options: &[String; 4]) -> ParsedResponse {
    let text = text.trim();
    if let Some(cap) = explicit_answer_re().captures_iter(text).last() {
        let letter = cap[1].chars().next().unwrap().to_ascii_uppercase();
        return ParsedResponse::McqChoice { choice: letter };
    }
    if let Some(cap) = standalone_letter_re().captures_iter(text).last() {
        let letter = cap[1].chars().next().unwrap();
        return ParsedResponse::McqChoice { choice: letter };
    }
    let lower = text.to_lowercase();
    let hits: Vec<usize> = options
        .iter()
        .enumerate()
        .filter(|(_, opt)| !opt.is_empty() && lower.contains(&opt.to_lowercase()))
        .map(|(i, _)| i)
        .collect();
    if let [only] = hits[..] {
        return ParsedResponse::McqChoice { choice: (b'A' + only as u8) as char };
    }
    ParsedResponse::unparseable(if hits.is_empty() {
        "no option letter or option text found"
    } else {
        "multiple option texts matched"
    })
}

fn tuple_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)").unwrap())
}

/// Extracts a sequence of grid cells written as `(col,row)` tuples.
/// Separators (arrows, commas, brackets, prose) are tolerated. Any tuple
/// outside the grid makes the whole response unparseable.
pub fn parse_path(text: &str, grid_n: i32) -> ParsedResponse {
    let mut cells = Vec::new();
    for cap in tuple_re().captures_iter(text) {
        let col: i32 = match cap[1].parse() {
            Ok(v) => v,
            Err(_) => return ParsedResponse::unparseable("coordinate overflow"),
        };
        let row: i32 = match cap[2].parse() {
            Ok(v) => v,
            Err(_) => return ParsedResponse::unparseable("coordinate overflow"),
        };
        if !(0..grid_n).contains(&col) || !(0..grid_n).contains(&row) {
            return ParsedResponse::unparseable(format!(
                "cell ({col},{row}) outside {grid_n}x{grid_n} grid"
            ));
        }
        cells.push(Cell::new(col, row));
    }
    if cells.is_empty() {
        return ParsedResponse::unparseable("no coordinate tuples found");
    }
    ParsedResponse::CellPath { cells }
}

/// Extracts a visiting order over known single-letter labels.
///
/// Takes label tokens in order of appearance, collapses immediate duplicates,
/// and drops a trailing repeat of the leading label (closed-tour phrasing).
pub fn parse_order(text: &str, labels: &[char]) -> ParsedResponse {
    let bytes: Vec<char> = text.chars().collect();
    let mut order: Vec<char> = Vec::new();
    for (i, &ch) in bytes.iter().enumerate() {
        if !labels.contains(&ch) {
            continue;
        }
        let prev_ok = i == 0 || !bytes[i - 1].is_ascii_alphanumeric();
        let next_ok = i + 1 == bytes.len() || !bytes[i + 1].is_ascii_alphanumeric();
        if !(prev_ok && next_ok) {
            continue;
        }
        if order.last() == Some(&ch) {
            continue; // immediate duplicate
        }
        order.push(ch);
    }
    if order.len() > 1 && order.first() == order.last() {
        order.pop();
    }
    if order.is_empty() {
        return ParsedResponse::unparseable("no known labels found");
    }
    ParsedResponse::VisitOrder { order }
}
