// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! Parsing of free-text model responses into per-mutant scores.
//!
//! A response is split into blocks at lines that start with a `mutant_<i>`
//! label (also accepted: `mutant <i>`, `Mutant<i>`, `**mutant_i**`). Inside a
//! block the last `Score: X`, `Score: X/10` or `Score: X out of 10` wins.
//! Values are rounded and clamped into 0..=10. A mutant with no block or no
//! score gets [`Score::NEUTRAL`] and is flagged as defaulted; a response with
//! no score at all is a parse failure.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Score;

static LABEL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?im)^[^\w\n]*mutant[_\s-]?(\d+)\b").unwrap());
static SCORE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\bscore\b\s*[:=]?[\s*]*(-?\d+(?:\.\d+)?)(?:\s*(?:/\s*10|out\s+of\s+10))?\.?").unwrap()
});
/// Anything before the rationale label (e.g. a test-case name) is dropped.
static INTERPRETATION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\binterpretation\s*:\s*").unwrap());

#[derive(Debug, Error, Clone, PartialEq)]
#[error("no score found in response: {excerpt}")]
pub struct ParseError {
    pub excerpt: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParsedScore {
    pub score: Score,
    pub rationale: String,
    /// True when no score was found for this mutant.
    pub defaulted: bool,
}

/// The block format the parser is written against.
pub fn format_block(label: &str, rationale: &str, score: Score) -> String {
    format!("{label}:\nINTERPRETATION: {rationale}\nScore: {score} out of 10.\n")
}

fn parse_block(block: &str) -> (Option<Score>, String) {
    let last = SCORE.captures_iter(block).last();
    let score = last.as_ref().and_then(|c| c[1].parse::<f64>().ok()).map(Score::clamped);
    let rationale = match last {
        Some(c) => {
            let m = c.get(0).unwrap();
            format!("{}{}", &block[..m.start()], &block[m.end()..])
        }
        None => block.to_string(),
    };
    let rationale = match INTERPRETATION.find(&rationale) {
        Some(m) => &rationale[m.end()..],
        None => &rationale[..],
    };
    (score, rationale.trim().to_string())
}

/// Scores for `expected` mutants, in label order.
pub fn parse_response(text: &str, expected: usize) -> Result<Vec<ParsedScore>, ParseError> {
    let mut blocks: Vec<Option<&str>> = vec![None; expected];
    let labels: Vec<(usize, usize, usize)> = LABEL
        .captures_iter(text)
        .filter_map(|c| {
            let m = c.get(0).unwrap();
            let idx = c[1].parse::<usize>().ok()?;
            Some((m.start(), m.end(), idx))
        })
        .collect();
    if labels.is_empty() && expected == 1 {
        blocks[0] = Some(text);
    }
    for (k, &(_, body_start, idx)) in labels.iter().enumerate() {
        let end = labels.get(k + 1).map_or(text.len(), |l| l.0);
        if (1..=expected).contains(&idx) && blocks[idx - 1].is_none() {
            let body = text[body_start..end].trim_start_matches(|c: char| c == ':' || c == '*' || c.is_whitespace());
            blocks[idx - 1] = Some(body);
        }
    }
    let parsed: Vec<ParsedScore> = blocks
        .into_iter()
        .map(|b| {
            let (score, rationale) = b.map(parse_block).unwrap_or((None, String::new()));
            ParsedScore {
                score: score.unwrap_or(Score::NEUTRAL),
                rationale,
                defaulted: score.is_none(),
            }
        })
        .collect();
    if parsed.iter().all(|p| p.defaulted) {
        let excerpt: String = text.chars().take(200).collect();
        return Err(ParseError { excerpt });
    }
    Ok(parsed)
}
