// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! The LLM-as-oracle stage: prompt, query, parse, categorize, select.

pub mod prompt;
pub mod response;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::llm::{LlmClient, LlmError, LlmRequest, RequestSubject};
use crate::model::{Category, InterestingnessDefinition, Score, TestCase};

pub use prompt::{log_prompt, render_mutant, set_prompt, Prompt, PromptError, SYSTEM_MESSAGE};
pub use response::{format_block, parse_response, ParseError, ParsedScore};

/// Score bands: 0..=4 non-interesting, 5..=7 mid, 8..=10 interesting.
pub fn categorize(score: Score) -> Category {
    match score.value() {
        0..=4 => Category::NonInteresting,
        5..=7 => Category::MidInteresting,
        _ => Category::Interesting,
    }
}

/// Label of the `i`-th (zero-based) mutant in prompts and responses.
pub fn mutant_label(i: usize) -> String {
    format!("mutant_{}", i + 1)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("oracle unavailable: {0}")]
    Unavailable(#[from] LlmError),
    #[error(transparent)]
    ParseFailed(#[from] ParseError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoredMutant {
    pub case: TestCase,
    /// `None` when the oracle was unavailable and the mutant passed through unscored.
    pub score: Option<Score>,
    pub category: Option<Category>,
    pub rationale: String,
    #[serde(default)]
    pub defaulted: bool,
}

impl ScoredMutant {
    pub fn unscored(case: TestCase) -> Self {
        Self {
            case,
            score: None,
            category: None,
            rationale: String::new(),
            defaulted: false,
        }
    }
}

/// One oracle round trip, for the audit log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iteration: Option<usize>,
    pub model: String,
    pub prompt: String,
    pub response: Option<String>,
    pub scores: Vec<Option<u8>>,
    pub latency_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct AgentCall<T> {
    pub outcome: Result<T, OracleError>,
    pub audit: AuditEntry,
}

/// Sends `prompt` and scores its mutants. The audit entry is filled in
/// whether or not the call succeeded.
pub fn llm_agent(client: &dyn LlmClient, prompt: &Prompt) -> AgentCall<Vec<ScoredMutant>> {
    let request = LlmRequest {
        system: &prompt.system,
        user: &prompt.user,
        subject: RequestSubject::Mutants {
            definition: &prompt.definition,
            state: &prompt.state,
            mutants: &prompt.mutants,
        },
    };
    let started = Instant::now();
    let reply = client.complete(&request);
    let latency_ms = started.elapsed().as_millis() as u64;
    let mut audit = AuditEntry {
        iteration: None,
        model: client.identity(),
        prompt: prompt.user.clone(),
        response: reply.as_ref().ok().cloned(),
        scores: Vec::new(),
        latency_ms,
        error: None,
    };
    let outcome = reply
        .map_err(OracleError::from)
        .and_then(|text| parse_response(&text, prompt.mutants.len()).map_err(OracleError::from))
        .map(|parsed| {
            prompt
                .mutants
                .iter()
                .zip(parsed)
                .map(|(case, p)| ScoredMutant {
                    case: case.clone(),
                    score: Some(p.score),
                    category: Some(categorize(p.score)),
                    rationale: p.rationale,
                    defaulted: p.defaulted,
                })
                .collect::<Vec<_>>()
        });
    match &outcome {
        Ok(scored) => audit.scores = scored.iter().map(|s| s.score.map(Score::value)).collect(),
        Err(e) => audit.error = Some(e.to_string()),
    }
    AgentCall { outcome, audit }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum SelectPolicy {
    /// The `k` highest-scored mutants.
    TopK { k: usize },
    /// Every mutant at or above `min`; the single best one if none qualifies.
    CategoryFloor { min: Category },
}

impl Default for SelectPolicy {
    fn default() -> Self {
        SelectPolicy::CategoryFloor {
            min: Category::MidInteresting,
        }
    }
}

/// Orders by descending score (stable, unscored last) and applies `policy`.
pub fn select(mut scored: Vec<ScoredMutant>, policy: SelectPolicy) -> Vec<ScoredMutant> {
    scored.sort_by_key(|m| std::cmp::Reverse(m.score));
    match policy {
        SelectPolicy::TopK { k } => {
            scored.truncate(k);
            scored
        }
        SelectPolicy::CategoryFloor { min } => {
            let keep = scored
                .iter()
                .take_while(|s| s.score.is_some_and(|v| categorize(v) >= min))
                .count();
            scored.truncate(keep.max(1));
            scored
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogClass {
    Interesting,
    NonInteresting,
}

/// Scores at or above this mark a flight log as interesting.
pub const LOG_THRESHOLD: Score = Score::NEUTRAL;

#[derive(Clone, Debug, PartialEq)]
pub struct LogAssessment {
    pub class: LogClass,
    pub score: Score,
    pub rationale: String,
}

/// Classifies a flight-log summary against `definition`.
pub fn classify_log(
    client: &dyn LlmClient,
    definition: &InterestingnessDefinition,
    summary: &str,
) -> AgentCall<LogAssessment> {
    let user = match log_prompt(definition, summary) {
        Ok(u) => u,
        Err(e) => {
            return AgentCall {
                audit: AuditEntry {
                    iteration: None,
                    model: client.identity(),
                    prompt: String::new(),
                    response: None,
                    scores: Vec::new(),
                    latency_ms: 0,
                    error: Some(e.to_string()),
                },
                outcome: Err(e.into()),
            }
        }
    };
    let request = LlmRequest {
        system: SYSTEM_MESSAGE,
        user: &user,
        subject: RequestSubject::LogSummary { definition, summary },
    };
    let started = Instant::now();
    let reply = client.complete(&request);
    let latency_ms = started.elapsed().as_millis() as u64;
    let mut audit = AuditEntry {
        iteration: None,
        model: client.identity(),
        prompt: user.clone(),
        response: reply.as_ref().ok().cloned(),
        scores: Vec::new(),
        latency_ms,
        error: None,
    };
    let outcome = reply
        .map_err(OracleError::from)
        .and_then(|text| parse_response(&text, 1).map_err(OracleError::from))
        .map(|mut parsed| {
            let p = parsed.remove(0);
            let class = if p.score >= LOG_THRESHOLD {
                LogClass::Interesting
            } else {
                LogClass::NonInteresting
            };
            LogAssessment {
                class,
                score: p.score,
                rationale: p.rationale,
            }
        });
    match &outcome {
        Ok(a) => audit.scores = vec![Some(a.score.value())],
        Err(e) => audit.error = Some(e.to_string()),
    }
    AgentCall { outcome, audit }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::{MockClient, MockMode, MockOracleConfig, OfflineClient};
    use crate::model::SystemState;

    fn scored(values: &[u8]) -> Vec<ScoredMutant> {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let s = Score::new(*v).unwrap();
                ScoredMutant {
                    case: TestCase::command(format!("c{i}"), "RC3", Some(i as f64)),
                    score: Some(s),
                    category: Some(categorize(s)),
                    rationale: String::new(),
                    defaulted: false,
                }
            })
            .collect()
    }

    fn ids(v: &[ScoredMutant]) -> Vec<&str> {
        v.iter().map(|s| s.case.id.as_str()).collect()
    }

    #[test]
    fn category_bands() {
        let cats: Vec<Category> = Score::all().map(categorize).collect();
        use Category::*;
        assert_eq!(
            cats,
            [
                NonInteresting,
                NonInteresting,
                NonInteresting,
                NonInteresting,
                NonInteresting,
                MidInteresting,
                MidInteresting,
                MidInteresting,
                Interesting,
                Interesting,
                Interesting
            ]
        );
    }

    #[test]
    fn select_top_k_is_stable() {
        let out = select(scored(&[8, 10, 7, 5, 8]), SelectPolicy::TopK { k: 3 });
        assert_eq!(ids(&out), ["c1", "c0", "c4"]);
    }

    #[test]
    fn category_floor_with_fallback() {
        let floor = SelectPolicy::CategoryFloor {
            min: Category::Interesting,
        };
        assert_eq!(ids(&select(scored(&[8, 10, 7, 5, 8]), floor)), ["c1", "c0", "c4"]);
        assert_eq!(ids(&select(scored(&[1, 3, 2]), floor)), ["c1"]);
        assert_eq!(ids(&select(scored(&[1, 6, 2]), SelectPolicy::default())), ["c1"]);
    }

    #[test]
    fn agent_parses_mock_reply() {
        let client = MockClient::new(
            MockOracleConfig::new(MockMode::FixedScores {
                scores: [2, 9].map(|v| Score::new(v).unwrap()).to_vec(),
            }),
            None,
        )
        .unwrap();
        let mutants = [
            TestCase::command("a", "RC3", None),
            TestCase::command("b", "RC3", Some(1.0)),
        ];
        let p = set_prompt(
            &InterestingnessDefinition::min_separation(1.5),
            &SystemState::default(),
            &mutants,
        )
        .unwrap();
        let call = llm_agent(&client, &p);
        let out = call.outcome.unwrap();
        assert_eq!(out[1].category, Some(Category::Interesting));
        assert_eq!(call.audit.scores, [Some(2), Some(9)]);
        assert_eq!(call.audit.model, "mock:fixed");
    }

    #[test]
    fn offline_is_unavailable_and_audited() {
        let p = set_prompt(
            &InterestingnessDefinition::min_separation(1.5),
            &SystemState::default(),
            &[TestCase::command("a", "RC3", None)],
        )
        .unwrap();
        let call = llm_agent(&OfflineClient, &p);
        assert!(matches!(call.outcome, Err(OracleError::Unavailable(_))));
        assert!(call.audit.error.is_some());
        assert!(call.audit.response.is_none());
    }

    #[test]
    fn classify_log_threshold() {
        let client = MockClient::new(MockOracleConfig::new(MockMode::keywords()), None).unwrap();
        let def = InterestingnessDefinition::new("t", "altitude instability").unwrap();
        let hit = classify_log(&client, &def, "altitude oscillates then drops in hover")
            .outcome
            .unwrap();
        assert_eq!((hit.class, hit.score.value()), (LogClass::Interesting, 8));
        let miss = classify_log(&client, &def, "hover stable, landed normally")
            .outcome
            .unwrap();
        assert_eq!(miss.class, LogClass::NonInteresting);
    }
}
