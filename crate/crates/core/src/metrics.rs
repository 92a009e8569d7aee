// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! Oracle evaluation and campaign comparison.
//!
//! Rates whose denominator is zero are `None` ("undefined"), never 0.

use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::campaign::CampaignReport;
use crate::llm::LlmClient;
use crate::model::{InterestingnessDefinition, Score};
use crate::oracle::{classify_log, AuditEntry, LogClass};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        Self { tp, fp, fn_, tn }
    }

    /// Tallies `(predicted_positive, actually_positive)` pairs.
    pub fn from_outcomes(outcomes: impl IntoIterator<Item = (bool, bool)>) -> Self {
        let mut cm = Self::default();
        for (predicted, actual) in outcomes {
            match (predicted, actual) {
                (true, true) => cm.tp += 1,
                (true, false) => cm.fp += 1,
                (false, true) => cm.fn_ += 1,
                (false, false) => cm.tn += 1,
            }
        }
        cm
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn classification_metrics(cm: &ConfusionMatrix) -> ClassificationMetrics {
    let precision = ratio(cm.tp, cm.tp + cm.fp);
    let recall = ratio(cm.tp, cm.tp + cm.fn_);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    ClassificationMetrics {
        accuracy: ratio(cm.tp + cm.tn, cm.total()),
        precision,
        recall,
        f1,
    }
}

fn fmt_rate(r: Option<f64>) -> String {
    r.map_or_else(|| "undefined".to_string(), |v| format!("{v:.3}"))
}

impl ClassificationMetrics {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for (name, v) in [
            ("accuracy", self.accuracy),
            ("precision", self.precision),
            ("recall", self.recall),
            ("f1", self.f1),
        ] {
            let _ = writeln!(out, "{name:<10} {:>9}", fmt_rate(v));
        }
        out
    }
}

/// One line of a labelled flight-log dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelledLog {
    pub id: String,
    pub summary: String,
    pub label: LogClass,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogPrediction {
    pub id: String,
    pub label: LogClass,
    /// `None` when the oracle gave no usable answer.
    pub predicted: Option<LogClass>,
    pub score: Option<Score>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogEvaluation {
    pub matrix: ConfusionMatrix,
    pub metrics: ClassificationMetrics,
    pub predictions: Vec<LogPrediction>,
    /// Logs left out of the matrix because the oracle failed on them.
    pub failures: usize,
    pub audit: Vec<AuditEntry>,
}

/// Classifies every log with `client` and tallies the answers against the
/// labels. `Interesting` is the positive class.
pub fn evaluate_logs(
    client: &dyn LlmClient,
    definition: &InterestingnessDefinition,
    logs: &[LabelledLog],
) -> LogEvaluation {
    let mut predictions = Vec::with_capacity(logs.len());
    let mut audit = Vec::with_capacity(logs.len());
    for log in logs {
        let call = classify_log(client, definition, &log.summary);
        audit.push(call.audit);
        let (predicted, score) = match call.outcome {
            Ok(a) => (Some(a.class), Some(a.score)),
            Err(e) => {
                log::warn!("log {}: {e}", log.id);
                (None, None)
            }
        };
        predictions.push(LogPrediction {
            id: log.id.clone(),
            label: log.label,
            predicted,
            score,
        });
    }
    let matrix = ConfusionMatrix::from_outcomes(predictions.iter().filter_map(|p| {
        p.predicted
            .map(|c| (c == LogClass::Interesting, p.label == LogClass::Interesting))
    }));
    LogEvaluation {
        metrics: classification_metrics(&matrix),
        failures: predictions.iter().filter(|p| p.predicted.is_none()).count(),
        matrix,
        predictions,
        audit,
    }
}

/// Selection uplift under a uniform-pick model: picking uniformly from the
/// `k` selected cases instead of all `n` raises the chance of hitting the
/// bug-triggering case from `1/n` to `1/k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpliftResult {
    pub pool_fraction: f64,
    pub selection_ratio: f64,
    pub pool_reduction: f64,
    pub model: UpliftModel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpliftModel {
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Uplift {
    Applicable(UpliftResult),
    /// The bug-triggering case was filtered out; guidance hurt.
    NotApplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("uplift needs 1 <= k <= n, got n = {n}, k = {k}")]
pub struct UpliftError {
    pub n: u64,
    pub k: u64,
}

pub fn uplift(total_mutants: u64, selected_pool_size: u64, bug_case_in_pool: bool) -> Result<Uplift, UpliftError> {
    let (n, k) = (total_mutants, selected_pool_size);
    if k == 0 || k > n {
        return Err(UpliftError { n, k });
    }
    if !bug_case_in_pool {
        return Ok(Uplift::NotApplicable);
    }
    Ok(Uplift::Applicable(UpliftResult {
        pool_fraction: k as f64 / n as f64,
        selection_ratio: n as f64 / k as f64,
        pool_reduction: (n - k) as f64 / n as f64,
        model: UpliftModel::Uniform,
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Win,
    Loss,
    Tie,
    Incomparable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionDelta {
    pub mission: String,
    pub valid_a: Option<u64>,
    pub valid_b: Option<u64>,
    /// `a - b` in unique valid cases.
    pub valid_delta: Option<i64>,
    pub first_violation_a: Option<u64>,
    pub first_violation_b: Option<u64>,
    /// `a - b` in iterations to first violation; negative means `a` was faster.
    pub first_violation_delta: Option<i64>,
    pub outcome: Outcome,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub wins: u64,
    pub losses: u64,
    pub ties: u64,
    pub incomparable: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<MissionDelta>,
    pub tally: Tally,
}

fn by_mission(reports: &[CampaignReport]) -> IndexMap<&str, &CampaignReport> {
    reports.iter().map(|r| (r.mission.as_str(), r)).collect()
}

/// Per-mission deltas of `a` against `b`. Missions present on only one side
/// are marked incomparable. A win means strictly more unique valid cases.
pub fn compare_campaigns(a: &[CampaignReport], b: &[CampaignReport]) -> Comparison {
    let (ma, mb) = (by_mission(a), by_mission(b));
    let mut missions: Vec<&str> = ma.keys().copied().collect();
    missions.extend(mb.keys().copied().filter(|m| !ma.contains_key(m)));
    let mut tally = Tally::default();
    let rows = missions
        .into_iter()
        .map(|m| {
            let (ra, rb) = (ma.get(m), mb.get(m));
            let valid_a = ra.map(|r| r.unique_valid_cases as u64);
            let valid_b = rb.map(|r| r.unique_valid_cases as u64);
            let first_a = ra.and_then(|r| r.iterations_to_first_violation.map(|v| v as u64));
            let first_b = rb.and_then(|r| r.iterations_to_first_violation.map(|v| v as u64));
            let valid_delta = valid_a.zip(valid_b).map(|(x, y)| x as i64 - y as i64);
            let outcome = match valid_delta {
                None => Outcome::Incomparable,
                Some(d) if d > 0 => Outcome::Win,
                Some(d) if d < 0 => Outcome::Loss,
                Some(_) => Outcome::Tie,
            };
            match outcome {
                Outcome::Win => tally.wins += 1,
                Outcome::Loss => tally.losses += 1,
                Outcome::Tie => tally.ties += 1,
                Outcome::Incomparable => tally.incomparable += 1,
            }
            MissionDelta {
                mission: m.to_string(),
                valid_a,
                valid_b,
                valid_delta,
                first_violation_a: first_a,
                first_violation_b: first_b,
                first_violation_delta: first_a.zip(first_b).map(|(x, y)| x as i64 - y as i64),
                outcome,
            }
        })
        .collect();
    Comparison { rows, tally }
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

fn signed(v: Option<i64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:+}"))
}

impl Comparison {
    /// Aligned plain-text table followed by the tally line.
    pub fn to_table(&self) -> String {
        let header = [
            "mission",
            "valid_a",
            "valid_b",
            "delta",
            "first_a",
            "first_b",
            "first_delta",
            "outcome",
        ];
        let body: Vec<[String; 8]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.mission.clone(),
                    cell(r.valid_a),
                    cell(r.valid_b),
                    signed(r.valid_delta),
                    cell(r.first_violation_a),
                    cell(r.first_violation_b),
                    signed(r.first_violation_delta),
                    outcome_label(r.outcome).to_string(),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for row in &body {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        let line = |cells: &[&str], out: &mut String| {
            let parts: Vec<String> = cells
                .iter()
                .zip(widths)
                .enumerate()
                .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&header, &mut out);
        for row in &body {
            let cells: Vec<&str> = row.iter().map(String::as_str).collect();
            line(&cells, &mut out);
        }
        let t = &self.tally;
        let _ = writeln!(
            out,
            "wins {} / losses {} / ties {} / incomparable {}",
            t.wins, t.losses, t.ties, t.incomparable
        );
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("mission,valid_a,valid_b,valid_delta,first_a,first_b,first_delta,outcome\n");
        for r in &self.rows {
            let opt = |v: Option<String>| v.unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.mission,
                opt(r.valid_a.map(|v| v.to_string())),
                opt(r.valid_b.map(|v| v.to_string())),
                opt(r.valid_delta.map(|v| v.to_string())),
                opt(r.first_violation_a.map(|v| v.to_string())),
                opt(r.first_violation_b.map(|v| v.to_string())),
                opt(r.first_violation_delta.map(|v| v.to_string())),
                outcome_label(r.outcome)
            );
        }
        out
    }
}

fn outcome_label(o: Outcome) -> &'static str {
    match o {
        Outcome::Win => "win",
        Outcome::Loss => "loss",
        Outcome::Tie => "tie",
        Outcome::Incomparable => "incomparable",
    }
}

/// Median of `values`; the mean of the two middle values for even lengths.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    })
}
