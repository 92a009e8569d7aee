// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::model::{CaseId, Category, Score, TestCase, Verdict};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryHistogram {
    pub non_interesting: usize,
    pub mid_interesting: usize,
    pub interesting: usize,
}

impl CategoryHistogram {
    pub fn add(&mut self, c: Category) {
        match c {
            Category::NonInteresting => self.non_interesting += 1,
            Category::MidInteresting => self.mid_interesting += 1,
            Category::Interesting => self.interesting += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.non_interesting + self.mid_interesting + self.interesting
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationRecord {
    /// 1-based iteration that produced the case.
    pub iteration: usize,
    pub case: TestCase,
    pub verdict: Verdict,
    pub score: Option<Score>,
}

/// One line of `verdicts.jsonl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub iteration: usize,
    pub case_id: CaseId,
    pub score: Option<Score>,
    pub verdict: Verdict,
}

/// Campaign summary. Holds no timestamps or latencies so that mock-oracle
/// runs serialize byte-identically.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub mission: String,
    /// Oracle identity: model name, `mock:<mode>`, `offline` or `unguided`.
    pub oracle: String,
    pub iterations_run: usize,
    pub executed: usize,
    pub violations: Vec<ViolationRecord>,
    /// Distinct violating case bodies.
    pub unique_valid_cases: usize,
    /// Categories of every mutant the oracle scored.
    pub category_histogram: CategoryHistogram,
    /// Executed mutants that carried no score (oracle unavailable or unguided).
    pub unscored: usize,
    pub defaulted_scores: usize,
    pub oracle_failures: usize,
    /// Iterations where mutation could not produce a full batch.
    pub skipped_iterations: usize,
    pub selected_per_iteration: Vec<usize>,
    pub iterations_to_first_violation: Option<usize>,
    /// Why the run stopped early, if it did.
    pub aborted: Option<String>,
    /// Audit log path relative to the run directory.
    pub audit_log: Option<String>,
}

impl CampaignReport {
    pub fn found_violations(&self) -> bool {
        !self.violations.is_empty()
    }
}
