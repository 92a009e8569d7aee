// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! Guided-versus-unguided experiments.
//!
//! The guided arm runs first. The unguided arm then runs from the same
//! `rng_seed` and, in every iteration, executes a uniform random subset of
//! its mutants as large as the guided arm's selection in that iteration, so
//! both arms spend the same number of executions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::run::{build_client, run_campaign_with, RunHooks};
use super::{Budget, CampaignConfig, CampaignError, CampaignReport, OracleConfig};
use crate::metrics::median;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedReport {
    pub guided: CampaignReport,
    pub baseline: CampaignReport,
    /// Guided minus baseline unique valid cases.
    pub valid_delta: i64,
    /// Guided minus baseline iterations to first violation, when both found one.
    pub first_violation_delta: Option<i64>,
}

fn check_pair(guided: &CampaignConfig, baseline: &CampaignConfig) -> Result<(), CampaignError> {
    let mismatch = |what: &str| Err(CampaignError::Config(format!("paired arms differ in {what}")));
    if !baseline.oracle.is_unguided() {
        return Err(CampaignError::Config("the baseline arm must be unguided".into()));
    }
    if guided.budget != baseline.budget {
        return mismatch("budget");
    }
    if guided.rng_seed != baseline.rng_seed {
        return mismatch("rng_seed");
    }
    if guided.n_mutants != baseline.n_mutants {
        return mismatch("n_mutants");
    }
    if guided.target != baseline.target {
        return mismatch("target");
    }
    Ok(())
}

/// Runs one guided/unguided pair.
pub fn run_paired_experiment(
    guided: &CampaignConfig,
    baseline: &CampaignConfig,
) -> Result<PairedReport, CampaignError> {
    guided.validate()?;
    baseline.validate()?;
    check_pair(guided, baseline)?;
    let client = build_client(guided)?;
    let g = run_campaign_with(guided, client.as_deref(), None, &RunHooks::default())?;
    let hooks = RunHooks {
        baseline_sizes: Some(g.selected_per_iteration.clone()),
        cancel: None,
    };
    let b = run_campaign_with(baseline, None, None, &hooks)?;
    let first_violation_delta = g
        .iterations_to_first_violation
        .zip(b.iterations_to_first_violation)
        .map(|(x, y)| x as i64 - y as i64);
    Ok(PairedReport {
        valid_delta: g.unique_valid_cases as i64 - b.unique_valid_cases as i64,
        first_violation_delta,
        guided: g,
        baseline: b,
    })
}

/// A guided campaign replayed over several seeds against its unguided twin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedExperimentConfig {
    pub campaign: CampaignConfig,
    pub rng_seeds: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub rng_seed: u64,
    pub guided_valid: usize,
    pub baseline_valid: usize,
    pub guided_first: Option<usize>,
    pub baseline_first: Option<usize>,
    pub valid_delta: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedSummary {
    pub mission: String,
    pub pairs: Vec<PairRow>,
    /// Pairs where the guided arm found at least as many unique valid cases.
    pub guided_at_least_as_many: usize,
    pub guided_strictly_more: usize,
    /// Medians of iterations to first violation; a run that never violated
    /// counts as `budget + 1`.
    pub median_first_guided: f64,
    pub median_first_baseline: f64,
    pub median_first_ratio: f64,
}

impl PairedSummary {
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:>12}  {:>12}  {:>14}  {:>12}  {:>14}  {:>6}\n",
            "rng_seed", "guided_valid", "baseline_valid", "guided_first", "baseline_first", "delta"
        );
        let cell = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |x| x.to_string());
        for r in &self.pairs {
            out.push_str(&format!(
                "{:>12}  {:>12}  {:>14}  {:>12}  {:>14}  {:>+6}\n",
                r.rng_seed,
                r.guided_valid,
                r.baseline_valid,
                cell(r.guided_first),
                cell(r.baseline_first),
                r.valid_delta
            ));
        }
        out.push_str(&format!(
            "guided >= baseline in {}/{} pairs, > in {}/{}; median first violation {} vs {} (ratio {:.3})\n",
            self.guided_at_least_as_many,
            self.pairs.len(),
            self.guided_strictly_more,
            self.pairs.len(),
            self.median_first_guided,
            self.median_first_baseline,
            self.median_first_ratio
        ));
        out
    }
}

/// Runs one pair per seed (in parallel) and summarizes.
pub fn run_paired_seeds(experiment: &PairedExperimentConfig) -> Result<PairedSummary, CampaignError> {
    if experiment.rng_seeds.is_empty() {
        return Err(CampaignError::Config("no rng seeds given".into()));
    }
    let Budget::Iterations(budget) = experiment.campaign.budget else {
        return Err(CampaignError::Config(
            "paired experiments need an iteration budget".into(),
        ));
    };
    let reports: Vec<PairedReport> = experiment
        .rng_seeds
        .par_iter()
        .map(|&seed| {
            let guided = CampaignConfig {
                rng_seed: seed,
                ..experiment.campaign.clone()
            };
            let baseline = CampaignConfig {
                oracle: OracleConfig::Unguided,
                ..guided.clone()
            };
            run_paired_experiment(&guided, &baseline)
        })
        .collect::<Result<_, _>>()?;
    let pairs: Vec<PairRow> = experiment
        .rng_seeds
        .iter()
        .zip(&reports)
        .map(|(&rng_seed, r)| PairRow {
            rng_seed,
            guided_valid: r.guided.unique_valid_cases,
            baseline_valid: r.baseline.unique_valid_cases,
            guided_first: r.guided.iterations_to_first_violation,
            baseline_first: r.baseline.iterations_to_first_violation,
            valid_delta: r.valid_delta,
        })
        .collect();
    let censored = |v: Option<usize>| v.unwrap_or(budget + 1) as f64;
    let mg = median(&pairs.iter().map(|p| censored(p.guided_first)).collect::<Vec<_>>()).expect("non-empty");
    let mb = median(&pairs.iter().map(|p| censored(p.baseline_first)).collect::<Vec<_>>()).expect("non-empty");
    Ok(PairedSummary {
        mission: experiment.campaign.campaign_name(),
        guided_at_least_as_many: pairs.iter().filter(|p| p.guided_valid >= p.baseline_valid).count(),
        guided_strictly_more: pairs.iter().filter(|p| p.guided_valid > p.baseline_valid).count(),
        pairs,
        median_first_guided: mg,
        median_first_baseline: mb,
        median_first_ratio: mg / mb,
    })
}
