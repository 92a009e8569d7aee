// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! Campaign orchestration: the select / mutate / score / execute / update
//! loop, run-directory artifacts, and guided-versus-unguided experiments.

mod config;
mod paired;
mod report;
mod run;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{Budget, CampaignConfig, OracleConfig, Target};
pub use paired::{
    run_paired_experiment, run_paired_seeds, PairRow, PairedExperimentConfig, PairedReport, PairedSummary,
};
pub use report::{CampaignReport, CategoryHistogram, VerdictRecord, ViolationRecord};
pub use run::{
    build_client, run_campaign, run_campaign_with, RunHooks, AUDIT_FILE, CASES_DIR, CONFIG_FILE, POOL_FILE,
    REPORT_FILE, TRAJECTORIES_DIR, VERDICTS_FILE,
};

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("invalid campaign configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Llm(#[from] crate::llm::LlmError),
}
