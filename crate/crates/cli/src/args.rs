// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use saflite_core::oracle::SelectPolicy;
use saflite_core::seed_manager::{Strategy, UpdatePolicy};
use saflite_core::Category;

#[derive(Debug, Parser)]
#[command(name = "saflite", version, about = "Oracle-guided fuzzing for UAV autonomy software")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a fuzzing campaign and write a run directory.
    Fuzz(FuzzArgs),
    /// Rate the oracle on a labelled flight-log dataset.
    EvalLogs(EvalLogsArgs),
    /// Score one mutant batch and print the ranking.
    Score(ScoreArgs),
    /// Compare two sets of campaign reports mission by mission.
    Compare(CompareArgs),
    /// Run a guided-vs-unguided experiment over several rng seeds.
    Paired(PairedArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LlmKind {
    /// Deterministic built-in scorer.
    Mock,
    /// OpenAI-compatible endpoint from SAFLITE_LLM_URL.
    Endpoint,
    /// An oracle that never answers (pass-through selection).
    Offline,
    /// No oracle at all: the uniform baseline.
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MockKind {
    Proximity,
    Keywords,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SeedStrategy {
    Uniform,
    Roundrobin,
    Energy,
}

impl From<SeedStrategy> for Strategy {
    fn from(s: SeedStrategy) -> Self {
        match s {
            SeedStrategy::Uniform => Strategy::UniformRandom,
            SeedStrategy::Roundrobin => Strategy::RoundRobin,
            SeedStrategy::Energy => Strategy::EnergyWeighted,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Update {
    /// Replace the parent when a child scores at least as well.
    Replace,
    /// Add children scored interesting as new seeds.
    Add,
}

impl From<Update> for UpdatePolicy {
    fn from(u: Update) -> Self {
        match u {
            Update::Replace => UpdatePolicy::ReplaceParent,
            Update::Add => UpdatePolicy::AddIfInteresting,
        }
    }
}

/// `topk:K`, `floor:mid` or `floor:interesting`.
pub fn parse_select(s: &str) -> Result<SelectPolicy, String> {
    let (kind, arg) = s
        .split_once(':')
        .ok_or_else(|| format!("expected topk:K or floor:mid|interesting, got {s:?}"))?;
    match kind {
        "topk" => {
            let k: usize = arg
                .parse()
                .map_err(|_| format!("top-k needs a positive integer, got {arg:?}"))?;
            if k == 0 {
                return Err("top-k needs k >= 1".into());
            }
            Ok(SelectPolicy::TopK { k })
        }
        "floor" => {
            let min = match arg {
                "non" => Category::NonInteresting,
                "mid" => Category::MidInteresting,
                "interesting" => Category::Interesting,
                _ => return Err(format!("unknown category floor {arg:?}; use mid or interesting")),
            };
            Ok(SelectPolicy::CategoryFloor { min })
        }
        _ => Err(format!("unknown selection policy {kind:?}; use topk or floor")),
    }
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    /// Campaign config JSON (e.g. a previous run's config.json). Other flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Mission JSON file.
    #[arg(long)]
    pub mission: Option<PathBuf>,
    /// Seed scenarios, one JSON test case per line.
    #[arg(long)]
    pub seeds: Option<PathBuf>,
    /// Interestingness definition JSON; defaults to the 1.5 m separation policy.
    #[arg(long)]
    pub definition: Option<PathBuf>,
    #[arg(long, conflicts_with = "budget_secs")]
    pub budget_iters: Option<usize>,
    #[arg(long)]
    pub budget_secs: Option<f64>,
    #[arg(long)]
    pub n_mutants: Option<usize>,
    #[arg(long, value_enum)]
    pub llm: Option<LlmKind>,
    /// Mock scoring mode; defaults to proximity for scenarios, keywords for commands.
    #[arg(long, value_enum)]
    pub mock_mode: Option<MockKind>,
    /// Gaussian noise sigma added to mock scores.
    #[arg(long)]
    pub mock_noise: Option<f64>,
    #[arg(long, value_parser = parse_select)]
    pub select: Option<SelectPolicy>,
    #[arg(long, value_enum)]
    pub seed_strategy: Option<SeedStrategy>,
    #[arg(long, value_enum)]
    pub update_policy: Option<Update>,
    #[arg(long)]
    pub rng_seed: Option<u64>,
    #[arg(long)]
    pub stop_on_first_violation: bool,
    /// Run directory; created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalLogsArgs {
    /// JSON Lines of `{id, summary, label}` with label interesting|non_interesting.
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub definition: PathBuf,
    #[arg(long, value_enum, default_value = "mock")]
    pub llm: LlmKind,
    /// Print predictions and metrics as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Mutants, one JSON test case per line.
    #[arg(long)]
    pub case_batch: PathBuf,
    /// Current system state JSON.
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long)]
    pub definition: PathBuf,
    /// Mission the proximity mock measures against.
    #[arg(long)]
    pub mission: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "mock")]
    pub llm: LlmKind,
    #[arg(long, value_enum)]
    pub mock_mode: Option<MockKind>,
    #[arg(long, value_parser = parse_select, default_value = "floor:mid")]
    pub select: SelectPolicy,
    /// Also print the rendered prompt.
    #[arg(long)]
    pub show_prompt: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// A report.json, or a JSON array of reports.
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    /// Also write the delta table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PairedArgs {
    /// `{"campaign": <campaign config>, "rng_seeds": [..]}`.
    #[arg(long)]
    pub config: PathBuf,
    /// Write summary.json here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
