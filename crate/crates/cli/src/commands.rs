// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use chrono::Utc;
use saflite_core::campaign::{
    build_client, run_campaign_with, run_paired_seeds, Budget, CampaignConfig, CampaignReport, OracleConfig,
    PairedExperimentConfig, RunHooks, Target, CONFIG_FILE,
};
use saflite_core::llm::{HttpClient, LlmClient, LlmConfig, MockClient, MockMode, MockOracleConfig};
use saflite_core::metrics::{compare_campaigns, evaluate_logs, LabelledLog};
use saflite_core::oracle::{llm_agent, select, set_prompt, SelectPolicy};
use saflite_core::sut::{SafetyPolicy, SimOracle, SimParams};
use saflite_core::{CaseBody, InterestingnessDefinition, Mission, SystemState, TestCase};

use crate::args::{CompareArgs, EvalLogsArgs, FuzzArgs, LlmKind, MockKind, PairedArgs, ScoreArgs};
use crate::input;
use crate::manifest::RunManifest;

/// Iteration budget when neither a config nor a budget flag gives one.
pub const DEFAULT_ITERATIONS: usize = 100;

pub const EXIT_VIOLATIONS: u8 = 2;

fn mock_mode(kind: MockKind) -> MockMode {
    match kind {
        MockKind::Proximity => MockMode::GroundTruthProximity,
        MockKind::Keywords => MockMode::keywords(),
    }
}

fn endpoint_config() -> Result<LlmConfig> {
    LlmConfig::from_env().context("--llm endpoint needs an endpoint")
}

/// Resolves flags (and an optional base config) into a campaign config.
pub fn fuzz_config(args: &FuzzArgs) -> Result<CampaignConfig> {
    let mut config = match &args.config {
        Some(path) => input::json::<CampaignConfig>(path)?,
        None => {
            let Some(mission) = &args.mission else {
                bail!("--mission is required unless --config is given");
            };
            let Some(seeds) = &args.seeds else {
                bail!("--seeds is required unless --config is given");
            };
            CampaignConfig::scenario(
                input::json::<Mission>(mission)?,
                input::jsonl(seeds)?,
                InterestingnessDefinition::min_separation(SafetyPolicy::default().min_separation),
                OracleConfig::Mock(MockOracleConfig::new(MockMode::GroundTruthProximity)),
                Budget::Iterations(DEFAULT_ITERATIONS),
                0,
            )
        }
    };
    if args.config.is_some() && (args.mission.is_some() || args.seeds.is_some()) {
        let Target::Scenario { mission, seeds, .. } = &mut config.target else {
            bail!("--mission and --seeds only apply to scenario campaigns");
        };
        if let Some(p) = &args.mission {
            *mission = input::json(p)?;
        }
        if let Some(p) = &args.seeds {
            *seeds = input::jsonl(p)?;
        }
    }
    if let Some(p) = &args.definition {
        config.definition = input::json(p)?;
    }
    if let Some(n) = args.budget_iters {
        config.budget = Budget::Iterations(n);
    }
    if let Some(s) = args.budget_secs {
        config.budget = Budget::WallClockSecs(s);
    }
    if let Some(n) = args.n_mutants {
        config.n_mutants = n;
    }
    if let Some(p) = args.select {
        config.select_policy = p;
    }
    if let Some(s) = args.seed_strategy {
        config.strategy = s.into();
    }
    if let Some(u) = args.update_policy {
        config.update_policy = u.into();
    }
    if let Some(r) = args.rng_seed {
        config.rng_seed = r;
    }
    if args.stop_on_first_violation {
        config.stop_on_first_violation = true;
    }
    let default_mock = match config.target {
        Target::Scenario { .. } => MockKind::Proximity,
        Target::Command { .. } => MockKind::Keywords,
    };
    match args.llm {
        Some(LlmKind::Mock) => {
            config.oracle = OracleConfig::Mock(MockOracleConfig::new(mock_mode(args.mock_mode.unwrap_or(default_mock))))
        }
        Some(LlmKind::Endpoint) => config.oracle = OracleConfig::Endpoint(endpoint_config()?),
        Some(LlmKind::Offline) => config.oracle = OracleConfig::Offline,
        Some(LlmKind::None) => config.oracle = OracleConfig::Unguided,
        None => {}
    }
    if let OracleConfig::Mock(m) = &mut config.oracle {
        if args.llm.is_none() {
            if let Some(k) = args.mock_mode {
                m.mode = mock_mode(k);
            }
        }
        if let Some(sigma) = args.mock_noise {
            m.noise = sigma;
        }
    } else if args.mock_mode.is_some() || args.mock_noise.is_some() {
        bail!("--mock-mode and --mock-noise need the mock oracle");
    }
    config.validate()?;
    Ok(config)
}

fn interrupt_flag() -> Arc<AtomicBool> {
    let flag = Arc::new(AtomicBool::new(false));
    let handler = Arc::clone(&flag);
    if let Err(e) = ctrlc::set_handler(move || handler.store(true, Ordering::SeqCst)) {
        log::warn!("cannot install the interrupt handler: {e}");
    }
    flag
}

fn summary(report: &CampaignReport, out: &Path) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "campaign   {}", report.mission);
    let _ = writeln!(s, "oracle     {}", report.oracle);
    let _ = writeln!(s, "iterations {}", report.iterations_run);
    let _ = writeln!(s, "executed   {}", report.executed);
    let _ = writeln!(
        s,
        "violations {} ({} unique)",
        report.violations.len(),
        report.unique_valid_cases
    );
    match report.iterations_to_first_violation {
        Some(i) => {
            let _ = writeln!(s, "first      iteration {i}");
        }
        None => {
            let _ = writeln!(s, "first      none");
        }
    }
    if report.oracle_failures > 0 {
        let _ = writeln!(
            s,
            "oracle failures {} (batches passed through unscored)",
            report.oracle_failures
        );
    }
    if let Some(why) = &report.aborted {
        let _ = writeln!(s, "stopped    {why}");
    }
    let _ = write!(s, "run dir    {}", out.display());
    s
}

pub fn fuzz(args: &FuzzArgs) -> Result<ExitCode> {
    let config = fuzz_config(args)?;
    let started = Utc::now();
    let client = build_client(&config)?;
    let llm = client.as_ref().map_or_else(|| "unguided".to_string(), |c| c.identity());
    let hooks = RunHooks {
        baseline_sizes: None,
        cancel: Some(interrupt_flag()),
    };
    let report = run_campaign_with(&config, client.as_deref(), Some(&args.out), &hooks)?;
    let manifest = RunManifest::new(&args.out.join(CONFIG_FILE), config.rng_seed, llm, started, Utc::now())?;
    manifest.write(&args.out)?;
    println!("{}", summary(&report, &args.out));
    if report.found_violations() {
        println!("found {} violation(s)", report.violations.len());
        return Ok(ExitCode::from(EXIT_VIOLATIONS));
    }
    match report.aborted.as_deref() {
        None | Some("interrupted") => Ok(ExitCode::SUCCESS),
        Some(why) => bail!("campaign aborted: {why}"),
    }
}

pub fn eval_logs(args: &EvalLogsArgs) -> Result<ExitCode> {
    let logs: Vec<LabelledLog> = input::jsonl(&args.dataset)?;
    if logs.is_empty() {
        bail!("{}: dataset is empty", args.dataset.display());
    }
    let definition: InterestingnessDefinition = input::json(&args.definition)?;
    let client: Box<dyn LlmClient> = match args.llm {
        LlmKind::Mock => Box::new(MockClient::new(MockOracleConfig::new(MockMode::keywords()), None)?),
        LlmKind::Endpoint => Box::new(HttpClient::new(endpoint_config()?)?),
        LlmKind::Offline | LlmKind::None => bail!("eval-logs needs --llm mock or --llm endpoint"),
    };
    let eval = evaluate_logs(client.as_ref(), &definition, &logs);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&eval)?);
    } else {
        let m = eval.matrix;
        println!("model      {}", client.identity());
        println!("logs       {} ({} unanswered)", logs.len(), eval.failures);
        println!("tp {}  fp {}  fn {}  tn {}", m.tp, m.fp, m.fn_, m.tn);
        print!("{}", eval.metrics.to_table());
    }
    if eval.failures == logs.len() {
        bail!("the oracle answered none of the {} logs", logs.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn truncate(s: &str, n: usize) -> String {
    let one_line = s.split_whitespace().collect::<Vec<_>>().join(" ");
    if one_line.chars().count() <= n {
        one_line
    } else {
        let mut t: String = one_line.chars().take(n.saturating_sub(3)).collect();
        t.push_str("...");
        t
    }
}

pub fn score(args: &ScoreArgs) -> Result<ExitCode> {
    let batch: Vec<TestCase> = input::jsonl(&args.case_batch)?;
    if batch.is_empty() {
        bail!("{}: batch is empty", args.case_batch.display());
    }
    let state: SystemState = input::json(&args.state)?;
    let definition: InterestingnessDefinition = input::json(&args.definition)?;
    let client: Box<dyn LlmClient> = match args.llm {
        LlmKind::Mock => {
            let scenarios = batch.iter().all(|c| matches!(c.body, CaseBody::Scenario(_)));
            let kind = args.mock_mode.unwrap_or(if scenarios {
                MockKind::Proximity
            } else {
                MockKind::Keywords
            });
            let truth = match (&args.mission, kind) {
                (Some(p), _) => Some(SimOracle::new(&input::json::<Mission>(p)?, &SimParams::default())),
                (None, MockKind::Proximity) => bail!("the proximity mock needs --mission"),
                (None, MockKind::Keywords) => None,
            };
            Box::new(MockClient::new(MockOracleConfig::new(mock_mode(kind)), truth)?)
        }
        LlmKind::Endpoint => Box::new(HttpClient::new(endpoint_config()?)?),
        LlmKind::Offline | LlmKind::None => bail!("score needs --llm mock or --llm endpoint"),
    };
    let prompt = set_prompt(&definition, &state, &batch)?;
    if args.show_prompt {
        println!("--- system\n{}\n--- user\n{}\n---", prompt.system, prompt.user);
    }
    let call = llm_agent(client.as_ref(), &prompt);
    let scored = call.outcome.context("oracle call failed")?;
    let chosen: Vec<String> = select(scored.clone(), args.select)
        .iter()
        .map(|m| m.case.id.to_string())
        .collect();
    let ranked = select(scored, SelectPolicy::TopK { k: batch.len() });
    println!(
        "{:<4}  {:<16}  {:>5}  {:<15}  {:<8}  rationale",
        "rank", "case", "score", "category", "selected"
    );
    for (i, m) in ranked.iter().enumerate() {
        let score = m.score.map_or_else(|| "-".to_string(), |s| s.to_string());
        let category = m.category.map_or("-", |c| c.label());
        let flag = if m.defaulted { "*" } else { "" };
        let selected = if chosen.contains(&m.case.id.to_string()) {
            "yes"
        } else {
            "no"
        };
        println!(
            "{:<4}  {:<16}  {:>5}  {:<15}  {:<8}  {}",
            i + 1,
            m.case.id.as_str(),
            format!("{score}{flag}"),
            category,
            selected,
            truncate(&m.rationale, 72)
        );
    }
    if ranked.iter().any(|m| m.defaulted) {
        println!("* no score in the answer; neutral default used");
    }
    Ok(ExitCode::SUCCESS)
}

/// A single report or an array of them.
fn reports(path: &Path) -> Result<Vec<CampaignReport>> {
    let value: serde_json::Value = input::json(path)?;
    let parsed = if value.is_array() {
        serde_json::from_value(value)
    } else {
        serde_json::from_value(value).map(|r| vec![r])
    };
    parsed.with_context(|| format!("{} is not a campaign report", path.display()))
}

pub fn compare(args: &CompareArgs) -> Result<ExitCode> {
    let comparison = compare_campaigns(&reports(&args.a)?, &reports(&args.b)?);
    print!("{}", comparison.to_table());
    if let Some(p) = &args.csv {
        fs::write(p, comparison.to_csv()).with_context(|| format!("cannot write {}", p.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

pub fn paired(args: &PairedArgs) -> Result<ExitCode> {
    let experiment: PairedExperimentConfig = input::json(&args.config)?;
    let summary = run_paired_seeds(&experiment)?;
    print!("{}", summary.to_table());
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let p = dir.join("summary.json");
        let mut text = serde_json::to_string_pretty(&summary)?;
        text.push('\n');
        fs::write(&p, text).with_context(|| format!("cannot write {}", p.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}
