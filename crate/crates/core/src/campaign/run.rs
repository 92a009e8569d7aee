// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

use std::collections::{HashMap, HashSet};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use rand::seq::index;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    Budget, CampaignConfig, CampaignError, CampaignReport, OracleConfig, Target, VerdictRecord, ViolationRecord,
};
use crate::llm::{HttpClient, LlmClient, MockClient, MockOracleConfig, OfflineClient};
use crate::model::{CaseIdAllocator, CaseLimits, CommandCatalog, Score, SystemState, TestCase, Verdict};
use crate::mutation::{mutate, MutationContext, MutationError};
use crate::oracle::{categorize, llm_agent, select, set_prompt, OracleError, ScoredMutant};
use crate::rng;
use crate::seed_manager::SeedPool;
use crate::sut::{self, SimOracle, Trajectory};

pub const CONFIG_FILE: &str = "config.json";
pub const CASES_DIR: &str = "cases";
pub const TRAJECTORIES_DIR: &str = "trajectories";
pub const VERDICTS_FILE: &str = "verdicts.jsonl";
pub const AUDIT_FILE: &str = "oracle_audit.jsonl";
pub const POOL_FILE: &str = "pool.jsonl";
pub const REPORT_FILE: &str = "report.json";

/// Optional knobs that are not part of the persisted configuration.
#[derive(Clone, Debug, Default)]
pub struct RunHooks {
    /// Unguided runs only: per-iteration number of mutants to execute,
    /// drawn uniformly without replacement. Missing entries mean all.
    pub baseline_sizes: Option<Vec<usize>>,
    /// Checked before every iteration; when set the run stops and is
    /// reported as interrupted.
    pub cancel: Option<Arc<AtomicBool>>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CampaignError + '_ {
    move |source| CampaignError::Io {
        path: path.to_path_buf(),
        source,
    }
}

struct RunDir {
    root: PathBuf,
    verdicts: BufWriter<File>,
    audit: BufWriter<File>,
    pool: BufWriter<File>,
}

impl RunDir {
    fn create(root: &Path, config: &CampaignConfig) -> Result<Self, CampaignError> {
        for dir in [root.to_path_buf(), root.join(CASES_DIR), root.join(TRAJECTORIES_DIR)] {
            fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        }
        let open = |name: &str| -> Result<BufWriter<File>, CampaignError> {
            let p = root.join(name);
            File::create(&p).map(BufWriter::new).map_err(io_err(&p))
        };
        let dir = Self {
            root: root.to_path_buf(),
            verdicts: open(VERDICTS_FILE)?,
            audit: open(AUDIT_FILE)?,
            pool: open(POOL_FILE)?,
        };
        dir.write_json(CONFIG_FILE, config)?;
        Ok(dir)
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CampaignError> {
        let p = self.root.join(name);
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        fs::write(&p, text).map_err(io_err(&p))
    }

    fn write_text(&self, name: &str, text: &str) -> Result<(), CampaignError> {
        let p = self.root.join(name);
        fs::write(&p, text).map_err(io_err(&p))
    }

    fn line<T: Serialize>(w: &mut BufWriter<File>, root: &Path, name: &str, value: &T) -> Result<(), CampaignError> {
        let p = root.join(name);
        serde_json::to_writer(&mut *w, value).map_err(|e| CampaignError::Io {
            path: p.clone(),
            source: e.into(),
        })?;
        w.write_all(b"\n").map_err(io_err(&p))
    }

    fn flush(&mut self) -> Result<(), CampaignError> {
        for (w, name) in [
            (&mut self.verdicts, VERDICTS_FILE),
            (&mut self.audit, AUDIT_FILE),
            (&mut self.pool, POOL_FILE),
        ] {
            w.flush().map_err(io_err(&self.root.join(name)))?;
        }
        Ok(())
    }
}

/// Builds the oracle client a configuration asks for; `None` when unguided.
pub fn build_client(config: &CampaignConfig) -> Result<Option<Box<dyn LlmClient>>, CampaignError> {
    Ok(match &config.oracle {
        OracleConfig::Unguided => None,
        OracleConfig::Offline => Some(Box::new(OfflineClient)),
        OracleConfig::Endpoint(c) => Some(Box::new(HttpClient::new(c.clone())?)),
        OracleConfig::Mock(m) => {
            let ground_truth = match &config.target {
                Target::Scenario { mission, sim, .. } => Some(SimOracle::new(mission, sim)),
                Target::Command { .. } => None,
            };
            let mock = MockOracleConfig {
                rng_seed: config.rng_seed,
                ..m.clone()
            };
            Some(Box::new(MockClient::new(mock, ground_truth)?))
        }
    })
}

/// Builds the configured oracle and runs the campaign. Artifacts are written
/// under `out` when given.
pub fn run_campaign(config: &CampaignConfig, out: Option<&Path>) -> Result<CampaignReport, CampaignError> {
    config.validate()?;
    let client = build_client(config)?;
    run_campaign_with(config, client.as_deref(), out, &RunHooks::default())
}

fn execute(target: &Target, case: &TestCase) -> (Verdict, Option<Trajectory>) {
    match target {
        Target::Scenario {
            mission, sim, safety, ..
        } => match sut::run(mission, case, sim) {
            Ok(run) => (sut::check(&run.trajectory, case, safety), Some(run.trajectory)),
            Err(e) => (Verdict::ExecError { message: e.to_string() }, None),
        },
        Target::Command { script, .. } => match case.body.as_command() {
            Some(c) => (sut::stub_execute(c, script), None),
            None => (
                Verdict::ExecError {
                    message: format!("case {} is not a command", case.id),
                },
                None,
            ),
        },
    }
}

fn current_state(target: &Target, parent: &TestCase) -> SystemState {
    match target {
        Target::Scenario { mission, sim, .. } => sut::snapshot_state(mission, parent.obstacles(), &[], sim),
        Target::Command { context, .. } => sut::scripted_state(context),
    }
}

fn budget_spent(budget: Budget, done: usize, started: Instant) -> bool {
    match budget {
        Budget::Iterations(n) => done >= n,
        Budget::WallClockSecs(s) => started.elapsed().as_secs_f64() >= s,
    }
}

/// Runs the loop with an explicit client (`None` for unguided).
///
/// Per iteration: pick a seed, mutate `n_mutants` distinct mutants, score
/// and select them (or pass through when unguided or the oracle fails),
/// execute the selection in parallel, record violations and feed passing
/// cases back to the pool. Results are joined in batch order, so a
/// deterministic client makes the whole run deterministic.
pub fn run_campaign_with(
    config: &CampaignConfig,
    client: Option<&dyn LlmClient>,
    out: Option<&Path>,
    hooks: &RunHooks,
) -> Result<CampaignReport, CampaignError> {
    config.validate()?;
    let mut dir = out.map(|p| RunDir::create(p, config)).transpose()?;
    let ops = config.resolved_ops();
    let builtin = CommandCatalog::builtin();
    let default_limits = CaseLimits::default();
    let (limits, catalog) = match &config.target {
        Target::Scenario { limits, .. } => (limits, &builtin),
        Target::Command { catalog, .. } => (&default_limits, catalog),
    };
    let ctx = MutationContext {
        ops: &ops,
        limits,
        catalog,
    };
    let mut pool = SeedPool::init(config.target.seeds().to_vec(), config.pool_capacity)
        .map_err(|e| CampaignError::Config(e.to_string()))?;
    let mut select_rng = rng::stream(config.rng_seed, rng::SEED_SELECT);
    let mut mutation_rng = rng::stream(config.rng_seed, rng::MUTATION);
    let mut subset_rng = rng::stream(config.rng_seed, rng::BASELINE_SUBSET);
    let mut ids = CaseIdAllocator::default();
    let mut cache: HashMap<String, Score> = HashMap::new();
    let mut unique: HashSet<String> = HashSet::new();
    let n = config.n_mutants;

    let mut report = CampaignReport {
        mission: config.campaign_name(),
        oracle: client.map_or_else(|| "unguided".to_string(), |c| c.identity()),
        audit_log: (client.is_some() && out.is_some()).then(|| AUDIT_FILE.to_string()),
        ..CampaignReport::default()
    };
    let started = Instant::now();
    let mut iteration = 0;
    'campaign: while !budget_spent(config.budget, iteration, started) {
        if hooks.cancel.as_ref().is_some_and(|c| c.load(Ordering::Relaxed)) {
            report.aborted = Some("interrupted".into());
            break;
        }
        iteration += 1;
        let (parent, parent_case) = {
            let s = pool.select(config.strategy, &mut select_rng);
            (s.key, s.case.clone())
        };
        let mutants = match mutate(&parent_case, n, &ctx, &mut mutation_rng, &mut ids) {
            Ok(m) => m,
            Err(e @ (MutationError::Exhausted { .. } | MutationError::Incompatible)) => {
                log::warn!("iteration {iteration}: {e}; skipping");
                report.skipped_iterations += 1;
                report.selected_per_iteration.push(0);
                report.iterations_run = iteration;
                continue;
            }
            Err(e) => return Err(CampaignError::Config(e.to_string())),
        };

        let selected: Vec<ScoredMutant> = match client {
            None => {
                let size = hooks
                    .baseline_sizes
                    .as_ref()
                    .and_then(|s| s.get(iteration - 1).copied())
                    .unwrap_or(n)
                    .min(n);
                if size >= n {
                    mutants.into_iter().map(ScoredMutant::unscored).collect()
                } else {
                    let mut picks = index::sample(&mut subset_rng, n, size).into_vec();
                    picks.sort_unstable();
                    picks
                        .into_iter()
                        .map(|i| ScoredMutant::unscored(mutants[i].clone()))
                        .collect()
                }
            }
            Some(client) => {
                let cached: Option<Vec<Score>> = config
                    .cache_scores
                    .then(|| {
                        mutants
                            .iter()
                            .map(|m| cache.get(&m.body.canonical()).copied())
                            .collect()
                    })
                    .flatten();
                let scored = match cached {
                    Some(scores) => Ok(mutants
                        .iter()
                        .zip(scores)
                        .map(|(m, s)| ScoredMutant {
                            case: m.clone(),
                            score: Some(s),
                            category: Some(categorize(s)),
                            rationale: "cached".into(),
                            defaulted: false,
                        })
                        .collect()),
                    None => {
                        let state = current_state(&config.target, &parent_case);
                        let prompt = set_prompt(&config.definition, &state, &mutants)
                            .map_err(|e| CampaignError::Config(e.to_string()))?;
                        let mut call = llm_agent(client, &prompt);
                        call.audit.iteration = Some(iteration);
                        if let Some(d) = dir.as_mut() {
                            RunDir::line(&mut d.audit, &d.root, AUDIT_FILE, &call.audit)?;
                        }
                        call.outcome
                    }
                };
                match scored {
                    Ok(scored) => {
                        for s in &scored {
                            if let (Some(score), Some(cat)) = (s.score, s.category) {
                                report.category_histogram.add(cat);
                                if config.cache_scores && !s.defaulted {
                                    cache.insert(s.case.body.canonical(), score);
                                }
                            }
                            report.defaulted_scores += usize::from(s.defaulted);
                        }
                        select(scored, config.select_policy)
                    }
                    Err(OracleError::Prompt(e)) => return Err(CampaignError::Config(e.to_string())),
                    Err(e) => {
                        log::warn!("iteration {iteration}: {e}; passing the batch through unscored");
                        report.oracle_failures += 1;
                        mutants.into_iter().map(ScoredMutant::unscored).collect()
                    }
                }
            }
        };
        report.selected_per_iteration.push(selected.len());
        report.unscored += selected.iter().filter(|s| s.score.is_none()).count();

        let results: Vec<(Verdict, Option<Trajectory>)> =
            selected.par_iter().map(|s| execute(&config.target, &s.case)).collect();

        let mut stop = false;
        for (s, (verdict, trajectory)) in selected.iter().zip(results) {
            report.executed += 1;
            if let Some(d) = dir.as_mut() {
                d.write_json(&format!("{CASES_DIR}/{}.json", s.case.id), &s.case)?;
                if let Some(t) = &trajectory {
                    d.write_text(&format!("{TRAJECTORIES_DIR}/{}.csv", s.case.id), &t.to_csv())?;
                }
                let record = VerdictRecord {
                    iteration,
                    case_id: s.case.id.clone(),
                    score: s.score,
                    verdict: verdict.clone(),
                };
                RunDir::line(&mut d.verdicts, &d.root, VERDICTS_FILE, &record)?;
            }
            match verdict {
                Verdict::ExecError { message } => {
                    log::error!("case {}: {message}", s.case.id);
                    report.aborted = Some(format!("case {}: {message}", s.case.id));
                    report.iterations_run = iteration;
                    break 'campaign;
                }
                Verdict::Violation { .. } => {
                    unique.insert(s.case.body.canonical());
                    report.iterations_to_first_violation.get_or_insert(iteration);
                    report.violations.push(ViolationRecord {
                        iteration,
                        case: s.case.clone(),
                        verdict,
                        score: s.score,
                    });
                    stop |= config.stop_on_first_violation;
                }
                Verdict::Pass => {
                    pool.update(parent, &s.case, s.score, &verdict, config.update_policy);
                }
            }
        }
        if let Some(d) = dir.as_mut() {
            RunDir::line(&mut d.pool, &d.root, POOL_FILE, &pool.snapshot(iteration as u64))?;
        }
        report.iterations_run = iteration;
        if stop {
            break;
        }
    }
    report.unique_valid_cases = unique.len();
    if let Some(d) = dir.as_mut() {
        d.flush()?;
        d.write_json(REPORT_FILE, &report)?;
    }
    Ok(report)
}
