// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::CampaignError;
use crate::llm::{LlmConfig, MockMode, MockOracleConfig};
use crate::model::{validate, CaseBody, CaseLimits, CommandCatalog, InterestingnessDefinition, Mission, TestCase};
use crate::mutation::{default_command_ops, default_scenario_ops, MutationOp};
use crate::oracle::SelectPolicy;
use crate::seed_manager::{Strategy, UpdatePolicy};
use crate::sut::{SafetyPolicy, ScriptedOutcome, SimParams};

/// What the campaign fuzzes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    /// Obstacle scenarios flown by the built-in simulator.
    Scenario {
        mission: Mission,
        seeds: Vec<TestCase>,
        #[serde(default)]
        sim: SimParams,
        #[serde(default)]
        safety: SafetyPolicy,
        #[serde(default)]
        limits: CaseLimits,
    },
    /// Commands and parameters executed against a scripted flight stack.
    Command {
        #[serde(default = "CommandCatalog::builtin")]
        catalog: CommandCatalog,
        script: ScriptedOutcome,
        seeds: Vec<TestCase>,
        /// Scripted current-state text, e.g. `"Flight Mode: MISSION; RC 3 1900"`.
        #[serde(default)]
        context: String,
    },
}

impl Target {
    pub fn seeds(&self) -> &[TestCase] {
        match self {
            Target::Scenario { seeds, .. } | Target::Command { seeds, .. } => seeds,
        }
    }

    pub fn default_ops(&self) -> Vec<MutationOp> {
        match self {
            Target::Scenario { .. } => default_scenario_ops(),
            Target::Command { .. } => default_command_ops(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    Iterations(usize),
    WallClockSecs(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleConfig {
    /// Deterministic mock. Its noise stream is derived from the campaign
    /// `rng_seed`; the mock's own `rng_seed` field is ignored here.
    Mock(MockOracleConfig),
    /// OpenAI-compatible chat-completion endpoint.
    Endpoint(LlmConfig),
    /// A client that always times out; every round degrades to pass-through.
    Offline,
    /// No oracle: every mutant (or a uniform subset in paired runs) is executed.
    Unguided,
}

impl OracleConfig {
    pub fn is_unguided(&self) -> bool {
        matches!(self, OracleConfig::Unguided)
    }
}

fn default_n_mutants() -> usize {
    5
}

fn default_capacity() -> usize {
    64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    /// Report key; defaults to the mission name or `command:<mode>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub target: Target,
    pub definition: InterestingnessDefinition,
    pub budget: Budget,
    #[serde(default = "default_n_mutants")]
    pub n_mutants: usize,
    #[serde(default)]
    pub strategy: Strategy,
    #[serde(default)]
    pub select_policy: SelectPolicy,
    #[serde(default)]
    pub update_policy: UpdatePolicy,
    #[serde(default = "default_capacity")]
    pub pool_capacity: usize,
    pub oracle: OracleConfig,
    /// Mutation operators; the target's defaults when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ops: Option<Vec<MutationOp>>,
    #[serde(default)]
    pub stop_on_first_violation: bool,
    /// Reuse scores of previously seen bodies instead of re-querying.
    #[serde(default)]
    pub cache_scores: bool,
    pub rng_seed: u64,
}

impl CampaignConfig {
    /// A scenario campaign with defaults everywhere else.
    pub fn scenario(
        mission: Mission,
        seeds: Vec<TestCase>,
        definition: InterestingnessDefinition,
        oracle: OracleConfig,
        budget: Budget,
        rng_seed: u64,
    ) -> Self {
        Self {
            name: None,
            target: Target::Scenario {
                mission,
                seeds,
                sim: SimParams::default(),
                safety: SafetyPolicy::default(),
                limits: CaseLimits::default(),
            },
            definition,
            budget,
            n_mutants: default_n_mutants(),
            strategy: Strategy::default(),
            select_policy: SelectPolicy::default(),
            update_policy: UpdatePolicy::default(),
            pool_capacity: default_capacity(),
            oracle,
            ops: None,
            stop_on_first_violation: false,
            cache_scores: false,
            rng_seed,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn campaign_name(&self) -> String {
        if let Some(n) = &self.name {
            return n.clone();
        }
        match &self.target {
            Target::Scenario { mission, .. } => mission.name().to_string(),
            Target::Command { script, .. } => format!("command:{}", script.mode),
        }
    }

    pub fn resolved_ops(&self) -> Vec<MutationOp> {
        self.ops.clone().unwrap_or_else(|| self.target.default_ops())
    }

    pub fn validate(&self) -> Result<(), CampaignError> {
        let bad = |m: String| Err(CampaignError::Config(m));
        if self.n_mutants == 0 {
            return bad("n_mutants must be at least 1".into());
        }
        match self.budget {
            Budget::Iterations(0) => return bad("iteration budget must be positive".into()),
            Budget::WallClockSecs(s) if !(s > 0.0 && s.is_finite()) => {
                return bad("wall-clock budget must be positive".into())
            }
            _ => {}
        }
        if let SelectPolicy::TopK { k: 0 } = self.select_policy {
            return bad("top-k selection needs k >= 1".into());
        }
        let seeds = self.target.seeds();
        if seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if seeds.len() > self.pool_capacity {
            return bad(format!(
                "{} seeds exceed pool capacity {}",
                seeds.len(),
                self.pool_capacity
            ));
        }
        let builtin;
        let (limits, catalog, scenario) = match &self.target {
            Target::Scenario {
                sim, safety, limits, ..
            } => {
                sim.validate(safety).map_err(|e| CampaignError::Config(e.to_string()))?;
                builtin = CommandCatalog::builtin();
                (limits.clone(), &builtin, true)
            }
            Target::Command { catalog, .. } => (CaseLimits::default(), catalog, false),
        };
        for s in seeds {
            if matches!(s.body, CaseBody::Scenario(_)) != scenario {
                return bad(format!("seed {} does not match the target kind", s.id));
            }
            if let Err(v) = validate(s, &limits, catalog) {
                let msgs: Vec<String> = v.iter().map(ToString::to_string).collect();
                return bad(format!("seed {}: {}", s.id, msgs.join("; ")));
            }
        }
        if self.resolved_ops().iter().all(|op| op.targets_scenarios() != scenario) {
            return bad("no mutation operator applies to the target kind".into());
        }
        match &self.oracle {
            OracleConfig::Mock(m) => {
                if matches!(m.mode, MockMode::GroundTruthProximity) && !scenario {
                    return bad("the proximity mock needs a scenario target".into());
                }
                if let MockMode::FixedScores { scores } = &m.mode {
                    if scores.len() != self.n_mutants {
                        return bad(format!(
                            "fixed-score mock has {} scores for batches of {}",
                            scores.len(),
                            self.n_mutants
                        ));
                    }
                }
            }
            OracleConfig::Endpoint(c) => c.validate()?,
            OracleConfig::Offline | OracleConfig::Unguided => {}
        }
        Ok(())
    }
}
