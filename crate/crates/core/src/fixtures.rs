// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! Bundled fixture data: a mission, seed corpora, definitions, scripted
//! command targets, recorded model answers and a labelled log dataset.
//! The same files live under `crates/core/fixtures/` for use from the CLI.

use serde::Deserialize;

use crate::model::{InterestingnessDefinition, Mission, SystemState, TestCase};
use crate::sut::ScriptedOutcome;

pub const MISSION_THREE_WAYPOINT: &str = include_str!("../fixtures/mission_three_waypoint.json");
pub const SCENARIO_SEEDS: &str = include_str!("../fixtures/scenario_seeds.jsonl");
pub const COMMAND_SEEDS: &str = include_str!("../fixtures/command_seeds.jsonl");
pub const BATCH_FIVE_MUTANTS: &str = include_str!("../fixtures/batch_five_mutants.jsonl");
pub const STATE_MISSION_START: &str = include_str!("../fixtures/state_mission_start.json");
pub const DEFINITION_MIN_SEPARATION: &str = include_str!("../fixtures/definition_min_separation.json");
pub const DEFINITION_PARACHUTE: &str = include_str!("../fixtures/definition_parachute.json");
pub const DEFINITION_FLIP: &str = include_str!("../fixtures/definition_flip.json");
pub const DEFINITION_FLIGHT_LOG: &str = include_str!("../fixtures/definition_flight_log.json");
pub const SCRIPT_PARACHUTE_ACRO: &str = include_str!("../fixtures/script_parachute_acro.json");
pub const SCRIPT_FLIP_BUG: &str = include_str!("../fixtures/script_flip_bug.json");
pub const ANALYSIS_RESPONSES: &str = include_str!("../fixtures/analysis_responses.json");
pub const BUG_CONTEXTS: &str = include_str!("../fixtures/bug_contexts.json");
pub const EVAL_LOGS: &str = include_str!("../fixtures/eval_logs.jsonl");

/// Parses JSON Lines, skipping blank lines. Errors carry the 1-based line.
pub fn parse_jsonl<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>, (usize, serde_json::Error)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| (i + 1, e)))
        .collect()
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> T {
    serde_json::from_str(text).expect("bundled fixture parses")
}

fn parse_lines<T: for<'de> Deserialize<'de>>(text: &str) -> Vec<T> {
    parse_jsonl(text).expect("bundled fixture parses")
}

pub fn mission() -> Mission {
    parse(MISSION_THREE_WAYPOINT)
}

pub fn scenario_seeds() -> Vec<TestCase> {
    parse_lines(SCENARIO_SEEDS)
}

pub fn command_seeds() -> Vec<TestCase> {
    parse_lines(COMMAND_SEEDS)
}

pub fn batch_five_mutants() -> Vec<TestCase> {
    parse_lines(BATCH_FIVE_MUTANTS)
}

pub fn state_mission_start() -> SystemState {
    parse(STATE_MISSION_START)
}

pub fn min_separation_definition() -> InterestingnessDefinition {
    parse(DEFINITION_MIN_SEPARATION)
}

pub fn parachute_definition() -> InterestingnessDefinition {
    parse(DEFINITION_PARACHUTE)
}

pub fn flip_definition() -> InterestingnessDefinition {
    parse(DEFINITION_FLIP)
}

pub fn flight_log_definition() -> InterestingnessDefinition {
    parse(DEFINITION_FLIGHT_LOG)
}

pub fn parachute_acro_script() -> ScriptedOutcome {
    parse(SCRIPT_PARACHUTE_ACRO)
}

pub fn flip_bug_script() -> ScriptedOutcome {
    parse(SCRIPT_FLIP_BUG)
}

/// A recorded model answer for one command test case.
#[derive(Clone, Debug, Deserialize)]
pub struct RecordedResponse {
    pub test_case: String,
    pub response: String,
    pub expected_score: u8,
}

pub fn analysis_responses() -> Vec<RecordedResponse> {
    parse(ANALYSIS_RESPONSES)
}

#[derive(Clone, Debug, Deserialize)]
pub struct BugContext {
    pub bug: String,
    pub current_state: String,
}

pub fn bug_contexts() -> Vec<BugContext> {
    parse(BUG_CONTEXTS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate, CaseLimits, CommandCatalog};

    #[test]
    fn bundled_fixtures_load_and_validate() {
        let catalog = CommandCatalog::builtin();
        let limits = CaseLimits::default();
        for case in scenario_seeds()
            .iter()
            .chain(&command_seeds())
            .chain(&batch_five_mutants())
        {
            validate(case, &limits, &catalog).unwrap();
        }
        assert_eq!(mission().waypoints().len(), 3);
        assert_eq!(analysis_responses().len(), 5);
        assert_eq!(bug_contexts().len(), 8);
        for d in [
            min_separation_definition(),
            parachute_definition(),
            flip_definition(),
            flight_log_definition(),
        ] {
            assert!(!d.policy_text.is_empty());
        }
        assert_eq!(parachute_acro_script().mode, "ACRO");
        assert_eq!(flip_bug_script().rules.len(), 1);
        assert!(state_mission_start().fact("position").is_some());
    }

    #[test]
    fn jsonl_errors_carry_line_numbers() {
        let err = parse_jsonl::<TestCase>("\n{\"id\": \"a\", \"command\": {\"name\": \"RC3\"}}\n{oops\n").unwrap_err();
        assert_eq!(err.0, 3);
    }
}
