// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! Prompt construction.
//!
//! The user message has five fixed sections. Mutants are labelled
//! `mutant_1..mutant_n` in batch order and rendered from their bodies only
//! (never their ids), with `f64` values printed in shortest round-trip form
//! so that distinct bodies always render differently.

use std::fmt::Write as _;

use thiserror::Error;

use super::mutant_label;
use crate::model::{CaseBody, InterestingnessDefinition, SystemState, TestCase};

pub const SYSTEM_MESSAGE: &str = "You are a safety analyst for autonomous UAV software. \
You judge how likely each proposed test case is to drive the system into violating a safety policy. \
Answer only in the requested format.";

pub const DEFINITION_HEADER: &str = "### Definition of Interestingness";
pub const STATE_HEADER: &str = "### Current System State";
pub const MUTANTS_HEADER: &str = "### Mutants";
pub const INSTRUCTIONS_HEADER: &str = "### Instructions";
pub const EXAMPLE_HEADER: &str = "### Example Output";
pub const LOG_HEADER: &str = "### Flight Log Summary";

const INSTRUCTIONS: &str = "\
For each mutant, reason step by step:
1. Interpret the mutant: what it changes in the environment, or what the command does.
2. Evaluate how the system, in the state described above, is likely to react to it.
3. Explain briefly whether that reaction moves the system toward violating the definition.
4. Give an interestingness score from 0 to 10: 0-4 unlikely to matter, 5-7 plausible, 8-10 likely to cause a violation.
Answer with one block per mutant, in order, in exactly the format of the example.";

const EXAMPLE: &str = "\
mutant_1:
INTERPRETATION: The obstacle now sits two meters from the second leg of the route, inside the avoidance radius.
Score: 8 out of 10.";

const LOG_INSTRUCTIONS: &str = "\
Judge whether the flight described above shows behaviour that matches the definition.
Explain briefly, then give a score from 0 to 10, where 5 or more means the flight matches.
Answer in exactly the format of the example.";

const LOG_EXAMPLE: &str = "\
log:
INTERPRETATION: Altitude oscillates and then drops sharply while hovering.
Score: 8 out of 10.";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PromptError {
    #[error("cannot build a prompt for an empty mutant batch")]
    EmptyBatch,
    #[error("interestingness definition is empty")]
    EmptyDefinition,
    #[error("log summary is empty")]
    EmptySummary,
}

/// A rendered prompt plus the inputs it was rendered from.
#[derive(Clone, Debug, PartialEq)]
pub struct Prompt {
    pub system: String,
    pub user: String,
    pub definition: InterestingnessDefinition,
    pub state: SystemState,
    pub mutants: Vec<TestCase>,
}

/// One mutant as it appears under the mutants header, without its label.
pub fn render_mutant(case: &TestCase) -> String {
    let mut out = String::new();
    match &case.body {
        CaseBody::Scenario(s) => {
            let _ = write!(out, "scenario with {} obstacle(s)", s.obstacles.len());
            for (i, o) in s.obstacles.iter().enumerate() {
                let _ = write!(
                    out,
                    "\n  - obstacle {}: center ({}, {}, {}), size {} x {} x {} m, yaw {} deg",
                    i + 1,
                    o.center.x,
                    o.center.y,
                    o.center.z,
                    o.size.x,
                    o.size.y,
                    o.size.z,
                    o.yaw_deg
                );
            }
        }
        CaseBody::Command(c) => match c.value {
            Some(v) => {
                let _ = write!(out, "command {} with value {}", c.name, v);
            }
            None => {
                let _ = write!(out, "command {} with no value", c.name);
            }
        },
    }
    out
}

fn check_definition(definition: &InterestingnessDefinition) -> Result<(), PromptError> {
    if definition.policy_text.trim().is_empty() {
        return Err(PromptError::EmptyDefinition);
    }
    Ok(())
}

/// Builds the scoring prompt for a mutant batch.
pub fn set_prompt(
    definition: &InterestingnessDefinition,
    state: &SystemState,
    mutants: &[TestCase],
) -> Result<Prompt, PromptError> {
    check_definition(definition)?;
    if mutants.is_empty() {
        return Err(PromptError::EmptyBatch);
    }
    let mut user = String::new();
    let _ = writeln!(user, "{DEFINITION_HEADER}\n{}\n", definition.policy_text.trim());
    let _ = writeln!(user, "{STATE_HEADER}\n{}", state.render());
    let _ = writeln!(user, "{MUTANTS_HEADER}");
    for (i, m) in mutants.iter().enumerate() {
        let _ = writeln!(user, "{}: {}", mutant_label(i), render_mutant(m));
    }
    let _ = writeln!(user, "\n{INSTRUCTIONS_HEADER}\n{INSTRUCTIONS}\n");
    let _ = write!(user, "{EXAMPLE_HEADER}\n{EXAMPLE}\n");
    Ok(Prompt {
        system: SYSTEM_MESSAGE.to_string(),
        user,
        definition: definition.clone(),
        state: state.clone(),
        mutants: mutants.to_vec(),
    })
}

/// Prompt text for classifying a flight-log summary.
pub fn log_prompt(definition: &InterestingnessDefinition, summary: &str) -> Result<String, PromptError> {
    check_definition(definition)?;
    if summary.trim().is_empty() {
        return Err(PromptError::EmptySummary);
    }
    Ok(format!(
        "{DEFINITION_HEADER}\n{}\n\n{LOG_HEADER}\n{}\n\n{INSTRUCTIONS_HEADER}\n{LOG_INSTRUCTIONS}\n\n{EXAMPLE_HEADER}\n{LOG_EXAMPLE}\n",
        definition.policy_text.trim(),
        summary.trim()
    ))
}
