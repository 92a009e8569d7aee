// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! Scripted executor for command cases. Stands in for a flight stack by
//! mapping (flight mode, command, value) to a verdict through a rule table.

use serde::{Deserialize, Serialize};

use crate::model::{CommandBody, Verdict, ViolationKind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValuePredicate {
    Equals(f64),
    Range([f64; 2]),
}

impl ValuePredicate {
    fn matches(&self, value: Option<f64>) -> bool {
        match (self, value) {
            (ValuePredicate::Equals(x), Some(v)) => (v - x).abs() < 1e-9,
            (ValuePredicate::Range([lo, hi]), Some(v)) => (*lo..=*hi).contains(&v),
            (_, None) => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ScriptedVerdict {
    Crash,
    Policy { rule: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScriptRule {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<ValuePredicate>,
    /// Modes in which the rule fires; empty means any.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<String>,
    pub verdict: ScriptedVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScriptedOutcome {
    /// Current flight mode of the scripted vehicle.
    pub mode: String,
    pub rules: Vec<ScriptRule>,
}

impl ScriptedOutcome {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// First matching rule decides; unmapped commands pass.
pub fn stub_execute(command: &CommandBody, script: &ScriptedOutcome) -> Verdict {
    let rule = script.rules.iter().find(|r| {
        r.command == command.name
            && r.value.as_ref().is_none_or(|p| p.matches(command.value))
            && (r.modes.is_empty() || r.modes.iter().any(|m| m.eq_ignore_ascii_case(&script.mode)))
    });
    match rule.map(|r| &r.verdict) {
        None => Verdict::Pass,
        Some(ScriptedVerdict::Crash) => Verdict::Violation {
            kind: ViolationKind::Collision,
            min_distance: Some(0.0),
            at_time: 0.0,
        },
        Some(ScriptedVerdict::Policy { rule }) => Verdict::Violation {
            kind: ViolationKind::Policy { rule: rule.clone() },
            min_distance: None,
            at_time: 0.0,
        },
    }
}
