// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("interestingness definition has empty policy text")]
pub struct EmptyPolicy;

/// Natural-language statement of the safety property the fuzzer hunts for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DefinitionWire")]
pub struct InterestingnessDefinition {
    pub tag: String,
    pub policy_text: String,
}

#[derive(Deserialize)]
struct DefinitionWire {
    #[serde(default)]
    tag: String,
    policy_text: String,
}

impl TryFrom<DefinitionWire> for InterestingnessDefinition {
    type Error = EmptyPolicy;

    fn try_from(w: DefinitionWire) -> Result<Self, Self::Error> {
        Self::new(w.tag, w.policy_text)
    }
}

impl InterestingnessDefinition {
    pub fn new(tag: impl Into<String>, policy_text: impl Into<String>) -> Result<Self, EmptyPolicy> {
        let policy_text = policy_text.into();
        if policy_text.trim().is_empty() {
            return Err(EmptyPolicy);
        }
        Ok(Self {
            tag: tag.into(),
            policy_text,
        })
    }

    /// Minimum-separation policy for obstacle-avoidance missions.
    pub fn min_separation(meters: f64) -> Self {
        Self {
            tag: "min-separation".into(),
            policy_text: format!(
                "The UAV must maintain a minimum distance of {meters} meters from every obstacle \
                 while navigating the mission. A test case is interesting if, after execution, \
                 the UAV comes within {meters} meters of an obstacle or collides with one."
            ),
        }
    }
}

/// Snapshot of the system under test at scoring time.
///
/// `facts` keeps insertion order so that rendering is deterministic.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    #[serde(default)]
    pub narrative: String,
    #[serde(default)]
    pub facts: IndexMap<String, String>,
}

impl SystemState {
    pub fn new(narrative: impl Into<String>) -> Self {
        Self {
            narrative: narrative.into(),
            facts: IndexMap::new(),
        }
    }

    pub fn with_fact(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.facts.insert(key.into(), value.into());
        self
    }

    pub fn fact(&self, key: &str) -> Option<&str> {
        self.facts.get(key).map(String::as_str)
    }

    /// Text block used inside prompts: the narrative followed by `- key: value` lines.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if !self.narrative.is_empty() {
            out.push_str(self.narrative.trim());
            out.push('\n');
        }
        for (k, v) in &self.facts {
            let _ = writeln!(out, "- {k}: {v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_policy_is_rejected() {
        assert_eq!(InterestingnessDefinition::new("t", "  "), Err(EmptyPolicy));
        assert!(serde_json::from_str::<InterestingnessDefinition>(r#"{"policy_text": ""}"#).is_err());
    }

    #[test]
    fn render_keeps_fact_order() {
        let s = SystemState::new("Hovering.")
            .with_fact("position", "(1, 2, 3)")
            .with_fact("flight_mode", "HOLD")
            .with_fact("altitude", "20");
        assert_eq!(
            s.render(),
            "Hovering.\n- position: (1, 2, 3)\n- flight_mode: HOLD\n- altitude: 20\n"
        );
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.find("position").unwrap() < json.find("altitude").unwrap());
    }

    #[test]
    fn separation_policy_mentions_threshold() {
        let d = InterestingnessDefinition::min_separation(1.5);
        assert!(d.policy_text.contains("1.5 meters"));
    }
}
