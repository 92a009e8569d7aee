// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! The test-case model: what is mutated, scored and executed.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::catalog::CommandCatalog;
use super::geometry::Obstacle;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CaseId(String);

impl CaseId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Hands out campaign-unique case ids from a monotone counter.
#[derive(Clone, Debug)]
pub struct CaseIdAllocator {
    prefix: String,
    next: u64,
}

impl CaseIdAllocator {
    pub fn new(prefix: impl Into<String>) -> Self {
        Self {
            prefix: prefix.into(),
            next: 1,
        }
    }

    pub fn next_id(&mut self) -> CaseId {
        let id = CaseId(format!("{}{:06}", self.prefix, self.next));
        self.next += 1;
        id
    }
}

impl Default for CaseIdAllocator {
    fn default() -> Self {
        Self::new("m")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioBody {
    pub obstacles: Vec<Obstacle>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommandBody {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseBody {
    Scenario(ScenarioBody),
    Command(CommandBody),
}

impl CaseBody {
    /// Canonical serialization used for distinctness and deduplication.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("case bodies always serialize")
    }

    pub fn as_scenario(&self) -> Option<&ScenarioBody> {
        match self {
            CaseBody::Scenario(s) => Some(s),
            CaseBody::Command(_) => None,
        }
    }

    pub fn as_command(&self) -> Option<&CommandBody> {
        match self {
            CaseBody::Command(c) => Some(c),
            CaseBody::Scenario(_) => None,
        }
    }
}

/// Where a mutant came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lineage {
    pub parent: CaseId,
    pub op: String,
}

/// Wire form: `{"id": "...", "scenario": {...}}` or `{"id": "...", "command": {...}}`,
/// with an optional `"lineage"` object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestCase {
    pub id: CaseId,
    #[serde(flatten)]
    pub body: CaseBody,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lineage: Option<Lineage>,
}

impl TestCase {
    pub fn scenario(id: impl Into<String>, obstacles: Vec<Obstacle>) -> Self {
        Self {
            id: CaseId::new(id),
            body: CaseBody::Scenario(ScenarioBody { obstacles }),
            lineage: None,
        }
    }

    pub fn command(id: impl Into<String>, name: impl Into<String>, value: Option<f64>) -> Self {
        Self {
            id: CaseId::new(id),
            body: CaseBody::Command(CommandBody {
                name: name.into(),
                value,
            }),
            lineage: None,
        }
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        match &self.body {
            CaseBody::Scenario(s) => &s.obstacles,
            CaseBody::Command(_) => &[],
        }
    }
}

/// Bounds every valid scenario case must respect.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseLimits {
    pub max_obstacles: usize,
    /// Lower corner of the arena box that obstacle centers must lie in.
    pub arena_min: [f64; 3],
    pub arena_max: [f64; 3],
    /// Upper bound on (l, w, h).
    pub max_size: [f64; 3],
}

impl Default for CaseLimits {
    fn default() -> Self {
        Self {
            max_obstacles: 4,
            arena_min: [0.0, 0.0, 0.0],
            arena_max: [40.0, 40.0, 20.0],
            max_size: [15.0, 15.0, 20.0],
        }
    }
}

const AXES: [&str; 3] = ["x", "y", "z"];

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CaseViolation {
    #[error("scenario has no obstacles")]
    NoObstacles,
    #[error("too many obstacles: {count} > {max}")]
    TooManyObstacles { count: usize, max: usize },
    #[error("obstacle {index}: non-finite {field}")]
    NonFinite { index: usize, field: &'static str },
    #[error("obstacle {index}: non-positive size")]
    NonPositiveSize { index: usize },
    #[error("obstacle {index}: size exceeds limit along {axis}")]
    SizeExceedsLimit { index: usize, axis: &'static str },
    #[error("obstacle {index}: center outside arena along {axis}")]
    CenterOutOfArena { index: usize, axis: &'static str },
    #[error("obstacle {index}: rotation {yaw} outside [0, 360)")]
    YawOutOfRange { index: usize, yaw: f64 },
    #[error("unknown command {name:?}")]
    UnknownCommand { name: String },
    #[error("command {name:?}: non-finite value")]
    NonFiniteValue { name: String },
    #[error("command {name:?}: value {value} outside [{lo}, {hi}]")]
    ValueOutOfRange { name: String, value: f64, lo: f64, hi: f64 },
}

/// Checks every constraint on `case`; an empty list means the case is valid.
pub fn validate(case: &TestCase, limits: &CaseLimits, catalog: &CommandCatalog) -> Result<(), Vec<CaseViolation>> {
    let mut out = Vec::new();
    match &case.body {
        CaseBody::Scenario(s) => validate_scenario(s, limits, &mut out),
        CaseBody::Command(c) => validate_command(c, catalog, &mut out),
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn validate_scenario(s: &ScenarioBody, limits: &CaseLimits, out: &mut Vec<CaseViolation>) {
    if s.obstacles.is_empty() {
        out.push(CaseViolation::NoObstacles);
    }
    if s.obstacles.len() > limits.max_obstacles {
        out.push(CaseViolation::TooManyObstacles {
            count: s.obstacles.len(),
            max: limits.max_obstacles,
        });
    }
    for (index, o) in s.obstacles.iter().enumerate() {
        if o.center.iter().any(|c| !c.is_finite()) {
            out.push(CaseViolation::NonFinite { index, field: "center" });
        }
        if o.size.iter().any(|c| !c.is_finite()) {
            out.push(CaseViolation::NonFinite { index, field: "size" });
        } else if o.size.iter().any(|&c| c <= 0.0) {
            out.push(CaseViolation::NonPositiveSize { index });
        }
        for (k, &axis) in AXES.iter().enumerate() {
            if o.size[k] > limits.max_size[k] {
                out.push(CaseViolation::SizeExceedsLimit { index, axis });
            }
            let c = o.center[k];
            if c.is_finite() && (c < limits.arena_min[k] || c > limits.arena_max[k]) {
                out.push(CaseViolation::CenterOutOfArena { index, axis });
            }
        }
        if !o.yaw_deg.is_finite() {
            out.push(CaseViolation::NonFinite {
                index,
                field: "rotation",
            });
        } else if !(0.0..360.0).contains(&o.yaw_deg) {
            out.push(CaseViolation::YawOutOfRange { index, yaw: o.yaw_deg });
        }
    }
}

fn validate_command(c: &CommandBody, catalog: &CommandCatalog, out: &mut Vec<CaseViolation>) {
    let Some(entry) = catalog.get(&c.name) else {
        out.push(CaseViolation::UnknownCommand { name: c.name.clone() });
        return;
    };
    let Some(value) = c.value else { return };
    if !value.is_finite() {
        out.push(CaseViolation::NonFiniteValue { name: c.name.clone() });
    } else if let Some([lo, hi]) = entry.value_range {
        if value < lo || value > hi {
            out.push(CaseViolation::ValueOutOfRange {
                name: c.name.clone(),
                value,
                lo,
                hi,
            });
        }
    }
}
