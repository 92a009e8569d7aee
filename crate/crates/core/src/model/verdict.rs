// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    /// The vehicle touched or entered an obstacle.
    Collision,
    /// The vehicle came closer than the minimum separation without touching.
    MinSeparation,
    /// A scripted, non-geometric policy breach (command campaigns).
    Policy { rule: String },
}

/// Outcome of executing one test case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Violation {
        #[serde(flatten)]
        kind: ViolationKind,
        /// Closest approach in meters; `None` for policy breaches.
        min_distance: Option<f64>,
        /// Seconds since mission start.
        at_time: f64,
    },
    ExecError {
        message: String,
    },
}

impl Verdict {
    pub fn is_violation(&self) -> bool {
        matches!(self, Verdict::Violation { .. })
    }

    pub fn min_distance(&self) -> Option<f64> {
        match self {
            Verdict::Violation { min_distance, .. } => *min_distance,
            _ => None,
        }
    }
}
