// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! System under test: a deterministic waypoint-following UAV with reactive
//! obstacle avoidance, the minimum-separation safety monitor, and a scripted
//! executor for command-style cases.

mod monitor;
mod sim;
mod state;
mod stub;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::geometry::polyline_signed_distance;
use crate::model::{Mission, Obstacle, Vec3};

pub use monitor::{check, check_obstacles, min_distance};
pub use sim::{run, simulate, Sample, SimRun, Trajectory};
pub use state::{scripted_state, snapshot_state};
pub use stub::{stub_execute, ScriptRule, ScriptedOutcome, ScriptedVerdict, ValuePredicate};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("case {0} is a command case; the simulator only executes scenarios")]
    UnsupportedCase(String),
    #[error("invalid simulation parameters: {0}")]
    InvalidParams(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimParams {
    /// Integration step in seconds.
    pub dt: f64,
    /// Ground speed in m/s.
    pub speed: f64,
    /// Obstacles closer than this push the vehicle away.
    pub avoid_radius: f64,
    pub repulse_gain: f64,
    pub waypoint_capture_radius: f64,
    pub max_steps: usize,
    pub cruise_altitude: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            dt: 0.1,
            speed: 2.0,
            avoid_radius: 3.0,
            repulse_gain: 4.0,
            waypoint_capture_radius: 1.0,
            max_steps: 3000,
            cruise_altitude: 2.5,
        }
    }
}

impl SimParams {
    pub fn validate(&self, policy: &SafetyPolicy) -> Result<(), SimError> {
        let positive = [
            ("dt", self.dt),
            ("speed", self.speed),
            ("avoid_radius", self.avoid_radius),
            ("repulse_gain", self.repulse_gain),
            ("waypoint_capture_radius", self.waypoint_capture_radius),
            ("cruise_altitude", self.cruise_altitude),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SimError::InvalidParams(format!("{name} must be positive")));
            }
        }
        if self.max_steps == 0 {
            return Err(SimError::InvalidParams("max_steps must be positive".into()));
        }
        if self.avoid_radius <= policy.min_separation {
            return Err(SimError::InvalidParams(format!(
                "avoid_radius {} must exceed the safety threshold {}",
                self.avoid_radius, policy.min_separation
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SafetyPolicy {
    /// Meters; anything closer (but not touching) is a violation.
    pub min_separation: f64,
}

impl Default for SafetyPolicy {
    fn default() -> Self {
        Self { min_separation: 1.5 }
    }
}

/// Mission geometry exposed to ground-truth scorers: the route the vehicle
/// is commanded to fly, at cruise altitude.
#[derive(Clone, Debug, PartialEq)]
pub struct SimOracle {
    route: Vec<Vec3>,
}

impl SimOracle {
    pub fn new(mission: &Mission, params: &SimParams) -> Self {
        Self {
            route: flight_route(mission, params),
        }
    }

    pub fn route(&self) -> &[Vec3] {
        &self.route
    }

    /// Distance from the route to the nearest obstacle, 0 when they overlap,
    /// `+inf` when there are no obstacles.
    pub fn route_distance(&self, obstacles: &[Obstacle]) -> f64 {
        polyline_signed_distance(&self.route, obstacles).max(0.0)
    }
}

/// Mission waypoints projected to the cruise altitude.
pub(crate) fn flight_route(mission: &Mission, params: &SimParams) -> Vec<Vec3> {
    mission
        .waypoints()
        .iter()
        .map(|w| Vec3::new(w.x, w.y, params.cruise_altitude))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SimParams::default().validate(&SafetyPolicy::default()).unwrap();
    }

    #[test]
    fn avoid_radius_must_exceed_threshold() {
        let p = SimParams {
            avoid_radius: 1.0,
            ..SimParams::default()
        };
        assert!(p.validate(&SafetyPolicy::default()).is_err());
        let p = SimParams {
            dt: 0.0,
            ..SimParams::default()
        };
        assert!(p.validate(&SafetyPolicy::default()).is_err());
    }
}
