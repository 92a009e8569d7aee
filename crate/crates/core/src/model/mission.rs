// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::geometry::Vec3;

#[derive(Debug, Error, PartialEq)]
pub enum MissionError {
    #[error("mission needs at least two waypoints, got {0}")]
    TooFewWaypoints(usize),
    #[error("waypoints {0} and {next} coincide", next = .0 + 1)]
    RepeatedWaypoint(usize),
    #[error("waypoint {0} has a non-finite coordinate")]
    NonFinite(usize),
}

/// An ordered waypoint route. Wire form: `{"name": "...", "waypoints": [[x,y,z], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MissionWire", into = "MissionWire")]
pub struct Mission {
    name: String,
    waypoints: Vec<Vec3>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct MissionWire {
    name: String,
    waypoints: Vec<[f64; 3]>,
}

impl Mission {
    pub fn new(name: impl Into<String>, waypoints: Vec<Vec3>) -> Result<Self, MissionError> {
        if waypoints.len() < 2 {
            return Err(MissionError::TooFewWaypoints(waypoints.len()));
        }
        if let Some(i) = waypoints.iter().position(|w| w.iter().any(|c| !c.is_finite())) {
            return Err(MissionError::NonFinite(i));
        }
        if let Some(i) = waypoints.windows(2).position(|w| w[0] == w[1]) {
            return Err(MissionError::RepeatedWaypoint(i));
        }
        Ok(Self {
            name: name.into(),
            waypoints,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn waypoints(&self) -> &[Vec3] {
        &self.waypoints
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

impl TryFrom<MissionWire> for Mission {
    type Error = MissionError;

    fn try_from(w: MissionWire) -> Result<Self, Self::Error> {
        Mission::new(w.name, w.waypoints.into_iter().map(Vec3::from).collect())
    }
}

impl From<Mission> for MissionWire {
    fn from(m: Mission) -> Self {
        Self {
            name: m.name,
            waypoints: m.waypoints.iter().map(|w| [w.x, w.y, w.z]).collect(),
        }
    }
}
