// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! Kinematic point-mass navigation with potential-field avoidance.
//!
//! Each step the vehicle heads for the next waypoint at constant speed. If
//! the nearest obstacle surface lies within `avoid_radius`, a repulsive unit
//! vector scaled by `gain * (1 - d / avoid_radius)` is added and the sum is
//! renormalized to `speed`, together with an equal tangential component
//! that slides the vehicle around the obstacle. Only the nearest obstacle
//! pushes, and the push balances the goal attraction at
//! `avoid_radius * (1 - cos(theta) / gain)` for an approach angle `theta`,
//! so with a low gain an obstacle squarely on the route is passed too
//! closely. Narrow gaps between obstacles are the other weak spot.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{flight_route, snapshot_state, SimError, SimParams};
use crate::model::{CaseBody, Mission, Obstacle, SystemState, TestCase, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub position: Vec3,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `t,x,y,z` CSV with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,y,z\n");
        for s in &self.samples {
            let _ = writeln!(out, "{},{},{},{}", s.t, s.position.x, s.position.y, s.position.z);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimRun {
    pub trajectory: Trajectory,
    /// State at mission start and after every waypoint capture.
    pub timeline: Vec<SystemState>,
    pub completed: bool,
    /// Index of the last waypoint reached.
    pub last_waypoint: usize,
}

fn planar(v: Vec3) -> Vec3 {
    Vec3::new(v.x, v.y, 0.0)
}

/// Surface distance, unit repulsion direction and centre of the nearest
/// obstacle inside `radius`, if any.
fn repulsion(p: &Vec3, obstacles: &[Obstacle], radius: f64) -> Option<(f64, Vec3, Vec3)> {
    let (nearest, d) = obstacles
        .iter()
        .map(|o| (o, o.signed_distance(p)))
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    if d >= radius {
        return None;
    }
    let away = if d > 0.0 {
        planar(p - nearest.closest_surface_point(p))
    } else {
        planar(p - nearest.center)
    };
    let n = away.norm();
    (n > 1e-12).then(|| (d.max(0.0), away / n, nearest.center))
}

fn rotate_left(v: &Vec3) -> Vec3 {
    Vec3::new(-v.y, v.x, 0.0)
}

/// Flies `mission` through `obstacles`. Deterministic; never fails.
pub fn simulate(mission: &Mission, obstacles: &[Obstacle], params: &SimParams) -> SimRun {
    let route = flight_route(mission, params);
    let mut p = route[0];
    let mut target = 1;
    let mut samples = vec![Sample { t: 0.0, position: p }];
    let mut timeline = vec![snapshot_state(mission, obstacles, &samples, params)];
    let mut step = 0usize;
    loop {
        while target < route.len() && planar(route[target] - p).norm() <= params.waypoint_capture_radius {
            target += 1;
            timeline.push(snapshot_state(mission, obstacles, &samples, params));
        }
        if target == route.len() || step == params.max_steps {
            break;
        }
        step += 1;
        let heading = planar(route[target] - p).normalize();
        let mut v = heading;
        if let Some((d, away, center)) = repulsion(&p, obstacles, params.avoid_radius) {
            let weight = params.repulse_gain * (1.0 - d / params.avoid_radius);
            // Slide around the obstacle on the side away from its centre
            // (left on a dead-centre approach), so a single obstacle cannot
            // trap the vehicle in a local minimum.
            let to_center = planar(center - p);
            let side = if heading.x * to_center.y - heading.y * to_center.x > 1e-9 {
                -rotate_left(&heading)
            } else {
                rotate_left(&heading)
            };
            let left = rotate_left(&away);
            let tangent = if side.dot(&left) >= 0.0 { left } else { -left };
            v += (away + tangent) * weight;
        }
        if v.norm() < 1e-9 {
            v = rotate_left(&heading);
        }
        p += v.normalize() * params.speed * params.dt;
        samples.push(Sample {
            t: step as f64 * params.dt,
            position: p,
        });
    }
    SimRun {
        trajectory: Trajectory { samples },
        timeline,
        completed: target == route.len(),
        last_waypoint: target - 1,
    }
}

/// Executes a scenario case.
pub fn run(mission: &Mission, case: &TestCase, params: &SimParams) -> Result<SimRun, SimError> {
    match &case.body {
        CaseBody::Scenario(s) => Ok(simulate(mission, &s.obstacles, params)),
        CaseBody::Command(_) => Err(SimError::UnsupportedCase(case.id.to_string())),
    }
}
