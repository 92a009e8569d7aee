// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! Minimum-separation safety monitor.

use super::{SafetyPolicy, Trajectory};
use crate::model::{Obstacle, TestCase, Verdict, ViolationKind};

/// Closest approach over the whole trajectory and the time it happened.
/// `None` when there are no obstacles or no samples.
pub fn min_distance(trajectory: &Trajectory, obstacles: &[Obstacle]) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for s in &trajectory.samples {
        for o in obstacles {
            let d = o.signed_distance(&s.position);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, s.t));
            }
        }
    }
    best
}

/// Collision when the vehicle touches an obstacle, min-separation violation
/// when it passes strictly closer than the policy threshold, pass otherwise.
pub fn check_obstacles(trajectory: &Trajectory, obstacles: &[Obstacle], policy: &SafetyPolicy) -> Verdict {
    match min_distance(trajectory, obstacles) {
        Some((d, t)) if d <= 0.0 => Verdict::Violation {
            kind: ViolationKind::Collision,
            min_distance: Some(0.0),
            at_time: t,
        },
        Some((d, t)) if d < policy.min_separation => Verdict::Violation {
            kind: ViolationKind::MinSeparation,
            min_distance: Some(d),
            at_time: t,
        },
        _ => Verdict::Pass,
    }
}

pub fn check(trajectory: &Trajectory, case: &TestCase, policy: &SafetyPolicy) -> Verdict {
    check_obstacles(trajectory, case.obstacles(), policy)
}
