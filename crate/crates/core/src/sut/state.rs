// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! Natural-language state snapshots handed to the oracle.

use std::sync::LazyLock;

use regex::Regex;

use super::{flight_route, Sample, SimParams};
use crate::model::{Mission, Obstacle, SystemState, Vec3};

fn fmt_point(p: &Vec3) -> String {
    format!("({:.2}, {:.2}, {:.2})", p.x, p.y, p.z)
}

/// State of a simulated flight after the samples in `prefix`.
///
/// The waypoint index is the last waypoint reached, 0 at mission start. An
/// empty prefix means the vehicle is still sitting on the first waypoint.
pub fn snapshot_state(mission: &Mission, obstacles: &[Obstacle], prefix: &[Sample], params: &SimParams) -> SystemState {
    let route = flight_route(mission, params);
    let position = prefix.last().map_or(route[0], |s| s.position);
    let mut reached = 0;
    for s in prefix {
        while reached + 1 < route.len() {
            let next = route[reached + 1];
            let planar = ((next.x - s.position.x).powi(2) + (next.y - s.position.y).powi(2)).sqrt();
            if planar > params.waypoint_capture_radius {
                break;
            }
            reached += 1;
        }
    }
    let complete = reached + 1 == route.len();
    let mode = if complete { "MISSION_COMPLETE" } else { "MISSION" };
    let nearest = obstacles
        .iter()
        .map(|o| o.signed_distance(&position).max(0.0))
        .fold(f64::INFINITY, f64::min);
    let distance = if nearest.is_finite() {
        format!("{nearest:.2} m")
    } else {
        "none".to_string()
    };
    let narrative = if complete {
        format!(
            "The UAV has reached the final waypoint of mission '{}' at {}.",
            mission.name(),
            fmt_point(&position)
        )
    } else {
        format!(
            "The UAV is flying mission '{}' at {} in {mode} mode, heading for waypoint {} of {}.",
            mission.name(),
            fmt_point(&position),
            reached + 1,
            route.len() - 1
        )
    };
    let waypoints: Vec<String> = route.iter().map(fmt_point).collect();
    SystemState::new(narrative)
        .with_fact("position", fmt_point(&position))
        .with_fact("current_waypoint_index", reached.to_string())
        .with_fact("distance_to_nearest_obstacle", distance)
        .with_fact("mode", mode)
        .with_fact("route", waypoints.join(" -> "))
}

static SWITCH: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)flight mode (?:has )?(?:switched|changed) from (\w+) to (\w+)").unwrap());
static SPLIT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r";|,\s+|\.\s+|\.$").unwrap());
static TRAILING_NUMBER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(\S+(?:\s\S+){0,2}?)\s+(-?\d+(?:\.\d+)?)$").unwrap());

fn fact_key(label: &str) -> String {
    let key = label.trim().to_ascii_lowercase().replace([' ', '-'], "_");
    match key.as_str() {
        "flight_mode" | "mode" => "mode".to_string(),
        _ => key,
    }
}

/// Parses a scripted context such as `"Flight Mode: MISSION; RC 3 1900"`.
///
/// `Key: value` fragments and `name <number>` fragments become facts; a
/// "flight mode switched from A to B" sentence sets `mode` to B. The whole
/// text is kept as the narrative.
pub fn scripted_state(context: &str) -> SystemState {
    let mut state = SystemState::new(context.trim());
    for fragment in SPLIT.split(context).map(str::trim).filter(|f| !f.is_empty()) {
        if let Some((k, v)) = fragment.split_once(':') {
            let mut v = v.trim().to_string();
            let key = fact_key(k);
            if key == "mode" {
                v = v.to_ascii_uppercase();
            }
            state.facts.insert(key, v);
        } else if let Some(c) = TRAILING_NUMBER.captures(fragment) {
            state.facts.insert(fact_key(&c[1]), c[2].to_string());
        }
    }
    if let Some(c) = SWITCH.captures(context) {
        state.facts.insert("previous_mode".into(), c[1].to_ascii_uppercase());
        state.facts.insert("mode".into(), c[2].to_ascii_uppercase());
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mission() -> Mission {
        Mission::new(
            "m",
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(10.0, 0.0, 0.0),
                Vec3::new(10.0, 10.0, 0.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn start_of_mission() {
        let s = snapshot_state(&mission(), &[], &[], &SimParams::default());
        assert_eq!(s.fact("position"), Some("(0.00, 0.00, 2.50)"));
        assert_eq!(s.fact("current_waypoint_index"), Some("0"));
        assert_eq!(s.fact("distance_to_nearest_obstacle"), Some("none"));
        assert_eq!(s.fact("mode"), Some("MISSION"));
    }

    #[test]
    fn index_advances_with_prefix() {
        let prefix = [
            Sample {
                t: 0.0,
                position: Vec3::new(0.0, 0.0, 2.5),
            },
            Sample {
                t: 1.0,
                position: Vec3::new(9.5, 0.0, 2.5),
            },
        ];
        let o = [Obstacle::grounded(9.5, 4.0, 2.0, 2.0, 6.0, 0.0)];
        let s = snapshot_state(&mission(), &o, &prefix, &SimParams::default());
        assert_eq!(s.fact("current_waypoint_index"), Some("1"));
        assert_eq!(s.fact("distance_to_nearest_obstacle"), Some("3.00 m"));
        assert!(s.render().contains("(9.50, 0.00, 2.50)"));
    }

    #[test]
    fn scripted_context() {
        let s = scripted_state("Flight Mode: mission; RC 3 1900");
        assert_eq!(s.fact("mode"), Some("MISSION"));
        assert_eq!(s.fact("rc_3"), Some("1900"));
        let s = scripted_state("Takeoff done. The flight mode has switched from MISSION to FLIP.");
        assert_eq!(s.fact("mode"), Some("FLIP"));
        assert_eq!(s.fact("previous_mode"), Some("MISSION"));
        let s = scripted_state("Flight Mode: ALT_HOLD, Throttle: 1500");
        assert_eq!(s.fact("mode"), Some("ALT_HOLD"));
        assert_eq!(s.fact("throttle"), Some("1500"));
    }
}
