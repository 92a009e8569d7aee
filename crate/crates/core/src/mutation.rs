// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! Mutation operators producing a batch of distinct, valid mutants per round.

use std::collections::HashSet;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    validate, CaseBody, CaseIdAllocator, CaseLimits, CommandBody, CommandCatalog, Lineage, Obstacle, ScenarioBody,
    TestCase, Vec3,
};

/// Smallest edge length a resize may produce.
pub const MIN_OBSTACLE_SIZE: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum MutationOp {
    AddObstacle,
    RemoveObstacle,
    /// Gaussian planar move of one obstacle center.
    MoveObstacle {
        sigma_pos: f64,
    },
    /// Gaussian change of one obstacle's (l, w, h); the base stays on its plane.
    ResizeObstacle {
        sigma_size: f64,
    },
    RotateObstacle {
        sigma_rot: f64,
    },
    /// Uniform pick from the command catalog.
    PickCommand,
    /// Uniform redraw of the value within the catalog range.
    PerturbValue,
}

impl MutationOp {
    pub fn name(&self) -> &'static str {
        match self {
            MutationOp::AddObstacle => "add_obstacle",
            MutationOp::RemoveObstacle => "remove_obstacle",
            MutationOp::MoveObstacle { .. } => "move_obstacle",
            MutationOp::ResizeObstacle { .. } => "resize_obstacle",
            MutationOp::RotateObstacle { .. } => "rotate_obstacle",
            MutationOp::PickCommand => "pick_command",
            MutationOp::PerturbValue => "perturb_value",
        }
    }

    fn sigma(&self) -> Option<f64> {
        match *self {
            MutationOp::MoveObstacle { sigma_pos } => Some(sigma_pos),
            MutationOp::ResizeObstacle { sigma_size } => Some(sigma_size),
            MutationOp::RotateObstacle { sigma_rot } => Some(sigma_rot),
            _ => None,
        }
    }

    /// True for obstacle operators, false for command operators.
    pub fn targets_scenarios(&self) -> bool {
        !matches!(self, MutationOp::PickCommand | MutationOp::PerturbValue)
    }

    fn compatible(&self, body: &CaseBody) -> bool {
        matches!(body, CaseBody::Scenario(_)) == self.targets_scenarios()
    }

    /// Whether the op can change this particular body right now.
    fn applicable(&self, body: &CaseBody, limits: &CaseLimits, catalog: &CommandCatalog) -> bool {
        match (self, body) {
            (MutationOp::AddObstacle, CaseBody::Scenario(s)) => s.obstacles.len() < limits.max_obstacles,
            (MutationOp::RemoveObstacle, CaseBody::Scenario(s)) => s.obstacles.len() > 1,
            (_, CaseBody::Scenario(s)) if self.targets_scenarios() => !s.obstacles.is_empty(),
            (MutationOp::PickCommand, CaseBody::Command(_)) => !catalog.is_empty(),
            (MutationOp::PerturbValue, CaseBody::Command(c)) => catalog
                .get(&c.name)
                .is_some_and(|e| e.value_range.is_some_and(|[lo, hi]| hi > lo)),
            _ => false,
        }
    }
}

/// Scenario ops with the default magnitudes (2 m, 1 m, 30 degrees).
pub fn default_scenario_ops() -> Vec<MutationOp> {
    vec![
        MutationOp::AddObstacle,
        MutationOp::RemoveObstacle,
        MutationOp::MoveObstacle { sigma_pos: 2.0 },
        MutationOp::ResizeObstacle { sigma_size: 1.0 },
        MutationOp::RotateObstacle { sigma_rot: 30.0 },
    ]
}

pub fn default_command_ops() -> Vec<MutationOp> {
    vec![MutationOp::PickCommand, MutationOp::PerturbValue]
}

#[derive(Debug, Error, PartialEq)]
pub enum MutationError {
    #[error("mutant count must be at least 1")]
    ZeroBatch,
    #[error("{op}: sigma must be positive, got {sigma}")]
    BadSigma { op: &'static str, sigma: f64 },
    #[error("no mutation operator applies to this seed's case kind")]
    Incompatible,
    #[error("produced only {produced} of {wanted} distinct valid mutants in {attempts} attempts")]
    Exhausted {
        produced: usize,
        wanted: usize,
        attempts: usize,
    },
}

/// Everything a mutation round needs besides the seed and the rng.
pub struct MutationContext<'a> {
    pub ops: &'a [MutationOp],
    pub limits: &'a CaseLimits,
    pub catalog: &'a CommandCatalog,
}

/// Produces exactly `n` distinct valid mutants of `seed`.
///
/// Distinctness is judged on the canonical serialized body, and a mutant
/// equal to the seed itself is discarded. Gives up after `10 * n` attempts.
pub fn mutate<R: Rng + ?Sized>(
    seed: &TestCase,
    n: usize,
    ctx: &MutationContext<'_>,
    rng: &mut R,
    ids: &mut CaseIdAllocator,
) -> Result<Vec<TestCase>, MutationError> {
    if n == 0 {
        return Err(MutationError::ZeroBatch);
    }
    for op in ctx.ops {
        if let Some(sigma) = op.sigma() {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(MutationError::BadSigma { op: op.name(), sigma });
            }
        }
    }
    let compatible: Vec<&MutationOp> = ctx.ops.iter().filter(|op| op.compatible(&seed.body)).collect();
    if compatible.is_empty() {
        return Err(MutationError::Incompatible);
    }

    let mut seen = HashSet::from([seed.body.canonical()]);
    let mut out = Vec::with_capacity(n);
    let max_attempts = 10 * n;
    let mut attempts = 0;
    while out.len() < n && attempts < max_attempts {
        attempts += 1;
        let usable: Vec<&MutationOp> = compatible
            .iter()
            .copied()
            .filter(|op| op.applicable(&seed.body, ctx.limits, ctx.catalog))
            .collect();
        if usable.is_empty() {
            continue;
        }
        let op = usable[rng.random_range(0..usable.len())];
        let body = apply(op, &seed.body, ctx, rng);
        let candidate = TestCase {
            id: seed.id.clone(),
            body,
            lineage: None,
        };
        if validate(&candidate, ctx.limits, ctx.catalog).is_err() {
            continue;
        }
        if !seen.insert(candidate.body.canonical()) {
            continue;
        }
        out.push(TestCase {
            id: ids.next_id(),
            body: candidate.body,
            lineage: Some(Lineage {
                parent: seed.id.clone(),
                op: op.name().to_string(),
            }),
        });
    }
    if out.len() < n {
        return Err(MutationError::Exhausted {
            produced: out.len(),
            wanted: n,
            attempts,
        });
    }
    Ok(out)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> f64 {
    Normal::new(0.0, sigma).expect("sigma checked positive").sample(rng)
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

fn wrap_degrees(deg: f64) -> f64 {
    let w = deg.rem_euclid(360.0);
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

fn apply<R: Rng + ?Sized>(op: &MutationOp, body: &CaseBody, ctx: &MutationContext<'_>, rng: &mut R) -> CaseBody {
    match body {
        CaseBody::Scenario(s) => CaseBody::Scenario(apply_scenario(op, s, ctx.limits, rng)),
        CaseBody::Command(c) => CaseBody::Command(apply_command(op, c, ctx.catalog, rng)),
    }
}

fn apply_scenario<R: Rng + ?Sized>(
    op: &MutationOp,
    s: &ScenarioBody,
    limits: &CaseLimits,
    rng: &mut R,
) -> ScenarioBody {
    let [x0, y0, z0] = limits.arena_min;
    let [x1, y1, z1] = limits.arena_max;
    let [lmax, wmax, hmax] = limits.max_size;
    let mut obstacles = s.obstacles.clone();
    match *op {
        MutationOp::AddObstacle => {
            let l = uniform(rng, 1.0, 5.0).min(lmax);
            let w = uniform(rng, 1.0, 5.0).min(wmax);
            let h = uniform(rng, 5.0, 10.0).min(hmax);
            let center = Vec3::new(uniform(rng, x0, x1), uniform(rng, y0, y1), (h / 2.0).clamp(z0, z1));
            let yaw = wrap_degrees(uniform(rng, 0.0, 360.0));
            obstacles.push(Obstacle::new(center, Vec3::new(l, w, h), yaw));
        }
        MutationOp::RemoveObstacle => {
            obstacles.remove(rng.random_range(0..obstacles.len()));
        }
        MutationOp::MoveObstacle { sigma_pos } => {
            let i = rng.random_range(0..obstacles.len());
            let o = &mut obstacles[i];
            o.center.x = (o.center.x + gaussian(rng, sigma_pos)).clamp(x0, x1);
            o.center.y = (o.center.y + gaussian(rng, sigma_pos)).clamp(y0, y1);
        }
        MutationOp::ResizeObstacle { sigma_size } => {
            let i = rng.random_range(0..obstacles.len());
            let o = &mut obstacles[i];
            let base = o.center.z - o.size.z / 2.0;
            for (axis, max) in [lmax, wmax, hmax].into_iter().enumerate() {
                o.size[axis] = (o.size[axis] + gaussian(rng, sigma_size)).clamp(MIN_OBSTACLE_SIZE, max);
            }
            o.center.z = (base + o.size.z / 2.0).clamp(z0, z1);
        }
        MutationOp::RotateObstacle { sigma_rot } => {
            let i = rng.random_range(0..obstacles.len());
            let o = &mut obstacles[i];
            o.yaw_deg = wrap_degrees(o.yaw_deg + gaussian(rng, sigma_rot));
        }
        MutationOp::PickCommand | MutationOp::PerturbValue => {}
    }
    ScenarioBody { obstacles }
}

fn apply_command<R: Rng + ?Sized>(
    op: &MutationOp,
    c: &CommandBody,
    catalog: &CommandCatalog,
    rng: &mut R,
) -> CommandBody {
    match op {
        MutationOp::PickCommand => {
            let (name, entry) = catalog
                .get_index(rng.random_range(0..catalog.len()))
                .expect("index in range");
            CommandBody {
                name: name.to_string(),
                value: entry.value_range.map(|[lo, hi]| uniform(rng, lo, hi)),
            }
        }
        MutationOp::PerturbValue => {
            let range = catalog.get(&c.name).and_then(|e| e.value_range);
            CommandBody {
                name: c.name.clone(),
                value: range.map(|[lo, hi]| uniform(rng, lo, hi)).or(c.value),
            }
        }
        _ => c.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn seed_case(obstacles: Vec<Obstacle>) -> TestCase {
        TestCase::scenario("seed", obstacles)
    }

    fn run(seed: &TestCase, ops: &[MutationOp], n: usize, stream: u64) -> Result<Vec<TestCase>, MutationError> {
        let limits = CaseLimits::default();
        let catalog = CommandCatalog::builtin();
        let ctx = MutationContext {
            ops,
            limits: &limits,
            catalog: &catalog,
        };
        let mut r = rng::stream(stream, rng::MUTATION);
        mutate(seed, n, &ctx, &mut r, &mut CaseIdAllocator::default())
    }

    #[test]
    fn five_distinct_valid_mutants() {
        let seed = seed_case(vec![
            Obstacle::grounded(10.0, 10.0, 2.0, 2.0, 5.0, 0.0),
            Obstacle::grounded(30.0, 20.0, 3.0, 2.0, 6.0, 45.0),
        ]);
        let out = run(&seed, &default_scenario_ops(), 5, 3).unwrap();
        assert_eq!(out.len(), 5);
        let bodies: HashSet<String> = out.iter().map(|c| c.body.canonical()).collect();
        assert_eq!(bodies.len(), 5);
        for m in &out {
            assert_ne!(m.body, seed.body);
            assert_eq!(m.lineage.as_ref().unwrap().parent.as_str(), "seed");
            assert!(validate(m, &CaseLimits::default(), &CommandCatalog::builtin()).is_ok());
        }
    }

    #[test]
    fn remove_on_single_obstacle_is_skipped() {
        let seed = seed_case(vec![Obstacle::grounded(10.0, 10.0, 2.0, 2.0, 5.0, 0.0)]);
        let ops = [MutationOp::RemoveObstacle, MutationOp::MoveObstacle { sigma_pos: 2.0 }];
        let out = run(&seed, &ops, 5, 11).unwrap();
        assert!(out.iter().all(|m| m.obstacles().len() == 1));
        assert!(out.iter().all(|m| m.lineage.as_ref().unwrap().op == "move_obstacle"));

        let err = run(&seed, &[MutationOp::RemoveObstacle], 1, 11).unwrap_err();
        assert!(matches!(err, MutationError::Exhausted { produced: 0, .. }));
    }

    #[test]
    fn move_stays_in_arena_and_changes_center() {
        let seed = seed_case(vec![Obstacle::new(
            Vec3::new(10.0, 10.0, 0.0),
            Vec3::new(2.0, 2.0, 5.0),
            0.0,
        )]);
        let limits = CaseLimits::default();
        for s in 0..1000 {
            let m = &run(&seed, &[MutationOp::MoveObstacle { sigma_pos: 2.0 }], 1, s).unwrap()[0];
            let c = m.obstacles()[0].center;
            for axis in 0..3 {
                assert!(c[axis] >= limits.arena_min[axis] && c[axis] <= limits.arena_max[axis]);
            }
            assert_ne!(c, Vec3::new(10.0, 10.0, 0.0));
        }
    }

    #[test]
    fn command_mutants_stay_in_catalog() {
        let seed = TestCase::command("seed", "RC3", Some(1500.0));
        let out = run(&seed, &default_command_ops(), 5, 2).unwrap();
        let catalog = CommandCatalog::builtin();
        for m in &out {
            let c = m.body.as_command().unwrap();
            assert!(catalog.contains(&c.name));
        }
    }

    #[test]
    fn incompatible_ops_and_bad_parameters() {
        let seed = TestCase::command("seed", "RC3", Some(1500.0));
        assert_eq!(
            run(&seed, &default_scenario_ops(), 1, 0),
            Err(MutationError::Incompatible)
        );
        let seed = seed_case(vec![Obstacle::grounded(10.0, 10.0, 2.0, 2.0, 5.0, 0.0)]);
        assert!(matches!(
            run(&seed, &[MutationOp::MoveObstacle { sigma_pos: 0.0 }], 1, 0),
            Err(MutationError::BadSigma { .. })
        ));
        assert_eq!(run(&seed, &default_scenario_ops(), 0, 0), Err(MutationError::ZeroBatch));
    }

    #[test]
    fn reproducible_serialized_output() {
        let seed = seed_case(vec![Obstacle::grounded(10.0, 10.0, 2.0, 2.0, 5.0, 0.0)]);
        let a = serde_json::to_string(&run(&seed, &default_scenario_ops(), 5, 77).unwrap()).unwrap();
        let b = serde_json::to_string(&run(&seed, &default_scenario_ops(), 5, 77).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn wrap_never_returns_360() {
        assert_eq!(wrap_degrees(-1e-20), 0.0);
        assert_eq!(wrap_degrees(725.0), 5.0);
    }
}
