// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

use proptest::collection::vec;
use proptest::prelude::*;

use saflite_core::campaign::{Budget, CampaignConfig, OracleConfig};
use saflite_core::llm::mock::{intended_scores, mock_score};
use saflite_core::llm::{MockMode, MockOracleConfig};
use saflite_core::metrics::{classification_metrics, uplift, ConfusionMatrix, Uplift};
use saflite_core::mutation::{default_scenario_ops, mutate, MutationContext};
use saflite_core::oracle::{categorize, parse_response, select, set_prompt, ScoredMutant, SelectPolicy};
use saflite_core::rng;
use saflite_core::seed_manager::{SeedPool, Strategy as SeedStrategy, UpdatePolicy};
use saflite_core::sut::{check_obstacles, simulate, SafetyPolicy, SimOracle, SimParams};
use saflite_core::{
    fixtures, validate, CaseIdAllocator, CaseLimits, Category, CommandCatalog, Obstacle, Score, SystemState, TestCase,
    Vec3, Verdict,
};

fn obstacle() -> impl Strategy<Value = Obstacle> {
    (
        2.0..38.0f64,
        2.0..38.0f64,
        0.5..6.0f64,
        0.5..6.0f64,
        1.0..10.0f64,
        0.0..360.0f64,
    )
        .prop_map(|(x, y, l, w, h, yaw)| Obstacle::grounded(x, y, l, w, h, yaw))
}

fn scenario() -> impl Strategy<Value = TestCase> {
    vec(obstacle(), 1..=4).prop_map(|obs| TestCase::scenario("s", obs))
}

fn command() -> impl Strategy<Value = TestCase> {
    (
        prop::sample::select(vec!["RC3", "MAV_CMD_DO_PARACHUTE", "Flight_Mode", "ATC_RAT_RLL_FF"]),
        prop::option::of(-100.0..2000.0f64),
    )
        .prop_map(|(name, value)| TestCase::command("c", name, value))
}

fn score() -> impl Strategy<Value = Score> {
    (0u8..=10).prop_map(|v| Score::new(v).unwrap())
}

fn scored(scores: &[Option<Score>]) -> Vec<ScoredMutant> {
    scores
        .iter()
        .enumerate()
        .map(|(i, s)| ScoredMutant {
            case: TestCase::command(format!("m{i}"), "RC3", Some(i as f64)),
            score: *s,
            category: s.map(categorize),
            rationale: String::new(),
            defaulted: false,
        })
        .collect()
}

/// Signed distance by sampling every face on a `step` grid, in plain
/// trigonometry rather than the library's frame transforms.
fn brute_force_distance(o: &Obstacle, p: &Vec3, step: f64) -> f64 {
    let (s, c) = o.yaw_deg.to_radians().sin_cos();
    let d = p - o.center;
    // World to box frame: rotate by -yaw.
    let q = [c * d.x + s * d.y, -s * d.x + c * d.y, d.z];
    let h = [o.size.x / 2.0, o.size.y / 2.0, o.size.z / 2.0];
    let mut best = f64::INFINITY;
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        let nu = (2.0 * h[u] / step).ceil() as usize;
        let nv = (2.0 * h[v] / step).ceil() as usize;
        for sign in [-1.0, 1.0] {
            for i in 0..=nu {
                let a = -h[u] + 2.0 * h[u] * i as f64 / nu as f64;
                let du = q[u] - a;
                for j in 0..=nv {
                    let b = -h[v] + 2.0 * h[v] * j as f64 / nv as f64;
                    let dv = q[v] - b;
                    let dn = q[axis] - sign * h[axis];
                    best = best.min(du * du + dv * dv + dn * dn);
                }
            }
        }
    }
    let inside = (0..3).all(|k| q[k].abs() <= h[k]);
    if inside {
        -best.sqrt()
    } else {
        best.sqrt()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn test_cases_round_trip_through_json(case in prop_oneof![scenario(), command()]) {
        let text = serde_json::to_string(&case).unwrap();
        let back: TestCase = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, case);
    }

    #[test]
    fn verdicts_round_trip_through_json(d in prop::option::of(0.0..10.0f64), t in 0.0..300.0f64, which in 0usize..3) {
        let v = match which {
            0 => Verdict::Pass,
            1 => Verdict::Violation { kind: saflite_core::ViolationKind::MinSeparation, min_distance: d, at_time: t },
            _ => Verdict::ExecError { message: "boom".into() },
        };
        let back: Verdict = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        prop_assert_eq!(back, v);
    }

    #[test]
    fn categorize_is_monotone(a in score(), b in score()) {
        if a <= b {
            prop_assert!(categorize(a) <= categorize(b));
        }
    }

    #[test]
    fn selection_is_a_sorted_prefix(scores in vec(prop::option::of(score()), 1..12), k in 1usize..8, floor in 0usize..3) {
        let input = scored(&scores);
        for policy in [SelectPolicy::TopK { k }, SelectPolicy::CategoryFloor { min: Category::ALL[floor] }] {
            let out = select(input.clone(), policy);
            prop_assert!(!out.is_empty());
            // Stable descending order, unscored last.
            let mut expected = input.clone();
            expected.sort_by_key(|m| std::cmp::Reverse(m.score));
            prop_assert_eq!(&out[..], &expected[..out.len()]);
            match policy {
                SelectPolicy::TopK { k } => prop_assert_eq!(out.len(), k.min(input.len())),
                SelectPolicy::CategoryFloor { min } => {
                    let qualifying = input.iter().filter(|m| m.score.is_some_and(|s| categorize(s) >= min)).count();
                    prop_assert_eq!(out.len(), qualifying.max(1));
                }
            }
        }
    }

    #[test]
    fn mock_responses_parse_back_exactly(scores in vec(score(), 1..=10), seed in any::<u64>()) {
        let mutants: Vec<TestCase> = (0..scores.len()).map(|i| TestCase::command(format!("m{i}"), "RC3", Some(i as f64))).collect();
        let config = MockOracleConfig::new(MockMode::FixedScores { scores: scores.clone() });
        let text = mock_score(&config, &mutants, None, &mut rng::stream(seed, rng::MOCK_NOISE)).unwrap();
        let parsed = parse_response(&text, mutants.len()).unwrap();
        prop_assert_eq!(parsed.len(), scores.len());
        for (p, s) in parsed.iter().zip(&scores) {
            prop_assert_eq!(p.score, *s);
            prop_assert!(!p.defaulted);
        }
    }

    #[test]
    fn prompts_distinguish_batches(a in vec(prop_oneof![scenario(), command()], 1..4), b in vec(prop_oneof![scenario(), command()], 1..4)) {
        let def = fixtures::min_separation_definition();
        let state = SystemState::new("at start");
        let pa = set_prompt(&def, &state, &a).unwrap();
        let pb = set_prompt(&def, &state, &b).unwrap();
        let same_bodies = a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| x.body == y.body);
        prop_assert_eq!(pa.user == pb.user, same_bodies);
    }

    #[test]
    fn box_distance_matches_surface_sampling(
        o in (-5.0..5.0f64, -5.0..5.0f64, 0.0..4.0f64, 0.5..3.0f64, 0.5..3.0f64, 0.5..3.0f64, 0.0..360.0f64),
        p in (-8.0..8.0f64, -8.0..8.0f64, -3.0..7.0f64),
    ) {
        let obstacle = Obstacle::new(Vec3::new(o.0, o.1, o.2), Vec3::new(o.3, o.4, o.5), o.6);
        let point = Vec3::new(p.0, p.1, p.2);
        let expected = brute_force_distance(&obstacle, &point, 0.02);
        prop_assert!((obstacle.signed_distance(&point) - expected).abs() <= 0.02);
    }

    #[test]
    fn proximity_scores_fall_with_route_distance(x in 0.0..40.0f64, y1 in 5.0..40.0f64, y2 in 5.0..40.0f64) {
        let mission = fixtures::mission();
        let truth = SimOracle::new(&mission, &SimParams::default());
        let config = MockOracleConfig::new(MockMode::GroundTruthProximity);
        let a = TestCase::scenario("a", vec![Obstacle::grounded(x.clamp(1.0, 30.0), y1, 1.0, 1.0, 5.0, 0.0)]);
        let b = TestCase::scenario("b", vec![Obstacle::grounded(x.clamp(1.0, 30.0), y2, 1.0, 1.0, 5.0, 0.0)]);
        let s = intended_scores(&config, &[a.clone(), b.clone()], Some(&truth), &mut rng::stream(0, rng::MOCK_NOISE)).unwrap();
        let (da, db) = (truth.route_distance(a.obstacles()), truth.route_distance(b.obstacles()));
        if da <= db {
            prop_assert!(s[0].0 >= s[1].0);
        } else {
            prop_assert!(s[0].0 <= s[1].0);
        }
    }

    #[test]
    fn metrics_respect_their_bounds(tp in 0u64..50, fp in 0u64..50, fn_ in 0u64..50, tn in 0u64..50) {
        let m = classification_metrics(&ConfusionMatrix::new(tp, fp, fn_, tn));
        for r in [m.accuracy, m.precision, m.recall, m.f1].into_iter().flatten() {
            prop_assert!((0.0..=1.0).contains(&r));
        }
        if let (Some(p), Some(r), Some(f1)) = (m.precision, m.recall, m.f1) {
            prop_assert!(f1 >= p.min(r) - 1e-12 && f1 <= p.max(r) + 1e-12);
        }
    }

    #[test]
    fn uplift_ratio_inverts_fraction(n in 1u64..100_000, k_frac in 0.0..1.0f64) {
        let k = ((n as f64 * k_frac) as u64).clamp(1, n);
        let Uplift::Applicable(u) = uplift(n, k, true).unwrap() else {
            return Err(TestCaseError::fail("bug case in pool must be applicable"));
        };
        prop_assert!((u.selection_ratio * u.pool_fraction - 1.0).abs() < 1e-9);
        prop_assert!((u.pool_reduction + u.pool_fraction - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mutants_are_distinct_and_valid(seed in any::<u64>(), which in 0usize..3, n in 1usize..8) {
        let seeds = fixtures::scenario_seeds();
        let limits = CaseLimits::default();
        let catalog = CommandCatalog::builtin();
        let ops = default_scenario_ops();
        let ctx = MutationContext { ops: &ops, limits: &limits, catalog: &catalog };
        let parent = &seeds[which];
        let mutants = mutate(parent, n, &ctx, &mut rng::stream(seed, rng::MUTATION), &mut CaseIdAllocator::new("m")).unwrap();
        prop_assert_eq!(mutants.len(), n);
        let mut bodies: Vec<String> = mutants.iter().map(|m| m.body.canonical()).collect();
        bodies.push(parent.body.canonical());
        bodies.sort();
        bodies.dedup();
        prop_assert_eq!(bodies.len(), n + 1);
        for m in &mutants {
            prop_assert!(validate(m, &limits, &catalog).is_ok());
            prop_assert_eq!(&m.lineage.as_ref().unwrap().parent, &parent.id);
        }
    }

    #[test]
    fn pool_energy_and_selection_counts(seed in any::<u64>(), updates in vec((0usize..3, prop::option::of(score()), any::<bool>()), 0..40)) {
        let mut pool = SeedPool::init(fixtures::scenario_seeds(), 8).unwrap();
        let mut rng = rng::stream(seed, rng::SEED_SELECT);
        let child = fixtures::batch_five_mutants().remove(0);
        for (i, (strategy, s, violating)) in updates.into_iter().enumerate() {
            let before: Vec<_> = pool.seeds().iter().map(|s| (s.key, s.times_selected)).collect();
            let strategy = [SeedStrategy::UniformRandom, SeedStrategy::RoundRobin, SeedStrategy::EnergyWeighted][strategy];
            let key = pool.select(strategy, &mut rng).key;
            let verdict = if violating {
                Verdict::Violation { kind: saflite_core::ViolationKind::Collision, min_distance: Some(0.0), at_time: 1.0 }
            } else {
                Verdict::Pass
            };
            let policy = if i % 2 == 0 { UpdatePolicy::ReplaceParent } else { UpdatePolicy::AddIfInteresting };
            let len = pool.len();
            pool.update(key, &child, s, &verdict, policy);
            if violating {
                prop_assert_eq!(pool.len(), len);
            }
            prop_assert!(pool.len() <= pool.capacity());
            for seed in pool.seeds() {
                prop_assert!(seed.energy >= 0.0);
                if let Some((_, n)) = before.iter().find(|(k, _)| *k == seed.key) {
                    prop_assert!(seed.times_selected >= *n);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn vehicle_speed_is_constant(obs in vec(obstacle(), 1..=4)) {
        let params = SimParams::default();
        let run = simulate(&fixtures::mission(), &obs, &params);
        for w in run.trajectory.samples.windows(2) {
            let step = (w[1].position - w[0].position).norm();
            prop_assert!((step - params.speed * params.dt).abs() < 1e-9);
        }
    }

    #[test]
    fn clearing_the_scene_always_passes(case in scenario()) {
        let params = SimParams::default();
        let policy = SafetyPolicy::default();
        let mission = fixtures::mission();
        let run = simulate(&mission, &[], &params);
        prop_assert_eq!(check_obstacles(&run.trajectory, &[], &policy), Verdict::Pass);
        // Any violation the scene produces is caused by its obstacles.
        let with = simulate(&mission, case.obstacles(), &params);
        let verdict = check_obstacles(&with.trajectory, case.obstacles(), &policy);
        if verdict.is_violation() {
            prop_assert_eq!(check_obstacles(&with.trajectory, &[], &policy), Verdict::Pass);
        }
    }

    #[test]
    fn campaigns_replay_bit_identically(seed in 0u64..1000) {
        let config = CampaignConfig::scenario(
            fixtures::mission(),
            fixtures::scenario_seeds(),
            fixtures::min_separation_definition(),
            OracleConfig::Mock(MockOracleConfig::new(MockMode::GroundTruthProximity)),
            Budget::Iterations(5),
            seed,
        );
        let a = saflite_core::campaign::run_campaign(&config, None).unwrap();
        let b = saflite_core::campaign::run_campaign(&config, None).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
