// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end checks against the bundled fixture corpus.

use saflite_core::fixtures;
use saflite_core::llm::{MockClient, MockMode, MockOracleConfig};
use saflite_core::metrics::{classification_metrics, evaluate_logs, ConfusionMatrix, LabelledLog};
use saflite_core::oracle::{categorize, llm_agent, parse_response, select, set_prompt, SelectPolicy};
use saflite_core::sut::{scripted_state, stub_execute, SimOracle, SimParams};
use saflite_core::{Category, Score, Verdict, ViolationKind};

#[test]
fn recorded_answers_parse_to_their_scores() {
    let responses = fixtures::analysis_responses();
    let scores: Vec<u8> = responses
        .iter()
        .map(|r| {
            let parsed = parse_response(&r.response, 1).unwrap();
            assert_eq!(parsed.len(), 1);
            assert!(!parsed[0].defaulted, "{}", r.test_case);
            parsed[0].score.value()
        })
        .collect();
    assert_eq!(scores, [8, 10, 7, 5, 8]);
    for (r, s) in responses.iter().zip(&scores) {
        assert_eq!(r.expected_score, *s);
    }
    let parachute = parse_response(&responses[1].response, 1).unwrap().remove(0);
    assert!(parachute.rationale.contains("deploy the parachute"));
    assert_eq!(categorize(Score::new(5).unwrap()), Category::MidInteresting);
}

#[test]
fn proximity_mock_ranks_the_five_mutant_batch() {
    let mission = fixtures::mission();
    let client = MockClient::new(
        MockOracleConfig::new(MockMode::GroundTruthProximity),
        Some(SimOracle::new(&mission, &SimParams::default())),
    )
    .unwrap();
    let batch = fixtures::batch_five_mutants();
    let prompt = set_prompt(
        &fixtures::min_separation_definition(),
        &fixtures::state_mission_start(),
        &batch,
    )
    .unwrap();
    let call = llm_agent(&client, &prompt);
    let ranked = select(call.outcome.unwrap(), SelectPolicy::TopK { k: 5 });
    let ids: Vec<&str> = ranked.iter().map(|m| m.case.id.as_str()).collect();
    assert_eq!(ids, ["mutant-a", "mutant-c", "mutant-d", "mutant-e", "mutant-b"]);
    let scores: Vec<u8> = ranked.iter().map(|m| m.score.unwrap().value()).collect();
    assert_eq!(scores, [10, 7, 4, 2, 0]);
    assert_eq!(call.audit.scores.len(), 5);

    let floor = select(ranked, SelectPolicy::default());
    assert_eq!(floor.len(), 2);
}

#[test]
fn scripted_contexts_become_state_facts() {
    let contexts = fixtures::bug_contexts();
    let state = |bug: &str| {
        let ctx = contexts.iter().find(|c| c.bug == bug).unwrap();
        scripted_state(&ctx.current_state)
    };

    let s = state("Bug NO.23 case 1");
    assert_eq!(s.fact("mode"), Some("FLIP"));

    let s = state("Bug NO.3");
    assert_eq!(s.fact("previous_mode"), Some("MISSION"));
    assert_eq!(s.fact("mode"), Some("FLIP"));

    let s = state("Bug NO.23 case 2");
    assert_eq!(s.fact("mode"), Some("MISSION"));
    assert_eq!(s.fact("rc_3"), Some("1900"));

    let s = state("Bug NO.24");
    assert_eq!(s.fact("previous_mode"), Some("FLIP"));
    assert_eq!(s.fact("mode"), Some("ALT_HOLD"));

    let s = state("Bug NO.25");
    assert_eq!(s.fact("mode"), Some("ALT_HOLD"));
    assert_eq!(s.fact("throttle"), Some("1500"));

    for ctx in &contexts {
        let s = scripted_state(&ctx.current_state);
        assert_eq!(s.narrative, ctx.current_state);
        assert!(s.fact("mode").is_some(), "{}", ctx.bug);
    }
}

#[test]
fn scripted_targets_reproduce_their_bugs() {
    let acro = fixtures::parachute_acro_script();
    let parachute = saflite_core::TestCase::command("p", "MAV_CMD_DO_PARACHUTE", Some(1.0));
    match stub_execute(parachute.body.as_command().unwrap(), &acro) {
        Verdict::Violation { kind, min_distance, .. } => {
            assert_eq!(kind, ViolationKind::Collision);
            assert_eq!(min_distance, Some(0.0));
        }
        other => panic!("expected a crash, got {other:?}"),
    }
    let rc3 = saflite_core::TestCase::command("r", "RC3", Some(1500.0));
    assert_eq!(stub_execute(rc3.body.as_command().unwrap(), &acro), Verdict::Pass);

    let flip = fixtures::flip_bug_script();
    let to_flip = saflite_core::TestCase::command("f", "Flight_Mode", Some(14.0));
    assert!(matches!(
        stub_execute(to_flip.body.as_command().unwrap(), &flip),
        Verdict::Violation {
            kind: ViolationKind::Policy { .. },
            min_distance: None,
            ..
        }
    ));
    let to_hold = saflite_core::TestCase::command("h", "Flight_Mode", Some(2.0));
    assert_eq!(stub_execute(to_hold.body.as_command().unwrap(), &flip), Verdict::Pass);
}

#[test]
fn labelled_logs_under_the_keyword_mock() {
    let logs: Vec<LabelledLog> = fixtures::parse_jsonl(fixtures::EVAL_LOGS).unwrap();
    let client = MockClient::new(MockOracleConfig::new(MockMode::keywords()), None).unwrap();
    let eval = evaluate_logs(&client, &fixtures::flight_log_definition(), &logs);
    assert_eq!(eval.matrix, ConfusionMatrix::new(2, 1, 1, 2));
    let m = classification_metrics(&eval.matrix);
    // Every rate is 4/6 or 2/3 on this matrix.
    for r in [m.accuracy, m.precision, m.recall, m.f1] {
        assert!((r.unwrap() - 2.0 / 3.0).abs() < 1e-9);
    }
}
