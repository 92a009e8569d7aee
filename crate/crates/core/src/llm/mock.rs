// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! Deterministic stand-ins for a language model.
//!
//! The mock answers in exactly the block format the oracle parser expects,
//! one `mutant_i` block per mutant:
//!
//! ```text
//! mutant_1:
//! INTERPRETATION: <one or two sentences>
//! Score: 8 out of 10.
//! ```
//!
//! Scoring modes:
//!
//! * `GroundTruthProximity`: `round(10 * clamp(1 - d / 10 m, 0, 1))` where `d`
//!   is the minimum distance between the mission route and the mutant's
//!   obstacles. A stand-in for a model that reasons well about geometry.
//! * `KeywordRules`: the highest score among case-insensitive substring rules
//!   matching the command name (or log summary); [`KEYWORD_FALLBACK`] when
//!   nothing matches. The built-in table scores `PARACHUTE` 10, `crash` 9,
//!   `oscillat`/`flip`/`Flight_Mode`/`COM_POS_FS_DELAY` 8, `RC3`/`drop` 7,
//!   `ATC_RAT` 5 and `complet`/`nominal` 1.
//! * `FixedScores`: replays a list, one score per mutant.
//!
//! Optional Gaussian noise is added before rounding and clamping.

use std::sync::Mutex;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{LlmClient, LlmError, LlmRequest, RequestSubject};
use crate::model::{CaseBody, Score, TestCase};
use crate::oracle::mutant_label;
use crate::oracle::response::format_block;
use crate::rng::{self, StreamRng};
use crate::sut::SimOracle;

/// Distance at which proximity pressure reaches zero, in meters.
pub const PROXIMITY_NORMALIZATION: f64 = 10.0;

/// Score when no keyword rule matches.
pub const KEYWORD_FALLBACK: u8 = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeywordRule {
    pub keyword: String,
    pub score: Score,
}

impl KeywordRule {
    fn new(keyword: &str, score: u8) -> Self {
        Self {
            keyword: keyword.into(),
            score: Score::new(score).expect("table scores are in range"),
        }
    }
}

pub fn builtin_keyword_rules() -> Vec<KeywordRule> {
    [
        ("PARACHUTE", 10),
        ("crash", 9),
        ("oscillat", 8),
        ("flip", 8),
        ("Flight_Mode", 8),
        ("COM_POS_FS_DELAY", 8),
        ("RC3", 7),
        ("drop", 7),
        ("REPOSITION", 7),
        ("ATC_RAT", 5),
        ("complet", 1),
        ("nominal", 1),
    ]
    .into_iter()
    .map(|(k, s)| KeywordRule::new(k, s))
    .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MockMode {
    GroundTruthProximity,
    KeywordRules {
        #[serde(default = "builtin_keyword_rules")]
        rules: Vec<KeywordRule>,
    },
    FixedScores {
        scores: Vec<Score>,
    },
}

impl MockMode {
    pub fn keywords() -> Self {
        MockMode::KeywordRules {
            rules: builtin_keyword_rules(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MockMode::GroundTruthProximity => "proximity",
            MockMode::KeywordRules { .. } => "keywords",
            MockMode::FixedScores { .. } => "fixed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MockOracleConfig {
    #[serde(flatten)]
    pub mode: MockMode,
    #[serde(default)]
    pub noise: f64,
    #[serde(default)]
    pub rng_seed: u64,
}

impl MockOracleConfig {
    pub fn new(mode: MockMode) -> Self {
        Self {
            mode,
            noise: 0.0,
            rng_seed: 0,
        }
    }
}

fn keyword_score<'a>(rules: &'a [KeywordRule], text: &str) -> (Score, Option<&'a str>) {
    let lower = text.to_lowercase();
    rules
        .iter()
        .filter(|r| lower.contains(&r.keyword.to_lowercase()))
        .max_by_key(|r| r.score)
        .map_or((Score::clamped(KEYWORD_FALLBACK.into()), None), |r| {
            (r.score, Some(r.keyword.as_str()))
        })
}

/// Raw (pre-noise) score and rationale for one mutant.
fn assess(
    mode: &MockMode,
    index: usize,
    case: &TestCase,
    ground_truth: Option<&SimOracle>,
) -> Result<(f64, String), LlmError> {
    match mode {
        MockMode::GroundTruthProximity => {
            let oracle =
                ground_truth.ok_or_else(|| LlmError::Config("proximity mock needs the mission ground truth".into()))?;
            let CaseBody::Scenario(s) = &case.body else {
                return Err(LlmError::Config(
                    "proximity mock can only score scenario mutants".into(),
                ));
            };
            let d = oracle.route_distance(&s.obstacles);
            let raw = 10.0 * (1.0 - d / PROXIMITY_NORMALIZATION).clamp(0.0, 1.0);
            let closeness = if d <= 0.0 {
                "an obstacle overlaps the mission route".to_string()
            } else {
                format!("the closest obstacle is {d:.2} meters from the mission route")
            };
            Ok((
                raw,
                format!(
                    "The test case places {} obstacle(s) in the environment; {closeness}.",
                    s.obstacles.len()
                ),
            ))
        }
        MockMode::KeywordRules { rules } => {
            let text = match &case.body {
                CaseBody::Command(c) => c.name.clone(),
                CaseBody::Scenario(_) => case.body.canonical(),
            };
            let (score, hit) = keyword_score(rules, &text);
            let why = match hit {
                Some(k) => format!("The test case {text} relates to \"{k}\", which bears on the policy."),
                None => format!("The test case {text} has no clear relation to the policy."),
            };
            Ok((f64::from(score.value()), why))
        }
        MockMode::FixedScores { scores } => {
            let s = scores.get(index).ok_or_else(|| {
                LlmError::Config(format!(
                    "fixed-score mock has {} scores but the batch needs more",
                    scores.len()
                ))
            })?;
            Ok((f64::from(s.value()), "Scripted assessment.".into()))
        }
    }
}

fn noisy(raw: f64, sigma: f64, rng: &mut StreamRng) -> Score {
    if sigma > 0.0 {
        let n = Normal::new(0.0, sigma).expect("positive sigma");
        Score::clamped(raw + n.sample(rng))
    } else {
        Score::clamped(raw)
    }
}

/// The scores the mock will emit for `mutants`, consuming noise from `rng`.
pub fn intended_scores(
    config: &MockOracleConfig,
    mutants: &[TestCase],
    ground_truth: Option<&SimOracle>,
    rng: &mut StreamRng,
) -> Result<Vec<(Score, String)>, LlmError> {
    if config.noise < 0.0 || !config.noise.is_finite() {
        return Err(LlmError::Config("noise sigma must be non-negative".into()));
    }
    if let MockMode::FixedScores { scores } = &config.mode {
        if scores.len() != mutants.len() {
            return Err(LlmError::Config(format!(
                "fixed-score mock has {} scores for a batch of {}",
                scores.len(),
                mutants.len()
            )));
        }
    }
    mutants
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let (raw, why) = assess(&config.mode, i, m, ground_truth)?;
            Ok((noisy(raw, config.noise, rng), why))
        })
        .collect()
}

/// Renders a full response for a mutant batch.
pub fn mock_score(
    config: &MockOracleConfig,
    mutants: &[TestCase],
    ground_truth: Option<&SimOracle>,
    rng: &mut StreamRng,
) -> Result<String, LlmError> {
    let scored = intended_scores(config, mutants, ground_truth, rng)?;
    let mut out = String::new();
    for (i, (score, why)) in scored.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format_block(&mutant_label(i), why, *score));
    }
    Ok(out)
}

fn mock_log_score(config: &MockOracleConfig, summary: &str, rng: &mut StreamRng) -> Result<String, LlmError> {
    let (raw, why) = match &config.mode {
        MockMode::KeywordRules { rules } => {
            let (s, hit) = keyword_score(rules, summary);
            let why = match hit {
                Some(k) => format!("The log shows behaviour matching \"{k}\"."),
                None => "The log shows no unusual behaviour.".to_string(),
            };
            (f64::from(s.value()), why)
        }
        MockMode::FixedScores { scores } => {
            let s = scores
                .first()
                .ok_or_else(|| LlmError::Config("fixed-score mock has no scores".into()))?;
            (f64::from(s.value()), "Scripted assessment.".to_string())
        }
        MockMode::GroundTruthProximity => {
            return Err(LlmError::Config("proximity mock cannot classify flight logs".into()))
        }
    };
    Ok(format_block("log", &why, noisy(raw, config.noise, rng)))
}

/// [`LlmClient`] backed by the mock scorer. Noise draws advance an internal
/// stream seeded from `config.rng_seed`, so a fixed call sequence yields a
/// fixed response sequence.
pub struct MockClient {
    config: MockOracleConfig,
    ground_truth: Option<SimOracle>,
    rng: Mutex<StreamRng>,
}

impl MockClient {
    pub fn new(config: MockOracleConfig, ground_truth: Option<SimOracle>) -> Result<Self, LlmError> {
        if matches!(config.mode, MockMode::GroundTruthProximity) && ground_truth.is_none() {
            return Err(LlmError::Config("proximity mock needs the mission ground truth".into()));
        }
        let rng = Mutex::new(rng::stream(config.rng_seed, rng::MOCK_NOISE));
        Ok(Self {
            config,
            ground_truth,
            rng,
        })
    }
}

impl LlmClient for MockClient {
    fn identity(&self) -> String {
        format!("mock:{}", self.config.mode.name())
    }

    fn complete(&self, request: &LlmRequest<'_>) -> Result<String, LlmError> {
        let mut rng = self.rng.lock().expect("mock rng poisoned");
        match request.subject {
            RequestSubject::Mutants { mutants, .. } => {
                mock_score(&self.config, mutants, self.ground_truth.as_ref(), &mut rng)
            }
            RequestSubject::LogSummary { summary, .. } => mock_log_score(&self.config, summary, &mut rng),
        }
    }
}

/// A client whose endpoint never answers.
#[derive(Clone, Copy, Debug, Default)]
pub struct OfflineClient;

impl LlmClient for OfflineClient {
    fn identity(&self) -> String {
        "offline".into()
    }

    fn complete(&self, _request: &LlmRequest<'_>) -> Result<String, LlmError> {
        Err(LlmError::Timeout(std::time::Duration::ZERO))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Mission, Obstacle, Vec3};
    use crate::sut::SimParams;

    fn straight() -> SimOracle {
        let m = Mission::new("line", vec![Vec3::new(0.0, 20.0, 2.5), Vec3::new(40.0, 20.0, 2.5)]).unwrap();
        SimOracle::new(&m, &SimParams::default())
    }

    fn scores(config: &MockOracleConfig, mutants: &[TestCase]) -> Vec<u8> {
        let mut r = rng::stream(0, rng::MOCK_NOISE);
        intended_scores(config, mutants, Some(&straight()), &mut r)
            .unwrap()
            .into_iter()
            .map(|(s, _)| s.value())
            .collect()
    }

    #[test]
    fn obstacle_on_route_scores_ten() {
        let case = TestCase::scenario("a", vec![Obstacle::grounded(20.0, 20.0, 2.0, 2.0, 5.0, 0.0)]);
        let cfg = MockOracleConfig::new(MockMode::GroundTruthProximity);
        assert_eq!(scores(&cfg, &[case]), [10]);
    }

    #[test]
    fn obstacle_ten_meters_away_scores_zero() {
        // Box face at y = 30, route at y = 20: d = 10 = normalization.
        let case = TestCase::scenario("a", vec![Obstacle::grounded(20.0, 31.0, 2.0, 2.0, 5.0, 0.0)]);
        let d = straight().route_distance(case.obstacles());
        assert!((d - 10.0).abs() < 1e-9);
        let cfg = MockOracleConfig::new(MockMode::GroundTruthProximity);
        assert_eq!(scores(&cfg, &[case]), [0]);
    }

    #[test]
    fn parachute_keyword_scores_ten() {
        let case = TestCase::command("c", "MAV_CMD_DO_PARACHUTE", None);
        assert_eq!(scores(&MockOracleConfig::new(MockMode::keywords()), &[case]), [10]);
        let case = TestCase::command("c", "GPS_POS1_Z", None);
        assert_eq!(
            scores(&MockOracleConfig::new(MockMode::keywords()), &[case]),
            [KEYWORD_FALLBACK]
        );
    }

    #[test]
    fn config_errors() {
        assert!(MockClient::new(MockOracleConfig::new(MockMode::GroundTruthProximity), None).is_err());
        let cfg = MockOracleConfig::new(MockMode::FixedScores {
            scores: vec![Score::MIN],
        });
        let batch = vec![TestCase::command("c", "RC3", None); 2];
        let mut r = rng::stream(0, rng::MOCK_NOISE);
        assert!(intended_scores(&cfg, &batch, None, &mut r).is_err());
    }

    #[test]
    fn noise_is_deterministic_per_seed() {
        let case = TestCase::scenario("a", vec![Obstacle::grounded(20.0, 25.0, 2.0, 2.0, 5.0, 0.0)]);
        let cfg = MockOracleConfig {
            mode: MockMode::GroundTruthProximity,
            noise: 1.5,
            rng_seed: 3,
        };
        let batch = vec![case; 8];
        assert_eq!(scores(&cfg, &batch), scores(&cfg, &batch));
    }

    #[test]
    fn mode_serializes_flat() {
        let cfg = MockOracleConfig::new(MockMode::GroundTruthProximity);
        let v = serde_json::to_value(&cfg).unwrap();
        assert_eq!(v["mode"], "ground_truth_proximity");
        let back: MockOracleConfig = serde_json::from_str(r#"{"mode": "keyword_rules"}"#).unwrap();
        assert_eq!(back.mode, MockMode::keywords());
    }
}
