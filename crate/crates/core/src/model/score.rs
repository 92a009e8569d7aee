// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("score {0} outside 0..=10")]
pub struct ScoreOutOfRange(pub i64);

/// Interestingness score on the integer scale 0..=10.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct Score(u8);

impl Score {
    pub const MIN: Score = Score(0);
    pub const MAX: Score = Score(10);
    /// Assigned to mutants whose score could not be parsed.
    pub const NEUTRAL: Score = Score(5);

    pub fn new(value: u8) -> Result<Self, ScoreOutOfRange> {
        if value <= 10 {
            Ok(Self(value))
        } else {
            Err(ScoreOutOfRange(value.into()))
        }
    }

    /// Rounds to the nearest integer and clamps into 0..=10; NaN maps to 0.
    pub fn clamped(x: f64) -> Self {
        if x.is_nan() {
            return Self(0);
        }
        Self(x.round().clamp(0.0, 10.0) as u8)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Score> {
        (0..=10).map(Score)
    }
}

impl TryFrom<i64> for Score {
    type Error = ScoreOutOfRange;

    fn try_from(v: i64) -> Result<Self, Self::Error> {
        u8::try_from(v)
            .ok()
            .filter(|v| *v <= 10)
            .map(Score)
            .ok_or(ScoreOutOfRange(v))
    }
}

impl From<Score> for u8 {
    fn from(s: Score) -> u8 {
        s.0
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Interestingness band. Ordered `NonInteresting < MidInteresting < Interesting`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    NonInteresting,
    MidInteresting,
    Interesting,
}

impl Category {
    pub const ALL: [Category; 3] = [
        Category::NonInteresting,
        Category::MidInteresting,
        Category::Interesting,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Category::NonInteresting => "non-interesting",
            Category::MidInteresting => "mid-interesting",
            Category::Interesting => "interesting",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamping_and_rounding() {
        assert_eq!(Score::clamped(14.0), Score::MAX);
        assert_eq!(Score::clamped(-3.0), Score::MIN);
        assert_eq!(Score::clamped(7.5).value(), 8);
        assert_eq!(Score::clamped(f64::NAN), Score::MIN);
    }

    #[test]
    fn serde_rejects_out_of_range() {
        assert_eq!(serde_json::from_str::<Score>("7").unwrap().value(), 7);
        assert!(serde_json::from_str::<Score>("11").is_err());
        assert!(serde_json::from_str::<Score>("-1").is_err());
        assert!(Score::new(11).is_err());
    }
}
