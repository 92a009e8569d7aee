// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! Domain types shared by every stage of the fuzzing loop.

pub mod case;
pub mod catalog;
pub mod geometry;
pub mod mission;
pub mod score;
pub mod state;
pub mod verdict;

pub use case::{
    validate, CaseBody, CaseId, CaseIdAllocator, CaseLimits, CaseViolation, CommandBody, Lineage, ScenarioBody,
    TestCase,
};
pub use catalog::{CatalogEntry, CatalogError, CommandCatalog};
pub use geometry::{Obstacle, Vec3};
pub use mission::{Mission, MissionError};
pub use score::{Category, Score, ScoreOutOfRange};
pub use state::{EmptyPolicy, InterestingnessDefinition, SystemState};
pub use verdict::{Verdict, ViolationKind};
