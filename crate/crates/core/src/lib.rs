// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! LLM-guided fuzzing for UAV autonomy software.
//!
//! The loop: pick a seed from the [`seed_manager`] pool, derive mutants with
//! [`mutation`], ask an [`llm`] client (through the [`oracle`]) how likely each
//! one is to break the safety policy, execute only the promising ones on the
//! [`sut`], and feed results back into the pool. [`campaign`] drives the loop
//! and writes run artifacts; [`metrics`] evaluates oracles and compares runs.

pub mod campaign;
pub mod fixtures;
pub mod llm;
pub mod metrics;
pub mod model;
pub mod mutation;
pub mod oracle;
pub mod rng;
pub mod seed_manager;
pub mod sut;

pub use model::*;
