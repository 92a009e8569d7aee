// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Provenance for a run directory. Kept apart from report.json so the report
/// stays byte-identical across replays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    /// SHA-256 of the persisted config.json.
    pub config_sha256: String,
    pub started_at: String,
    pub finished_at: String,
    pub rng_seed: u64,
    /// Model name, `mock:<mode>`, `offline` or `unguided`.
    pub llm: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn stamp(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl RunManifest {
    pub fn new(
        config_file: &Path,
        rng_seed: u64,
        llm: String,
        started: DateTime<Utc>,
        finished: DateTime<Utc>,
    ) -> Result<Self> {
        let bytes = fs::read(config_file).with_context(|| format!("cannot read {}", config_file.display()))?;
        Ok(Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256: sha256_hex(&bytes),
            started_at: stamp(started),
            finished_at: stamp(finished),
            rng_seed,
            llm,
        })
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let p = dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&p, text).with_context(|| format!("cannot write {}", p.display()))
    }
}
