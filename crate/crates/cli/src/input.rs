// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! File loading with `path:line:col` error locations.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use saflite_core::fixtures::parse_jsonl;
use serde::de::DeserializeOwned;

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// serde_json appends " at line L column C"; the location is reported separately.
fn message(e: &serde_json::Error) -> String {
    let full = e.to_string();
    match full.rfind(" at line ") {
        Some(i) => full[..i].to_string(),
        None => full,
    }
}

pub fn json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| anyhow!("{}:{}:{}: {}", path.display(), e.line(), e.column(), message(&e)))
}

/// JSON Lines; blank lines are skipped.
pub fn jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = read(path)?;
    parse_jsonl(&text).map_err(|(line, e)| anyhow!("{}:{}:{}: {}", path.display(), line, e.column(), message(&e)))
}
