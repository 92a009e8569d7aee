// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CatalogError {
    #[error("catalog entry {name}: lower bound {lo} exceeds upper bound {hi}")]
    InvertedRange { name: String, lo: f64, hi: f64 },
    #[error("catalog entry {name}: range bounds must be finite")]
    NonFiniteRange { name: String },
    #[error("catalog is empty")]
    Empty,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    #[serde(default)]
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_range: Option<[f64; 2]>,
}

/// The commands and parameters a command-style case may name.
///
/// Serialized as a JSON object keyed by command name, in file order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IndexMap<String, CatalogEntry>", into = "IndexMap<String, CatalogEntry>")]
pub struct CommandCatalog {
    entries: IndexMap<String, CatalogEntry>,
}

impl CommandCatalog {
    pub fn new(entries: IndexMap<String, CatalogEntry>) -> Result<Self, CatalogError> {
        for (name, entry) in &entries {
            if let Some([lo, hi]) = entry.value_range {
                if !lo.is_finite() || !hi.is_finite() {
                    return Err(CatalogError::NonFiniteRange { name: name.clone() });
                }
                if lo > hi {
                    return Err(CatalogError::InvertedRange {
                        name: name.clone(),
                        lo,
                        hi,
                    });
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// The catalog shipped with the crate: the commands and parameters that
    /// appear in the bundled command-campaign fixtures.
    pub fn builtin() -> Self {
        Self::from_json(include_str!("../../fixtures/catalog.json")).expect("bundled catalog is valid")
    }

    pub fn get(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get_index(&self, i: usize) -> Option<(&str, &CatalogEntry)> {
        self.entries.get_index(i).map(|(k, v)| (k.as_str(), v))
    }
}

impl TryFrom<IndexMap<String, CatalogEntry>> for CommandCatalog {
    type Error = CatalogError;

    fn try_from(entries: IndexMap<String, CatalogEntry>) -> Result<Self, Self::Error> {
        Self::new(entries)
    }
}

impl From<CommandCatalog> for IndexMap<String, CatalogEntry> {
    fn from(c: CommandCatalog) -> Self {
        c.entries
    }
}
