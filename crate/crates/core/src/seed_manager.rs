// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! Seed pool, seed scheduling and pool update.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{CaseId, Category, Score, TestCase, Verdict};
use crate::oracle::categorize;

#[derive(Debug, Error, PartialEq)]
pub enum InitError {
    #[error("seed pool needs at least one initial input")]
    Empty,
    #[error("seed count {count} exceeds capacity {capacity}")]
    ExceedsCapacity { count: usize, capacity: usize },
    #[error("duplicate id {0}")]
    DuplicateId(CaseId),
    #[error("capacity must be positive")]
    ZeroCapacity,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    RoundRobin,
    #[default]
    UniformRandom,
    EnergyWeighted,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdatePolicy {
    /// Replace the parent's case when the child scores at least as well as
    /// the parent's best child so far. Unscored children always replace.
    #[default]
    ReplaceParent,
    /// Append children scored `Interesting`, evicting the lowest-energy seed
    /// when the pool is full.
    AddIfInteresting,
}

/// Stable handle to a pool slot; survives case replacement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedKey(u64);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub key: SeedKey,
    pub case: TestCase,
    pub energy: f64,
    pub times_selected: u64,
    pub best_child_score: Option<Score>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UpdateOutcome {
    Unchanged,
    Replaced { previous: CaseId },
    Added { evicted: Option<CaseId> },
}

#[derive(Clone, Debug)]
pub struct SeedPool {
    seeds: Vec<Seed>,
    capacity: usize,
    cursor: usize,
    next_key: u64,
}

fn energy_for(score: Option<Score>) -> f64 {
    1.0 + score.map_or(0.0, |s| f64::from(s.value()) / 10.0)
}

impl SeedPool {
    pub fn init(initial: Vec<TestCase>, capacity: usize) -> Result<Self, InitError> {
        if capacity == 0 {
            return Err(InitError::ZeroCapacity);
        }
        if initial.is_empty() {
            return Err(InitError::Empty);
        }
        if initial.len() > capacity {
            return Err(InitError::ExceedsCapacity {
                count: initial.len(),
                capacity,
            });
        }
        let mut seen = std::collections::HashSet::new();
        for c in &initial {
            if !seen.insert(&c.id) {
                return Err(InitError::DuplicateId(c.id.clone()));
            }
        }
        let seeds = initial
            .into_iter()
            .enumerate()
            .map(|(i, case)| Seed {
                key: SeedKey(i as u64),
                case,
                energy: 1.0,
                times_selected: 0,
                best_child_score: None,
            })
            .collect::<Vec<_>>();
        Ok(Self {
            next_key: seeds.len() as u64,
            seeds,
            capacity,
            cursor: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn seeds(&self) -> &[Seed] {
        &self.seeds
    }

    pub fn get(&self, key: SeedKey) -> Option<&Seed> {
        self.seeds.iter().find(|s| s.key == key)
    }

    /// Picks the next seed to mutate and bumps its selection counter.
    pub fn select<R: Rng + ?Sized>(&mut self, strategy: Strategy, rng: &mut R) -> &Seed {
        let n = self.seeds.len();
        let index = match strategy {
            Strategy::RoundRobin => {
                let i = self.cursor % n;
                self.cursor = (i + 1) % n;
                i
            }
            Strategy::UniformRandom => rng.random_range(0..n),
            Strategy::EnergyWeighted => {
                match WeightedIndex::new(self.seeds.iter().map(|s| s.energy)) {
                    Ok(dist) => dist.sample(rng),
                    // All-zero energies degrade to uniform.
                    Err(_) => rng.random_range(0..n),
                }
            }
        };
        let seed = &mut self.seeds[index];
        seed.times_selected += 1;
        seed
    }

    /// Folds one executed child of `parent` back into the pool.
    ///
    /// Violating or failed executions never enter the pool.
    pub fn update(
        &mut self,
        parent: SeedKey,
        executed: &TestCase,
        score: Option<Score>,
        verdict: &Verdict,
        policy: UpdatePolicy,
    ) -> UpdateOutcome {
        if !matches!(verdict, Verdict::Pass) {
            return UpdateOutcome::Unchanged;
        }
        match policy {
            UpdatePolicy::ReplaceParent => {
                let Some(seed) = self.seeds.iter_mut().find(|s| s.key == parent) else {
                    return UpdateOutcome::Unchanged;
                };
                let improves = match (score, seed.best_child_score) {
                    (Some(s), Some(best)) => s >= best,
                    _ => true,
                };
                if !improves {
                    return UpdateOutcome::Unchanged;
                }
                let previous = std::mem::replace(&mut seed.case, executed.clone()).id;
                if score.is_some() {
                    seed.best_child_score = score;
                }
                seed.energy = energy_for(score);
                UpdateOutcome::Replaced { previous }
            }
            UpdatePolicy::AddIfInteresting => {
                let Some(s) = score else {
                    return UpdateOutcome::Unchanged;
                };
                if categorize(s) != Category::Interesting {
                    return UpdateOutcome::Unchanged;
                }
                let evicted = if self.seeds.len() >= self.capacity {
                    let victim = self
                        .seeds
                        .iter()
                        .enumerate()
                        .min_by(|a, b| a.1.energy.total_cmp(&b.1.energy))
                        .map(|(i, _)| i)
                        .expect("pool is never empty");
                    Some(self.seeds.remove(victim).case.id)
                } else {
                    None
                };
                let key = SeedKey(self.next_key);
                self.next_key += 1;
                self.seeds.push(Seed {
                    key,
                    case: executed.clone(),
                    energy: energy_for(score),
                    times_selected: 0,
                    best_child_score: None,
                });
                UpdateOutcome::Added { evicted }
            }
        }
    }

    pub fn snapshot(&self, iteration: u64) -> PoolSnapshot {
        PoolSnapshot {
            iteration,
            seeds: self
                .seeds
                .iter()
                .map(|s| SeedSummary {
                    case_id: s.case.id.clone(),
                    energy: s.energy,
                    times_selected: s.times_selected,
                    best_child_score: s.best_child_score,
                })
                .collect(),
        }
    }
}

/// One line of the per-iteration pool log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoolSnapshot {
    pub iteration: u64,
    pub seeds: Vec<SeedSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub case_id: CaseId,
    pub energy: f64,
    pub times_selected: u64,
    pub best_child_score: Option<Score>,
}
