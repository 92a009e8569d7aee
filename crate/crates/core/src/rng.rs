// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! Labelled random sub-streams derived from one campaign seed.
//!
//! Each consumer (seed selection, mutation, mock noise, ...) gets its own
//! ChaCha stream so that adding draws in one place never shifts another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub const SEED_SELECT: &str = "seed-select";
pub const MUTATION: &str = "mutation";
pub const MOCK_NOISE: &str = "mock-noise";
pub const BASELINE_SUBSET: &str = "baseline-subset";

/// FNV-1a; only needs to be stable across builds and platforms.
fn label_hash(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Deterministic stream for `(seed, label)`.
pub fn stream(seed: u64, label: &str) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(label_hash(label));
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_independent() {
        let draw = |label: &str| {
            let mut r = stream(7, label);
            (0..4).map(|_| r.random::<u64>()).collect::<Vec<_>>()
        };
        let (a, b, c) = (draw(MUTATION), draw(MUTATION), draw(SEED_SELECT));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
