// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! Inputs shared by the criterion benches.

use saflite_core::fixtures;
use saflite_core::oracle::{format_block, mutant_label};
use saflite_core::{Obstacle, Score, TestCase};

/// The fixture seeds plus one obstacle sitting on the first leg, which
/// keeps the avoidance branch hot.
pub fn busy_scene() -> Vec<Obstacle> {
    let mut obstacles: Vec<Obstacle> = fixtures::scenario_seeds()
        .iter()
        .flat_map(|s| s.obstacles().to_vec())
        .take(3)
        .collect();
    obstacles.push(Obstacle::grounded(20.0, 5.0, 2.0, 2.0, 6.0, 15.0));
    obstacles
}

/// A well-formed answer for `n` mutants.
pub fn response(n: usize) -> String {
    (0..n)
        .map(|i| {
            let score = Score::new((i % 11) as u8).expect("in range");
            format_block(
                &mutant_label(i),
                "The obstacle sits close to the second leg of the route.",
                score,
            )
        })
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn batch() -> Vec<TestCase> {
    fixtures::batch_five_mutants()
}

#[cfg(test)]
mod tests {
    use super::*;
    use saflite_core::oracle::parse_response;

    #[test]
    fn inputs_are_well_formed() {
        assert_eq!(busy_scene().len(), 4);
        let parsed = parse_response(&response(20), 20).unwrap();
        assert!(parsed.iter().all(|p| !p.defaulted));
        assert_eq!(batch().len(), 5);
    }
}
