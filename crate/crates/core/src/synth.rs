//! Seeded synthetic datasets for benchmarks and sanity checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::{Column, DiscreteDataset, RawDataset};

/// Gaussian class-conditional benchmark data.
///
/// Labels are uniform over `classes`. Each of the first `informative`
/// features is `mu[label] + N(0, 1)` with per-feature class means drawn from
/// `U(-2, 2)`; the remaining features are pure `N(0, 1)` noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub rows: usize,
    pub features: usize,
    pub classes: usize,
    pub informative: usize,
    pub seed: u64,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        Self {
            rows: 20_000,
            features: 200,
            classes: 8,
            informative: 20,
            seed: 42,
        }
    }
}

pub fn benchmark_dataset(spec: &BenchmarkSpec) -> RawDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let classes = spec.classes.max(2);
    let labels: Vec<usize> = (0..spec.rows).map(|_| rng.random_range(0..classes)).collect();
    let columns = (0..spec.features)
        .map(|j| {
            let means: Vec<f64> = if j < spec.informative {
                (0..classes).map(|_| rng.random_range(-2.0..2.0)).collect()
            } else {
                vec![0.0; classes]
            };
            let values = labels
                .iter()
                .map(|&c| means[c] + rng.sample::<f64, _>(StandardNormal))
                .collect();
            Column::Numeric(values)
        })
        .collect();
    let names = (0..spec.features).map(|j| format!("f{j:03}")).collect();
    let labels = labels.into_iter().map(|c| format!("class{c}")).collect();
    RawDataset::new(columns, labels, names).expect("generator output is well-formed")
}

/// Binary labels; feature 0 equals the label except for a `flip` fraction of
/// rows, every other feature is uniform noise over `card` categories.
pub fn planted_informative(rows: usize, features: usize, card: u32, flip: f64, seed: u64) -> DiscreteDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<u32> = (0..rows).map(|i| (i % 2) as u32).collect();
    labels.shuffle(&mut rng);
    let mut columns = Vec::with_capacity(features);
    columns.push(
        labels
            .iter()
            .map(|&y| if rng.random_bool(flip) { 1 - y } else { y })
            .collect(),
    );
    for _ in 1..features {
        columns.push((0..rows).map(|_| rng.random_range(0..card)).collect());
    }
    let names = (0..features).map(|j| format!("x{j}")).collect();
    DiscreteDataset::from_codes(columns, labels, names).expect("generator output is well-formed")
}

/// `x0` balanced binary, labels follow `x0` with a `flip` fraction of rows
/// inverted, `x1` is an exact copy of `x0`, and `extra` further binary
/// features are exactly independent of `x0`: within each `x0` stratum they
/// take each value on half of the rows, in random order. `rows` must be a
/// multiple of 4.
pub fn duplicate_feature(rows: usize, extra: usize, flip: f64, seed: u64) -> DiscreteDataset {
    assert!(rows >= 4 && rows % 4 == 0, "rows must be a positive multiple of 4");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x0: Vec<u32> = (0..rows).map(|i| (i % 2) as u32).collect();
    x0.shuffle(&mut rng);
    let mut labels: Vec<u32> = x0
        .iter()
        .map(|&v| if rng.random_bool(flip) { 1 - v } else { v })
        .collect();
    if labels.iter().all(|&y| y == labels[0]) {
        labels[0] = 1 - labels[0];
    }

    let strata: [Vec<usize>; 2] = [0, 1].map(|v| (0..rows).filter(|&i| x0[i] == v).collect());
    let mut columns = vec![x0.clone(), x0];
    for _ in 0..extra {
        let mut col = vec![0u32; rows];
        for stratum in &strata {
            let mut values: Vec<u32> = (0..stratum.len()).map(|i| (i % 2) as u32).collect();
            values.shuffle(&mut rng);
            for (&row, v) in stratum.iter().zip(values) {
                col[row] = v;
            }
        }
        columns.push(col);
    }
    let names = (0..columns.len()).map(|j| format!("x{j}")).collect();
    DiscreteDataset::from_codes(columns, labels, names).expect("generator output is well-formed")
}
