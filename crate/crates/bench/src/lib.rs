//! Fixtures shared by the criterion benchmarks.

use fselect_core::synth::{benchmark_dataset, BenchmarkSpec};
use fselect_core::{discretize, DiscreteDataset, DiscretizerSpec, EngineConfig, ParallelEngine};

/// The standard benchmark dataset scaled down to `rows` x `features`,
/// discretized with the default equal-frequency binning.
pub fn fixture(rows: usize, features: usize) -> DiscreteDataset {
    let spec = BenchmarkSpec {
        rows,
        features,
        informative: features / 10,
        ..BenchmarkSpec::default()
    };
    discretize(&benchmark_dataset(&spec), &DiscretizerSpec::default())
        .expect("benchmark data discretizes")
        .data
}

/// Engine with `workers` threads and the default parallel threshold.
pub fn engine(workers: usize) -> ParallelEngine {
    ParallelEngine::new(EngineConfig::with_workers(workers)).expect("workers >= 1")
}
