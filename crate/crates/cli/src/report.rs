//! Serialized report envelopes. Field order is the output order.

use fselect_core::{CurvePoint, DiscretizerSpec, Objective, RankedFeature};
use serde::{Deserialize, Serialize};

use crate::args::KArg;

/// Bumped whenever a field is renamed, removed or reinterpreted.
pub const FORMAT_VERSION: u32 = 1;

/// Shape of the dataset a report was computed on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetInfo {
    /// Input file name, or `synthetic`.
    pub source: String,
    pub rows: usize,
    pub features: usize,
    pub classes: usize,
}

/// Settings that affect results. Worker count and parallel threshold are
/// deliberately absent: they never change the output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub objective: Objective,
    pub k: KArg,
    pub discretizer: DiscretizerSpec,
    pub folds: usize,
    pub seed: u64,
    pub cv_reselect: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSummary {
    pub accuracy: Vec<f64>,
    pub best_k: usize,
    pub stratified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub format_version: u32,
    pub command: String,
    pub dataset: DatasetInfo,
    pub settings: Settings,
    pub ranking: Vec<RankedFeature>,
    /// Subset association `A` and redundancy `R` for every prefix.
    pub curve: Vec<CurvePoint>,
    /// Present when `k` was chosen by cross-validation.
    pub cv: Option<CvSummary>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvPoint {
    pub k: usize,
    pub accuracy: f64,
    /// Feature added at this prefix length.
    pub feature: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub format_version: u32,
    pub command: String,
    pub dataset: DatasetInfo,
    pub settings: Settings,
    pub curve: Vec<CvPoint>,
    pub best_k: usize,
    pub best_features: Vec<String>,
    pub stratified: bool,
    /// `fold_accuracies[f][k - 1]`.
    pub fold_accuracies: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRun {
    pub workers: usize,
    pub samples: Vec<f64>,
    pub median_seconds: f64,
    /// Median at one worker divided by this median.
    pub speedup: f64,
    pub cvtest_calls: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub format_version: u32,
    pub command: String,
    pub dataset: DatasetInfo,
    pub settings: Settings,
    pub k: usize,
    pub repeats: usize,
    pub runs: Vec<BenchRun>,
    /// Every worker count produced the same ranking.
    pub rankings_identical: bool,
    pub warnings: Vec<String>,
}
