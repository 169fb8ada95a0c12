//! Incremental greedy ranking under max-association / min-redundancy objectives.
//!
//! For a selected prefix `S` of size `p - 1` and a candidate `j`, let
//! `rel_j = V(x_j, labels)` and `mean_red_j = sum_{i in S} V(x_j, x_i) / (p - 1)`.
//! Step `p` picks the candidate maximizing
//!
//! * `mmais`: `rel_j - lambda * mean_red_j`
//! * `mmaiq`: `rel_j / max(mean_red_j, 1e-12)`
//!
//! The first step picks the most relevant feature. Ties go to the lowest
//! feature index. The per-candidate redundancy sums are accumulated across
//! steps, so step `p` costs exactly one Cramer's V test per unselected feature
//! (against the feature chosen at step `p - 1`).

use serde::{Deserialize, Serialize};

use crate::association::cvtest;
use crate::dataset::DiscreteDataset;
use crate::engine::{ParallelEngine, Partner, TaskBatch};
use crate::error::{Error, Result};

/// Floor on the mean redundancy in the quotient objective.
pub const MMAIQ_EPSILON: f64 = 1e-12;

/// Relevance below this is flagged as a weak association in reports.
pub const WEAK_ASSOCIATION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    /// Quotient: relevance / mean redundancy.
    #[default]
    Mmaiq,
    /// Subtractive: relevance - lambda * mean redundancy.
    Mmais,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub kind: ObjectiveKind,
    /// Redundancy weight. Only `mmais` uses it: scaling every quotient's
    /// denominator by the same constant cannot change the argmax.
    pub lambda: f64,
}

impl Default for Objective {
    fn default() -> Self {
        Self::mmaiq()
    }
}

impl Objective {
    pub fn mmaiq() -> Self {
        Self {
            kind: ObjectiveKind::Mmaiq,
            lambda: 1.0,
        }
    }

    pub fn mmais(lambda: f64) -> Self {
        Self {
            kind: ObjectiveKind::Mmais,
            lambda,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "lambda must be a positive number, got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// `V(x_j, labels)` for every feature, one engine task per feature.
pub fn relevance_vector(data: &DiscreteDataset, engine: &ParallelEngine) -> Vec<f64> {
    let batch = TaskBatch::new((0..data.n_features()).collect(), Partner::Labels)
        .expect("0..m is strictly increasing");
    engine.par_fold(&batch, data).into_iter().map(|a| a.v).collect()
}

/// Score of a candidate at step `p >= 2`, given its summed redundancy
/// against the `p - 1` selected features.
pub fn step_score(objective: &Objective, relevance: f64, red_sum: f64, p: usize) -> f64 {
    debug_assert!(p >= 2);
    let mean_red = red_sum / (p - 1) as f64;
    match objective.kind {
        ObjectiveKind::Mmais => relevance - objective.lambda * mean_red,
        ObjectiveKind::Mmaiq => relevance / mean_red.max(MMAIQ_EPSILON),
    }
}

/// One entry of a ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    /// 1-based selection step.
    pub step: usize,
    pub feature_index: usize,
    pub feature_name: String,
    /// Objective value that won this step (plain relevance at step 1).
    pub score: f64,
    pub relevance: f64,
    pub mean_redundancy: f64,
    /// `V` against each earlier-ranked feature, in ranking order.
    pub redundancy_with_prefix: Vec<f64>,
    /// Relevance below [`WEAK_ASSOCIATION`].
    pub weak_relevance: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub ranking: Vec<RankedFeature>,
    pub objective: Objective,
    pub k_requested: usize,
    pub warnings: Vec<String>,
}

impl SelectionReport {
    pub fn feature_indices(&self) -> Vec<usize> {
        self.ranking.iter().map(|r| r.feature_index).collect()
    }

    /// First `k` ranked features (all of them if `k` exceeds the length).
    pub fn prefix(&self, k: usize) -> Vec<usize> {
        self.ranking.iter().take(k).map(|r| r.feature_index).collect()
    }
}

/// Greedy search state. Lives on the coordinating thread; only the stateless
/// association tasks are handed to the engine.
#[derive(Debug, Clone)]
pub struct SelectionState {
    selected: Vec<usize>,
    is_selected: Vec<bool>,
    relevance: Vec<f64>,
    red_sum: Vec<f64>,
    /// `history[j][q]` is `V(x_j, x_{selected[q]})`, filled while `j` is unselected.
    history: Vec<Vec<f64>>,
}

impl SelectionState {
    /// Computes the relevance vector; nothing is selected yet.
    pub fn new(data: &DiscreteDataset, engine: &ParallelEngine) -> Self {
        let m = data.n_features();
        Self {
            selected: Vec::new(),
            is_selected: vec![false; m],
            relevance: relevance_vector(data, engine),
            red_sum: vec![0.0; m],
            history: vec![Vec::new(); m],
        }
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn relevance(&self) -> &[f64] {
        &self.relevance
    }

    /// Summed redundancy per feature. Entries of selected features are frozen.
    pub fn red_sum(&self) -> &[f64] {
        &self.red_sum
    }

    /// The step the next call to [`SelectionState::step`] performs.
    pub fn p(&self) -> usize {
        self.selected.len() + 1
    }

    fn candidates(&self, data: &DiscreteDataset) -> impl Iterator<Item = usize> + '_ {
        let constant: Vec<bool> = (0..data.n_features()).map(|j| data.is_constant(j)).collect();
        (0..self.is_selected.len()).filter(move |&j| !self.is_selected[j] && !constant[j])
    }

    /// Runs one greedy step. Returns `None` once no selectable (non-constant,
    /// unselected) feature remains; in that case no tests are evaluated.
    pub fn step(
        &mut self,
        data: &DiscreteDataset,
        objective: &Objective,
        engine: &ParallelEngine,
    ) -> Option<RankedFeature> {
        self.candidates(data).next()?;
        let p = self.p();

        if let Some(&last) = self.selected.last() {
            let unselected: Vec<usize> = (0..self.is_selected.len())
                .filter(|&j| !self.is_selected[j])
                .collect();
            let batch = TaskBatch::new(unselected, Partner::Feature(last))
                .expect("ascending filter is strictly increasing");
            let values = engine.par_fold(&batch, data);
            for (&j, value) in batch.candidates().iter().zip(values) {
                self.red_sum[j] += value.v;
                self.history[j].push(value.v);
            }
        }

        let mut best: Option<(usize, f64)> = None;
        for j in self.candidates(data) {
            let score = if p == 1 {
                self.relevance[j]
            } else {
                step_score(objective, self.relevance[j], self.red_sum[j], p)
            };
            if best.map_or(true, |(_, b)| score > b) {
                best = Some((j, score));
            }
        }
        let (winner, score) = best?;

        self.selected.push(winner);
        self.is_selected[winner] = true;
        let relevance = self.relevance[winner];
        let mean_redundancy = if p == 1 {
            0.0
        } else {
            self.red_sum[winner] / (p - 1) as f64
        };
        Some(RankedFeature {
            step: p,
            feature_index: winner,
            feature_name: data.feature_name(winner).to_string(),
            score,
            relevance,
            mean_redundancy,
            redundancy_with_prefix: self.history[winner].clone(),
            weak_relevance: relevance < WEAK_ASSOCIATION,
        })
    }
}

/// Ranks up to `k` features. Constant features are never selected; if fewer
/// than `k` remain selectable the ranking is truncated with a warning.
pub fn select(
    data: &DiscreteDataset,
    objective: &Objective,
    k: usize,
    engine: &ParallelEngine,
) -> Result<SelectionReport> {
    objective.validate()?;
    let m = data.n_features();
    if k == 0 || k > m {
        return Err(Error::InvalidConfig(format!(
            "k must be between 1 and the number of features ({m}), got {k}"
        )));
    }

    let mut warnings = Vec::new();
    if objective.kind == ObjectiveKind::Mmaiq && objective.lambda != 1.0 {
        warnings.push(format!(
            "lambda = {} does not affect the mmaiq ranking",
            objective.lambda
        ));
    }

    let mut state = SelectionState::new(data, engine);
    let mut ranking = Vec::with_capacity(k);
    while ranking.len() < k {
        match state.step(data, objective, engine) {
            Some(entry) => ranking.push(entry),
            None => {
                warnings.push(format!(
                    "only {} non-constant features; ranking truncated to {} of {} requested",
                    ranking.len(),
                    ranking.len(),
                    k
                ));
                break;
            }
        }
    }

    Ok(SelectionReport {
        ranking,
        objective: *objective,
        k_requested: k,
        warnings,
    })
}

/// Mean relevance and mean pairwise redundancy of a ranking prefix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub k: usize,
    /// `(1/k) * sum V(x_i, labels)` over the prefix.
    pub association: f64,
    /// `(1/k^2) * sum_{i,j} V(x_i, x_j)` over ordered pairs, diagonal included as 1.
    pub redundancy: f64,
}

/// Association/redundancy criteria for every prefix of the ranking, from the
/// values recorded during selection.
pub fn score_curve(report: &SelectionReport) -> Vec<CurvePoint> {
    let mut rel_sum = 0.0;
    let mut off_diagonal = 0.0;
    report
        .ranking
        .iter()
        .enumerate()
        .map(|(i, entry)| {
            let k = i + 1;
            rel_sum += entry.relevance;
            off_diagonal += entry.redundancy_with_prefix.iter().sum::<f64>();
            let kf = k as f64;
            CurvePoint {
                k,
                association: rel_sum / kf,
                redundancy: (kf + 2.0 * off_diagonal) / (kf * kf),
            }
        })
        .collect()
}

/// Association and redundancy criteria of an arbitrary feature subset,
/// computed directly from the data.
pub fn subset_criteria(data: &DiscreteDataset, features: &[usize]) -> (f64, f64) {
    let v = |a: &[u32], ca, b: &[u32], cb| cvtest(a, b, ca, cb).expect("valid dataset").v;
    let k = features.len() as f64;
    let association = features
        .iter()
        .map(|&j| v(data.column(j), data.card(j), data.labels(), data.n_classes()))
        .sum::<f64>()
        / k;
    let mut total = 0.0;
    for &a in features {
        for &b in features {
            total += if a == b {
                1.0
            } else {
                v(data.column(a), data.card(a), data.column(b), data.card(b))
            };
        }
    }
    (association, total / (k * k))
}
