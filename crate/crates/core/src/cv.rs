//! K-fold cross-validation over ranking prefixes.
//!
//! The ranking is normally computed once on the full dataset; only the
//! classifier is cross-validated for each prefix length `k`. With
//! [`CvOptions::reselect`] the ranking is recomputed on every training split
//! instead.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::DiscreteDataset;
use crate::engine::ParallelEngine;
use crate::error::{Error, Result};
use crate::selector::{select, SelectionReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    /// Row indices of each fold, ascending.
    pub folds: Vec<Vec<usize>>,
    pub seed: u64,
    /// Whether the split actually preserves class proportions (false after a fallback).
    pub stratified: bool,
    pub warnings: Vec<String>,
}

impl FoldPlan {
    /// All rows not in fold `f`, ascending.
    pub fn train_rows(&self, f: usize) -> Vec<usize> {
        let mut rows: Vec<usize> = self
            .folds
            .iter()
            .enumerate()
            .filter(|&(g, _)| g != f)
            .flat_map(|(_, fold)| fold.iter().copied())
            .collect();
        rows.sort_unstable();
        rows
    }
}

/// Seeded shuffle followed by round-robin assignment. When stratified, rows
/// are grouped by class (ascending), each group shuffled, and the round-robin
/// pointer carries over between classes, so both per-class and total fold
/// sizes differ by at most one.
pub fn make_folds(data: &DiscreteDataset, k: usize, seed: u64, stratified: bool) -> Result<FoldPlan> {
    let rows = data.rows();
    if k < 2 || k > rows {
        return Err(Error::InvalidConfig(format!(
            "folds must be between 2 and the number of rows ({rows}), got {k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut warnings = Vec::new();

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); data.n_classes()];
    for (i, &c) in data.labels().iter().enumerate() {
        by_class[c as usize].push(i);
    }
    let mut stratified = stratified;
    if stratified {
        if let Some(small) = by_class.iter().position(|members| members.len() < k) {
            warnings.push(format!(
                "class {small} has {} rows, fewer than {k} folds; using unstratified folds",
                by_class[small].len()
            ));
            stratified = false;
        }
    }

    let order: Vec<usize> = if stratified {
        by_class
            .into_iter()
            .flat_map(|mut members| {
                members.shuffle(&mut rng);
                members
            })
            .collect()
    } else {
        let mut all: Vec<usize> = (0..rows).collect();
        all.shuffle(&mut rng);
        all
    };

    let mut folds = vec![Vec::with_capacity(rows / k + 1); k];
    for (pos, row) in order.into_iter().enumerate() {
        folds[pos % k].push(row);
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(FoldPlan {
        folds,
        seed,
        stratified,
        warnings,
    })
}

/// A classifier over category codes.
pub trait Classifier: Sync {
    /// Fits on `train` rows using `features`, then predicts a class code for
    /// each `test` row.
    fn predict(&self, data: &DiscreteDataset, train: &[usize], test: &[usize], features: &[usize]) -> Vec<u32>;

    /// Fraction of `test` rows predicted correctly; 0 for an empty test set.
    fn accuracy(&self, data: &DiscreteDataset, train: &[usize], test: &[usize], features: &[usize]) -> f64 {
        if test.is_empty() {
            return 0.0;
        }
        let predicted = self.predict(data, train, test, features);
        let labels = data.labels();
        let correct = test
            .iter()
            .zip(&predicted)
            .filter(|&(&row, &p)| labels[row] == p)
            .count();
        correct as f64 / test.len() as f64
    }
}

/// Categorical naive Bayes with add-one smoothing on priors and conditionals.
///
/// Prior `(n_c + 1) / (n_train + C)`, conditional
/// `(n_{c,j,v} + 1) / (n_c + card_j)`. Prediction is the argmax of the log
/// posterior; ties go to the lowest class code.
#[derive(Debug, Clone, Copy, Default)]
pub struct NaiveBayes;

impl Classifier for NaiveBayes {
    fn predict(&self, data: &DiscreteDataset, train: &[usize], test: &[usize], features: &[usize]) -> Vec<u32> {
        let classes = data.n_classes();
        let labels = data.labels();

        let mut class_counts = vec![0u64; classes];
        for &row in train {
            class_counts[labels[row] as usize] += 1;
        }
        // counts[f][c * card + v]
        let counts: Vec<Vec<u64>> = features
            .iter()
            .map(|&j| {
                let card = data.card(j);
                let column = data.column(j);
                let mut table = vec![0u64; classes * card];
                for &row in train {
                    table[labels[row] as usize * card + column[row] as usize] += 1;
                }
                table
            })
            .collect();

        let n_train = train.len() as f64;
        let log_prior: Vec<f64> = class_counts
            .iter()
            .map(|&n| ((n as f64 + 1.0) / (n_train + classes as f64)).ln())
            .collect();

        test.iter()
            .map(|&row| {
                let mut best = (0u32, f64::NEG_INFINITY);
                for c in 0..classes {
                    let mut score = log_prior[c];
                    for (table, &j) in counts.iter().zip(features) {
                        let card = data.card(j);
                        let v = data.column(j)[row] as usize;
                        let num = table[c * card + v] as f64 + 1.0;
                        let den = class_counts[c] as f64 + card as f64;
                        score += (num / den).ln();
                    }
                    if score > best.1 {
                        best = (c as u32, score);
                    }
                }
                best.0
            })
            .collect()
    }
}

/// Naive Bayes accuracy on `test` after fitting on `train`.
pub fn nb_classify(train: &[usize], test: &[usize], features: &[usize], data: &DiscreteDataset) -> f64 {
    NaiveBayes.accuracy(data, train, test, features)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CvOptions {
    pub folds: usize,
    pub seed: u64,
    pub stratified: bool,
    /// Recompute the ranking on each training split.
    pub reselect: bool,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self {
            folds: 5,
            seed: 42,
            stratified: true,
            reselect: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvCurve {
    /// `accuracy[k - 1]` is the mean fold accuracy using the first `k` features.
    pub accuracy: Vec<f64>,
    /// Smallest `k` attaining the maximum accuracy.
    pub best_k: usize,
    /// `fold_accuracies[f][k - 1]`.
    pub fold_accuracies: Vec<Vec<f64>>,
    pub stratified: bool,
    pub warnings: Vec<String>,
}

/// Cross-validated naive Bayes accuracy for every prefix of `report`.
pub fn cv_curve(
    data: &DiscreteDataset,
    report: &SelectionReport,
    options: &CvOptions,
    engine: &ParallelEngine,
) -> Result<CvCurve> {
    cv_curve_with(data, report, options, engine, &NaiveBayes)
}

pub fn cv_curve_with<C: Classifier>(
    data: &DiscreteDataset,
    report: &SelectionReport,
    options: &CvOptions,
    engine: &ParallelEngine,
    classifier: &C,
) -> Result<CvCurve> {
    let k_max = report.ranking.len();
    if k_max == 0 {
        return Err(Error::InvalidConfig("cannot cross-validate an empty ranking".into()));
    }
    let plan = make_folds(data, options.folds, options.seed, options.stratified)?;
    let n_folds = plan.folds.len();
    let train: Vec<Vec<usize>> = (0..n_folds).map(|f| plan.train_rows(f)).collect();
    let mut warnings = plan.warnings.clone();

    let rankings: Vec<Vec<usize>> = if options.reselect {
        let mut rankings = Vec::with_capacity(n_folds);
        for (f, rows) in train.iter().enumerate() {
            let subset = data.subset_rows(rows);
            let fold_report = select(&subset, &report.objective, k_max, engine)?;
            if fold_report.ranking.len() < k_max {
                warnings.push(format!(
                    "fold {f}: reselection ranked only {} of {k_max} features",
                    fold_report.ranking.len()
                ));
            }
            rankings.push(fold_report.feature_indices());
        }
        rankings
    } else {
        vec![report.feature_indices(); n_folds]
    };

    let flat = engine.map_tasks(n_folds * k_max, |t| {
        let (f, k) = (t / k_max, t % k_max + 1);
        let features = &rankings[f][..k.min(rankings[f].len())];
        classifier.accuracy(data, &train[f], &plan.folds[f], features)
    });
    let fold_accuracies: Vec<Vec<f64>> = flat.chunks(k_max).map(<[f64]>::to_vec).collect();

    let accuracy: Vec<f64> = (0..k_max)
        .map(|k| fold_accuracies.iter().map(|row| row[k]).sum::<f64>() / n_folds as f64)
        .collect();
    let mut best_k = 1;
    for (i, &a) in accuracy.iter().enumerate() {
        if a > accuracy[best_k - 1] {
            best_k = i + 1;
        }
    }

    Ok(CvCurve {
        accuracy,
        best_k,
        fold_accuracies,
        stratified: plan.stratified,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(columns: Vec<Vec<u32>>, labels: Vec<u32>) -> DiscreteDataset {
        let names = (0..columns.len()).map(|j| format!("x{j}")).collect();
        DiscreteDataset::from_codes(columns, labels, names).unwrap()
    }

    fn sizes(plan: &FoldPlan) -> Vec<usize> {
        plan.folds.iter().map(Vec::len).collect()
    }

    #[test]
    fn fold_sizes() {
        let d = data(vec![(0..10).map(|i| i % 3).collect()], (0..10).map(|i| i % 2).collect());
        let plan = make_folds(&d, 5, 7, false).unwrap();
        assert_eq!(sizes(&plan), [2; 5]);
        let plan = make_folds(&d, 3, 7, false).unwrap();
        let mut s = sizes(&plan);
        s.sort_unstable();
        assert_eq!(s, [3, 3, 4]);
    }

    #[test]
    fn stratified_per_class_counts() {
        let labels: Vec<u32> = [0; 6].into_iter().chain([1; 6]).collect();
        let d = data(vec![(0..12).collect()], labels.clone());
        let plan = make_folds(&d, 3, 42, true).unwrap();
        assert!(plan.stratified);
        for fold in &plan.folds {
            let ones = fold.iter().filter(|&&r| labels[r] == 1).count();
            assert_eq!((fold.len() - ones, ones), (2, 2));
        }
    }

    #[test]
    fn stratified_fallback() {
        let labels = vec![0, 0, 0, 0, 0, 1];
        let d = data(vec![vec![0, 1, 0, 1, 0, 1]], labels);
        let plan = make_folds(&d, 3, 1, true).unwrap();
        assert!(!plan.stratified);
        assert_eq!(plan.warnings.len(), 1);
    }

    #[test]
    fn fold_errors() {
        let d = data(vec![vec![0, 1, 0]], vec![0, 1, 1]);
        assert!(make_folds(&d, 4, 0, false).unwrap_err().is_config());
        assert!(make_folds(&d, 1, 0, false).unwrap_err().is_config());
    }

    #[test]
    fn nb_separable() {
        let x = vec![0, 1, 0, 1, 2, 3, 2, 3];
        let labels = vec![0, 0, 0, 0, 1, 1, 1, 1];
        let d = data(vec![x], labels);
        let acc = nb_classify(&[0, 1, 4, 5], &[2, 3, 6, 7], &[0], &d);
        assert_eq!(acc, 1.0);
    }

    #[test]
    fn nb_constant_feature_predicts_lowest_class() {
        // x1 is constant on the training rows; balanced training -> equal
        // posteriors -> class 0 everywhere.
        let x0 = vec![0, 1, 0, 1, 0, 1, 0, 1];
        let x1 = vec![0, 0, 0, 0, 0, 0, 1, 0];
        let labels = vec![0, 1, 0, 1, 1, 1, 0, 0];
        let d = data(vec![x0, x1], labels);
        let train = [0, 1, 2, 3];
        let test = [4, 5, 6, 7];
        assert_eq!(NaiveBayes.predict(&d, &train, &test, &[1]), [0, 0, 0, 0]);
        assert_eq!(nb_classify(&train, &test, &[1], &d), 0.5);
    }

    #[test]
    fn nb_smoothing_flips_unsmoothed_tie() {
        // Training: class 0 has 2 rows (x = 1, 0); class 1 has 6 rows (x = 1, 0 x5).
        // Test row x = 1, true class 1.
        // Unsmoothed: P(0)P(1|0) = 2/8 * 1/2 = 1/8 and P(1)P(1|1) = 6/8 * 1/6 = 1/8,
        // a tie that would go to class 0.
        // Smoothed: 3/10 * 2/4 = 0.15 < 7/10 * 2/8 = 0.175, class 1.
        let x = vec![1, 0, 1, 0, 0, 0, 0, 0, 1];
        let labels = vec![0, 0, 1, 1, 1, 1, 1, 1, 1];
        let d = data(vec![x], labels);
        let train: Vec<usize> = (0..8).collect();
        assert_eq!(NaiveBayes.predict(&d, &train, &[8], &[0]), [1]);
        assert_eq!(nb_classify(&train, &[8], &[0], &d), 1.0);

        let p0: f64 = 0.3 * 0.5;
        let p1: f64 = 0.7 * 0.25;
        assert!((p0 - 0.15).abs() < 1e-15 && (p1 - 0.175).abs() < 1e-15);
        // Row 1 has x = 0: class 0 gives 0.3 * 2/4 = 0.15, class 1 gives 0.7 * 6/8 = 0.525.
        assert_eq!(NaiveBayes.predict(&d, &train, &[1], &[0]), [1]);
    }

    struct Constant(u32);
    impl Classifier for Constant {
        fn predict(&self, _: &DiscreteDataset, _: &[usize], test: &[usize], _: &[usize]) -> Vec<u32> {
            vec![self.0; test.len()]
        }
    }

    #[test]
    fn constant_classifier_gives_class_rate() {
        let labels: Vec<u32> = (0..20).map(|i| u32::from(i % 4 == 0)).collect();
        let x: Vec<u32> = (0..20).map(|i| (i % 3) as u32).collect();
        let d = data(vec![x.clone(), x], labels);
        let report = select(&d, &Default::default(), 1, &ParallelEngine::sequential()).unwrap();
        let options = CvOptions {
            folds: 5,
            ..Default::default()
        };
        let curve = cv_curve_with(&d, &report, &options, &ParallelEngine::sequential(), &Constant(0)).unwrap();
        assert!(curve.stratified);
        assert!(curve.accuracy.iter().all(|&a| (a - 0.75).abs() < 1e-12));
        assert_eq!(curve.best_k, 1);
    }
}
