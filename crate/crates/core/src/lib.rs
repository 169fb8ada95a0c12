//! Feature ranking by Cramer's V max-association / min-redundancy criteria.
//!
//! The pipeline is:
//!
//! 1. [`dataset`]: load a labeled CSV and discretize it into dense category codes.
//! 2. [`association`]: contingency tables, Pearson chi-square and Cramer's V.
//! 3. [`selector`]: incremental greedy ranking under the quotient (`mmaiq`) or
//!    subtractive (`mmais`) objective, with a running redundancy accumulator.
//! 4. [`engine`]: fork/join evaluation of independent association tasks over a
//!    fixed worker pool, with an inline fallback below a granularity threshold.
//! 5. [`cv`]: K-fold cross-validation of a naive Bayes classifier over ranking
//!    prefixes, used to pick the subset size.
//!
//! Every result is deterministic and independent of the worker count.

pub mod association;
pub mod cv;
pub mod dataset;
pub mod engine;
mod error;
pub mod selector;
pub mod synth;

pub use association::{chi2, cramers_v, cvtest, gen_ct, AssociationValue, ContingencyTable};
pub use cv::{
    cv_curve, cv_curve_with, make_folds, nb_classify, Classifier, CvCurve, CvOptions, FoldPlan,
    NaiveBayes,
};
pub use dataset::{
    discretize, load_csv, Column, Discretization, DiscreteDataset, DiscretizeMethod,
    DiscretizerSpec, LabelColumn, RawDataset,
};
pub use engine::{
    block_ranges, measure, median, Chunking, EngineConfig, EngineStats, Measurement,
    ParallelEngine, Partner, TaskBatch,
};
pub use error::{Error, Result};
pub use selector::{
    relevance_vector, score_curve, select, step_score, subset_criteria, CurvePoint, Objective, ObjectiveKind,
    RankedFeature, SelectionReport, SelectionState,
};
