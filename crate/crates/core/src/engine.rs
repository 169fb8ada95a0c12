//! Fork/join evaluation of independent association tasks.
//!
//! A batch of candidate features is evaluated against one partner column
//! (the labels, or the most recently selected feature). Small batches, or any
//! batch on a single-worker engine, run inline on the calling thread. Larger
//! batches are cut into one contiguous block per worker; each worker fills its
//! own block and the join concatenates blocks in order. Every element is a
//! pure function of its inputs, so the result is bit-identical for every
//! worker count and threshold.

use std::ops::Range;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::association::{cvtest, AssociationValue};
use crate::dataset::DiscreteDataset;
use crate::error::{Error, Result};
use crate::selector::SelectionReport;

pub const DEFAULT_PAR_THRESHOLD: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chunking {
    /// Contiguous index ranges, one per worker.
    #[default]
    Block,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub workers: usize,
    /// Batches with at most this many tasks run inline.
    pub par_threshold: usize,
    pub chunking: Chunking,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            workers: 1,
            par_threshold: DEFAULT_PAR_THRESHOLD,
            chunking: Chunking::Block,
        }
    }
}

impl EngineConfig {
    pub fn with_workers(workers: usize) -> Self {
        Self {
            workers,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::InvalidConfig("workers must be >= 1".into()));
        }
        Ok(())
    }
}

/// What every candidate in a batch is tested against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partner {
    Labels,
    Feature(usize),
}

/// Candidates evaluated against a common partner in one fork/join step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskBatch {
    candidates: Vec<usize>,
    partner: Partner,
}

impl TaskBatch {
    /// `candidates` must be strictly increasing.
    pub fn new(candidates: Vec<usize>, partner: Partner) -> Result<Self> {
        if candidates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "batch candidates must be strictly increasing".into(),
            ));
        }
        Ok(Self { candidates, partner })
    }

    pub fn candidates(&self) -> &[usize] {
        &self.candidates
    }

    pub fn partner(&self) -> Partner {
        self.partner
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

/// Instrumentation counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EngineStats {
    /// Number of Cramer's V tests evaluated.
    pub cvtest_calls: u64,
    /// Number of batches dispatched across workers.
    pub fork_events: u64,
}

/// Worker pool plus counters. The pool is built once and reused for every
/// batch; only one coordinating thread should drive an engine at a time.
#[derive(Debug)]
pub struct ParallelEngine {
    config: EngineConfig,
    pool: Option<rayon::ThreadPool>,
    cvtest_calls: AtomicU64,
    fork_events: AtomicU64,
}

impl ParallelEngine {
    pub fn new(config: EngineConfig) -> Result<Self> {
        config.validate()?;
        let pool = if config.workers > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(config.workers)
                .thread_name(|i| format!("fselect-worker-{i}"))
                .build()
                .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
            Some(pool)
        } else {
            None
        };
        Ok(Self {
            config,
            pool,
            cvtest_calls: AtomicU64::new(0),
            fork_events: AtomicU64::new(0),
        })
    }

    pub fn sequential() -> Self {
        Self::new(EngineConfig::default()).expect("default config is valid")
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn workers(&self) -> usize {
        self.config.workers
    }

    pub fn stats(&self) -> EngineStats {
        EngineStats {
            cvtest_calls: self.cvtest_calls.load(Ordering::Relaxed),
            fork_events: self.fork_events.load(Ordering::Relaxed),
        }
    }

    pub fn reset_stats(&self) {
        self.cvtest_calls.store(0, Ordering::Relaxed);
        self.fork_events.store(0, Ordering::Relaxed);
    }

    /// Evaluates `f(0), .., f(n - 1)` and returns the results in index order.
    ///
    /// Runs inline when `n <= par_threshold` or there is a single worker;
    /// otherwise forks one contiguous block per worker and joins.
    pub fn map_tasks<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        let pool = match &self.pool {
            Some(pool) if n > self.config.par_threshold => pool,
            _ => return (0..n).map(f).collect(),
        };
        self.fork_events.fetch_add(1, Ordering::Relaxed);
        let ranges = block_ranges(n, self.config.workers);
        let mut parts: Vec<Vec<T>> = ranges.iter().map(|_| Vec::new()).collect();
        let f = &f;
        pool.scope(|scope| {
            for (part, range) in parts.iter_mut().zip(ranges) {
                scope.spawn(move |_| *part = range.map(f).collect());
            }
        });
        parts.into_iter().flatten().collect()
    }

    /// Cramer's V of every candidate column against the batch partner;
    /// `out[i]` belongs to `batch.candidates()[i]`.
    pub fn par_fold(&self, batch: &TaskBatch, data: &DiscreteDataset) -> Vec<AssociationValue> {
        let (partner, partner_card) = match batch.partner {
            Partner::Labels => (data.labels(), data.n_classes()),
            Partner::Feature(j) => (data.column(j), data.card(j)),
        };
        self.map_tasks(batch.len(), |i| {
            let j = batch.candidates[i];
            self.cvtest_calls.fetch_add(1, Ordering::Relaxed);
            cvtest(data.column(j), partner, data.card(j), partner_card)
                .expect("dataset columns share a length and hold in-range codes")
        })
    }
}

/// Splits `0..n` into `workers` contiguous ranges whose sizes differ by at
/// most one; the first `n % workers` ranges get the extra element.
pub fn block_ranges(n: usize, workers: usize) -> Vec<Range<usize>> {
    let workers = workers.max(1);
    let base = n / workers;
    let extra = n % workers;
    let mut start = 0;
    (0..workers)
        .map(|w| {
            let len = base + usize::from(w < extra);
            let range = start..start + len;
            start += len;
            range
        })
        .collect()
}

/// Wall-clock samples of a repeated selection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub workers: usize,
    pub samples: Vec<f64>,
    pub median_seconds: f64,
    /// Report from the last repeat.
    #[serde(skip)]
    pub last_report: Option<SelectionReport>,
}

/// Times `run` `repeats` times. The closure should cover only the selection
/// itself, not loading or discretization.
pub fn measure<F>(workers: usize, repeats: usize, mut run: F) -> Result<Measurement>
where
    F: FnMut() -> Result<SelectionReport>,
{
    if repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be >= 1".into()));
    }
    let mut samples = Vec::with_capacity(repeats);
    let mut last_report = None;
    for _ in 0..repeats {
        let start = Instant::now();
        let report = run()?;
        samples.push(start.elapsed().as_secs_f64());
        last_report = Some(report);
    }
    Ok(Measurement {
        workers,
        median_seconds: median(&samples),
        samples,
        last_report,
    })
}

/// Median; the mean of the two middle values for even lengths. NaN if empty.
pub fn median(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return f64::NAN;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    }
}
