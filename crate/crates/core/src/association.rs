//! Cross-tabulation and Cramer's V.
//!
//! Cramer's V for an `r x s` table with `N` observations is
//! `sqrt(chi2 / (N * min(r - 1, s - 1)))`, where `chi2` is Pearson's statistic.
//! Rows and columns with a zero marginal are ignored in both the statistic and
//! the `min` term, so codes that never occur cannot deflate V. When either
//! variable has a single occurring category, V is defined as 0.
//!
//! Chi-square terms are summed in ascending order. The sum is therefore a
//! function of the multiset of cell terms alone, which makes V exactly
//! symmetric under transposition and exactly invariant under relabeling of
//! categories. Tables that pair `k` categories one-to-one use the closed form
//! `chi2 = N * (k - 1)`, so perfectly paired variables get V = 1 exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Co-occurrence counts of two categorical variables, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
    row_marginals: Vec<u64>,
    col_marginals: Vec<u64>,
    n: u64,
}

impl ContingencyTable {
    /// Builds a table from explicit counts. All rows must have equal length.
    pub fn from_counts(counts: &[Vec<u64>]) -> Result<Self> {
        let rows = counts.len();
        let cols = counts.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidConfig("contingency table must be at least 1x1".into()));
        }
        if let Some(r) = counts.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                expected: cols,
                found: r.len(),
            });
        }
        let flat = counts.iter().flatten().copied().collect();
        Ok(Self::from_flat(rows, cols, flat))
    }

    fn from_flat(rows: usize, cols: usize, counts: Vec<u64>) -> Self {
        let mut row_marginals = vec![0u64; rows];
        let mut col_marginals = vec![0u64; cols];
        for (a, row) in counts.chunks_exact(cols).enumerate() {
            for (b, &c) in row.iter().enumerate() {
                row_marginals[a] += c;
                col_marginals[b] += c;
            }
        }
        let n = row_marginals.iter().sum();
        Self {
            rows,
            cols,
            counts,
            row_marginals,
            col_marginals,
            n,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn count(&self, a: usize, b: usize) -> u64 {
        self.counts[a * self.cols + b]
    }

    pub fn row_marginals(&self) -> &[u64] {
        &self.row_marginals
    }

    pub fn col_marginals(&self) -> &[u64] {
        &self.col_marginals
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.counts.chunks_exact(self.cols).map(<[u64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0u64; self.counts.len()];
        for a in 0..self.rows {
            for b in 0..self.cols {
                counts[b * self.rows + a] = self.count(a, b);
            }
        }
        Self::from_flat(self.cols, self.rows, counts)
    }

    pub fn effective_rows(&self) -> usize {
        self.row_marginals.iter().filter(|&&m| m > 0).count()
    }

    pub fn effective_cols(&self) -> usize {
        self.col_marginals.iter().filter(|&&m| m > 0).count()
    }
}

/// Cramer's V together with the statistic it was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AssociationValue {
    pub v: f64,
    pub chi2: f64,
    pub effective_rows: usize,
    pub effective_cols: usize,
}

/// Cross-tabulates two code columns in a single counting pass.
pub fn gen_ct(x: &[u32], y: &[u32], card_x: usize, card_y: usize) -> Result<ContingencyTable> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::TooFewRows(0));
    }
    if card_x == 0 || card_y == 0 {
        return Err(Error::InvalidConfig("cardinality must be positive".into()));
    }
    let mut counts = vec![0u64; card_x * card_y];
    for (&a, &b) in x.iter().zip(y) {
        if a as usize >= card_x {
            return Err(Error::CodeOutOfRange { code: a, card: card_x });
        }
        if b as usize >= card_y {
            return Err(Error::CodeOutOfRange { code: b, card: card_y });
        }
        counts[a as usize * card_y + b as usize] += 1;
    }
    Ok(ContingencyTable::from_flat(card_x, card_y, counts))
}

/// Pearson's chi-square statistic, without continuity correction.
pub fn chi2(table: &ContingencyTable) -> f64 {
    if table.n == 0 || table.effective_rows() < 2 || table.effective_cols() < 2 {
        return 0.0;
    }
    let n = table.n as f64;
    if let Some(k) = one_to_one_categories(table) {
        return n * (k - 1) as f64;
    }
    let mut terms = Vec::with_capacity(table.counts.len());
    for (a, &rm) in table.row_marginals.iter().enumerate() {
        if rm == 0 {
            continue;
        }
        for (b, &cm) in table.col_marginals.iter().enumerate() {
            if cm == 0 {
                continue;
            }
            let expected = (rm as f64 * cm as f64) / n;
            let diff = table.count(a, b) as f64 - expected;
            terms.push(diff * diff / expected);
        }
    }
    terms.sort_unstable_by(f64::total_cmp);
    terms.iter().sum()
}

/// If every occurring row and every occurring column holds exactly one
/// nonzero cell, the table pairs `k` categories one-to-one and
/// `chi2 = n * (k - 1)` exactly. Returns that `k`.
fn one_to_one_categories(table: &ContingencyTable) -> Option<usize> {
    let mut nonzero_in_col = vec![0usize; table.cols];
    let mut k = 0;
    for row in table.counts.chunks_exact(table.cols) {
        let mut nonzero = 0;
        for (b, &c) in row.iter().enumerate() {
            if c > 0 {
                nonzero += 1;
                nonzero_in_col[b] += 1;
            }
        }
        match nonzero {
            0 => {}
            1 => k += 1,
            _ => return None,
        }
    }
    nonzero_in_col.iter().all(|&c| c <= 1).then_some(k)
}

pub fn cramers_v(table: &ContingencyTable) -> AssociationValue {
    let effective_rows = table.effective_rows();
    let effective_cols = table.effective_cols();
    let dof = effective_rows.min(effective_cols).saturating_sub(1);
    if dof == 0 {
        return AssociationValue {
            v: 0.0,
            chi2: 0.0,
            effective_rows,
            effective_cols,
        };
    }
    let chi2 = chi2(table);
    let v = (chi2 / (table.n as f64 * dof as f64)).sqrt().clamp(0.0, 1.0);
    AssociationValue {
        v,
        chi2,
        effective_rows,
        effective_cols,
    }
}

/// `cramers_v(gen_ct(..))`: the atomic unit of work for selection.
pub fn cvtest(x: &[u32], y: &[u32], card_x: usize, card_y: usize) -> Result<AssociationValue> {
    gen_ct(x, y, card_x, card_y).map(|t| cramers_v(&t))
}
