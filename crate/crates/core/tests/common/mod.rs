//! Test-only oracles, written independently of the library's code paths.
#![allow(dead_code)]

use fselect_core::{DiscreteDataset, Objective, ObjectiveKind};
use num::bigint::BigInt;
use num::rational::{BigRational, Ratio};
use num::{CheckedAdd, CheckedDiv, ToPrimitive, Zero};

type Rational128 = Ratio<i128>;
use rand::Rng;

/// Pearson chi-square in exact rational arithmetic, skipping zero-marginal
/// rows and columns: sum over cells of (O - R*C/N)^2 / (R*C/N).
pub fn exact_chi2(counts: &[Vec<u64>]) -> BigRational {
    let rows = counts.len();
    let cols = counts[0].len();
    let row_tot: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
    let col_tot: Vec<u64> = (0..cols).map(|b| counts.iter().map(|r| r[b]).sum()).collect();
    let n: u64 = row_tot.iter().sum();
    let mut chi = BigRational::zero();
    if n == 0 {
        return chi;
    }
    let big = |x: u64| BigRational::from_integer(BigInt::from(x));
    for a in 0..rows {
        for b in 0..cols {
            if row_tot[a] == 0 || col_tot[b] == 0 {
                continue;
            }
            let expected = big(row_tot[a] * col_tot[b]) / big(n);
            let diff = big(counts[a][b]) - expected.clone();
            chi += diff.clone() * diff / expected;
        }
    }
    chi
}

/// The same sum as [`exact_chi2`] in `i128` rationals, written per cell as
/// `(N*O - R*C)^2 / (N*R*C)`. `None` on overflow.
fn exact_chi2_small(counts: &[Vec<u64>]) -> Option<Rational128> {
    let cols = counts[0].len();
    let row_tot: Vec<i128> = counts.iter().map(|r| r.iter().sum::<u64>() as i128).collect();
    let col_tot: Vec<i128> = (0..cols).map(|b| counts.iter().map(|r| r[b]).sum::<u64>() as i128).collect();
    let n: i128 = row_tot.iter().sum();
    let mut chi = Rational128::zero();
    for (a, row) in counts.iter().enumerate() {
        for (b, &o) in row.iter().enumerate() {
            let rc = row_tot[a].checked_mul(col_tot[b])?;
            if rc == 0 {
                continue;
            }
            let diff = n.checked_mul(o as i128)?.checked_sub(rc)?;
            let term = Rational128::new(diff.checked_mul(diff)?, n.checked_mul(rc)?);
            chi = chi.checked_add(&term)?;
        }
    }
    Some(chi)
}

/// (chi2, V) from the exact statistic, with the effective-category rule and
/// V = 0 when either side has one occurring category.
pub fn oracle_chi2_v(counts: &[Vec<u64>]) -> (f64, f64) {
    let cols = counts[0].len();
    let eff_rows = counts.iter().filter(|r| r.iter().sum::<u64>() > 0).count();
    let eff_cols = (0..cols).filter(|&b| counts.iter().map(|r| r[b]).sum::<u64>() > 0).count();
    let n: u64 = counts.iter().flatten().sum();
    let dof = eff_rows.min(eff_cols).saturating_sub(1);
    if dof == 0 {
        return (0.0, 0.0);
    }
    let denom = n * dof as u64;
    if let Some(chi) = exact_chi2_small(counts) {
        if let Some(ratio) = chi.checked_div(&Rational128::from_integer(denom as i128)) {
            return (chi.to_f64().unwrap(), ratio.to_f64().unwrap().sqrt().min(1.0));
        }
    }
    let chi = exact_chi2(counts);
    let ratio = chi.clone() / BigRational::from_integer(BigInt::from(denom));
    (chi.to_f64().unwrap(), ratio.to_f64().unwrap().sqrt().min(1.0))
}

/// Calls `f` on every rows x cols table with entries summing to exactly `n`.
pub fn for_each_table(rows: usize, cols: usize, n: u64, f: &mut impl FnMut(&[Vec<u64>])) {
    fn rec(cells: &mut Vec<u64>, remaining: u64, slots: usize, rows: usize, cols: usize, f: &mut impl FnMut(&[Vec<u64>])) {
        if slots == 1 {
            cells.push(remaining);
            let table: Vec<Vec<u64>> = cells.chunks(cols).map(<[u64]>::to_vec).collect();
            debug_assert_eq!(table.len(), rows);
            f(&table);
            cells.pop();
            return;
        }
        for v in 0..=remaining {
            cells.push(v);
            rec(cells, remaining - v, slots - 1, rows, cols, f);
            cells.pop();
        }
    }
    rec(&mut Vec::new(), n, rows * cols, rows, cols, f);
}

pub fn random_table(rng: &mut impl Rng, max_dim: usize, max_cell: u64) -> Vec<Vec<u64>> {
    let rows = rng.random_range(1..=max_dim);
    let cols = rng.random_range(1..=max_dim);
    let mut t: Vec<Vec<u64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.random_range(0..=max_cell)).collect())
        .collect();
    if t.iter().flatten().all(|&c| c == 0) {
        t[0][0] = 1;
    }
    t
}

/// Random categorical dataset; columns may end up constant.
pub fn random_dataset(rng: &mut impl Rng, rows: usize, features: usize, max_card: u32, classes: u32) -> DiscreteDataset {
    let mut labels: Vec<u32> = (0..rows).map(|_| rng.random_range(0..classes)).collect();
    labels[0] = 0;
    labels[1] = 1;
    let columns = (0..features)
        .map(|_| {
            let card = rng.random_range(1..=max_card);
            // Mix in the label sometimes so relevances are spread out.
            let mix: f64 = rng.random();
            labels
                .iter()
                .map(|&y| {
                    if rng.random::<f64>() < mix {
                        y % card
                    } else {
                        rng.random_range(0..card)
                    }
                })
                .collect()
        })
        .collect();
    let names = (0..features).map(|j| format!("f{j}")).collect();
    DiscreteDataset::from_codes(columns, labels, names).unwrap()
}

fn v(data: &DiscreteDataset, a: usize, b: usize) -> f64 {
    fselect_core::cvtest(data.column(a), data.column(b), data.card(a), data.card(b))
        .unwrap()
        .v
}

fn relevance(data: &DiscreteDataset, j: usize) -> f64 {
    fselect_core::cvtest(data.column(j), data.labels(), data.card(j), data.n_classes())
        .unwrap()
        .v
}

/// Best next feature given `prefix`, with every redundancy sum recomputed
/// from scratch (in prefix order) and the objective written out directly.
pub fn brute_argmax(data: &DiscreteDataset, objective: &Objective, prefix: &[usize]) -> Option<usize> {
    let p = prefix.len() + 1;
    let mut best: Option<(usize, f64)> = None;
    for j in 0..data.n_features() {
        if prefix.contains(&j) || data.card(j) < 2 {
            continue;
        }
        let rel = relevance(data, j);
        let score = if prefix.is_empty() {
            rel
        } else {
            let mut sum = 0.0;
            for &i in prefix {
                sum += v(data, j, i);
            }
            let mean = sum / (p - 1) as f64;
            match objective.kind {
                ObjectiveKind::Mmais => rel - objective.lambda * mean,
                ObjectiveKind::Mmaiq => rel / if mean > 1e-12 { mean } else { 1e-12 },
            }
        };
        match best {
            Some((_, b)) if score <= b => {}
            _ => best = Some((j, score)),
        }
    }
    best.map(|(j, _)| j)
}

pub fn brute_ranking(data: &DiscreteDataset, objective: &Objective, k: usize) -> Vec<usize> {
    let mut prefix = Vec::new();
    while prefix.len() < k {
        match brute_argmax(data, objective, &prefix) {
            Some(j) => prefix.push(j),
            None => break,
        }
    }
    prefix
}

/// Number of Cramer's V tests a full greedy run of k steps must perform.
pub fn expected_calls(m: usize, k: usize) -> u64 {
    (m + (2..=k).map(|p| m - p + 1).sum::<usize>()) as u64
}

/// Exact Cramer's V between two code vectors.
pub fn oracle_v_columns(a: &[u32], b: &[u32]) -> f64 {
    let rows = *a.iter().max().unwrap() as usize + 1;
    let cols = *b.iter().max().unwrap() as usize + 1;
    let mut counts = vec![vec![0u64; cols]; rows];
    for (&x, &y) in a.iter().zip(b) {
        counts[x as usize][y as usize] += 1;
    }
    oracle_chi2_v(&counts).1
}

/// Writes `data` as a headed CSV of integer codes, label column last.
pub fn write_codes_csv(data: &DiscreteDataset, path: &std::path::Path) {
    use std::fmt::Write;
    let mut out = String::new();
    for name in data.feature_names() {
        let _ = write!(out, "{name},");
    }
    out.push_str("label\n");
    for r in 0..data.rows() {
        for j in 0..data.n_features() {
            let _ = write!(out, "{},", data.column(j)[r]);
        }
        let _ = writeln!(out, "y{}", data.labels()[r]);
    }
    std::fs::write(path, out).unwrap();
}
