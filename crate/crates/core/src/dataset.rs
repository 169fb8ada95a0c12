//! Tabular ingestion and discretization.
//!
//! A [`RawDataset`] holds real-valued or categorical feature columns plus a
//! label column as read from CSV. [`discretize`] turns it into a
//! [`DiscreteDataset`]: every column becomes a vector of dense category codes
//! `0..card`, which is what contingency tables are built from.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One feature column of a [`RawDataset`].
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    /// String-valued column, coded by first appearance. Bypasses binning.
    Categorical { codes: Vec<u32>, levels: Vec<String> },
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self, Column::Categorical { .. })
    }

    fn select_rows(&self, rows: &[usize]) -> Column {
        match self {
            Column::Numeric(v) => Column::Numeric(rows.iter().map(|&i| v[i]).collect()),
            Column::Categorical { codes, levels } => Column::Categorical {
                codes: rows.iter().map(|&i| codes[i]).collect(),
                levels: levels.clone(),
            },
        }
    }
}

/// Labeled tabular data before discretization.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    columns: Vec<Column>,
    labels: Vec<String>,
    feature_names: Vec<String>,
}

impl RawDataset {
    pub fn new(columns: Vec<Column>, labels: Vec<String>, feature_names: Vec<String>) -> Result<Self> {
        let rows = labels.len();
        if rows < 2 {
            return Err(Error::TooFewRows(rows));
        }
        if columns.is_empty() {
            return Err(Error::NoFeatures);
        }
        if feature_names.len() != columns.len() {
            return Err(Error::LengthMismatch {
                expected: columns.len(),
                found: feature_names.len(),
            });
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateFeature(name.clone()));
            }
        }
        for (column, name) in columns.iter().zip(&feature_names) {
            if column.len() != rows {
                return Err(Error::LengthMismatch {
                    expected: rows,
                    found: column.len(),
                });
            }
            match column {
                Column::Numeric(values) => {
                    if let Some(row) = values.iter().position(|v| !v.is_finite()) {
                        return Err(Error::NonFinite {
                            row: row + 1,
                            column: name.clone(),
                        });
                    }
                }
                Column::Categorical { codes, levels } => {
                    if let Some(&code) = codes.iter().find(|&&c| c as usize >= levels.len()) {
                        return Err(Error::CodeOutOfRange {
                            code,
                            card: levels.len(),
                        });
                    }
                }
            }
        }
        let distinct: HashSet<&str> = labels.iter().map(String::as_str).collect();
        if distinct.len() < 2 {
            return Err(Error::TooFewClasses);
        }
        Ok(Self {
            columns,
            labels,
            feature_names,
        })
    }

    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &Column {
        &self.columns[j]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Dataset made of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        Self::new(
            self.columns.iter().map(|c| c.select_rows(rows)).collect(),
            rows.iter().map(|&i| self.labels[i].clone()).collect(),
            self.feature_names.clone(),
        )
    }
}

/// Which column of the CSV holds the class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    /// Header name; if no header matches and the string is an integer, it is
    /// used as a zero-based column index.
    Name(String),
    Index(usize),
    /// The rightmost column.
    Last,
}

impl From<&str> for LabelColumn {
    fn from(s: &str) -> Self {
        LabelColumn::Name(s.to_string())
    }
}

impl From<usize> for LabelColumn {
    fn from(i: usize) -> Self {
        LabelColumn::Index(i)
    }
}

impl LabelColumn {
    fn resolve(&self, headers: &[String]) -> Result<usize> {
        match self {
            LabelColumn::Index(i) if *i < headers.len() => Ok(*i),
            LabelColumn::Index(i) => Err(Error::LabelColumnMissing(i.to_string())),
            LabelColumn::Last => headers
                .len()
                .checked_sub(1)
                .ok_or_else(|| Error::LabelColumnMissing("last".into())),
            LabelColumn::Name(name) => headers
                .iter()
                .position(|h| h == name)
                .or_else(|| name.parse::<usize>().ok().filter(|&i| i < headers.len()))
                .ok_or_else(|| Error::LabelColumnMissing(name.clone())),
        }
    }
}

/// Reads a headed CSV file. See [`read_csv`].
pub fn load_csv(path: impl AsRef<Path>, label: &LabelColumn, delimiter: u8) -> Result<RawDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, label, delimiter)
}

/// Parses CSV with a mandatory header row.
///
/// A feature column is categorical iff any of its cells fails to parse as a
/// number; categorical levels are coded by first appearance. Empty cells are
/// rejected.
pub fn read_csv<R: Read>(reader: R, label: &LabelColumn, delimiter: u8) -> Result<RawDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let label_idx = label.resolve(&headers)?;

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        if record.len() != headers.len() {
            return Err(Error::RaggedRow {
                row,
                found: record.len(),
                expected: headers.len(),
            });
        }
        for (j, field) in record.iter().enumerate() {
            if field.is_empty() {
                return Err(Error::MissingValue {
                    row,
                    column: headers[j].clone(),
                });
            }
            cells[j].push(field.to_string());
        }
    }

    let rows = cells[label_idx].len();
    if rows < 2 {
        return Err(Error::TooFewRows(rows));
    }

    let labels = std::mem::take(&mut cells[label_idx]);
    let mut columns = Vec::with_capacity(headers.len() - 1);
    let mut names = Vec::with_capacity(headers.len() - 1);
    for (j, raw) in cells.into_iter().enumerate() {
        if j == label_idx {
            continue;
        }
        columns.push(parse_column(raw));
        names.push(headers[j].clone());
    }
    RawDataset::new(columns, labels, names)
}

fn parse_column(raw: Vec<String>) -> Column {
    let numeric: Option<Vec<f64>> = raw.iter().map(|s| s.parse::<f64>().ok()).collect();
    match numeric {
        Some(values) => Column::Numeric(values),
        None => {
            let (codes, levels) = code_by_first_appearance(&raw);
            Column::Categorical { codes, levels }
        }
    }
}

fn code_by_first_appearance(values: &[String]) -> (Vec<u32>, Vec<String>) {
    let mut index: HashMap<&str, u32> = HashMap::new();
    let mut levels = Vec::new();
    let codes = values
        .iter()
        .map(|v| {
            *index.entry(v.as_str()).or_insert_with(|| {
                levels.push(v.clone());
                (levels.len() - 1) as u32
            })
        })
        .collect();
    (codes, levels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscretizeMethod {
    EqualFrequency,
    EqualWidth,
    Passthrough,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscretizerSpec {
    pub method: DiscretizeMethod,
    pub bins: usize,
}

impl Default for DiscretizerSpec {
    fn default() -> Self {
        Self {
            method: DiscretizeMethod::EqualFrequency,
            bins: 16,
        }
    }
}

impl DiscretizerSpec {
    pub fn new(method: DiscretizeMethod, bins: usize) -> Result<Self> {
        let spec = Self { method, bins };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.method != DiscretizeMethod::Passthrough && self.bins < 2 {
            return Err(Error::InvalidConfig(format!(
                "bins must be >= 2, got {}",
                self.bins
            )));
        }
        Ok(())
    }
}

/// Categorical view of a dataset. Immutable once built.
///
/// Columns are stored column-major. Codes in every column are dense: each
/// value in `0..card` occurs at least once. Label codes are dense in
/// `0..n_classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDataset {
    columns: Vec<Vec<u32>>,
    cards: Vec<usize>,
    labels: Vec<u32>,
    n_classes: usize,
    feature_names: Vec<String>,
}

impl DiscreteDataset {
    /// Builds a dataset from arbitrary nonnegative codes.
    ///
    /// Codes are re-densified per column preserving their relative order, so
    /// `[3, 7, 3]` becomes `[0, 1, 0]`.
    pub fn from_codes(columns: Vec<Vec<u32>>, labels: Vec<u32>, feature_names: Vec<String>) -> Result<Self> {
        let rows = labels.len();
        if rows < 2 {
            return Err(Error::TooFewRows(rows));
        }
        if columns.is_empty() {
            return Err(Error::NoFeatures);
        }
        if feature_names.len() != columns.len() {
            return Err(Error::LengthMismatch {
                expected: columns.len(),
                found: feature_names.len(),
            });
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateFeature(name.clone()));
            }
        }
        if let Some(c) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::LengthMismatch {
                expected: rows,
                found: c.len(),
            });
        }
        let data = Self::build(columns, labels, feature_names);
        if data.n_classes < 2 {
            return Err(Error::TooFewClasses);
        }
        Ok(data)
    }

    fn build(mut columns: Vec<Vec<u32>>, mut labels: Vec<u32>, feature_names: Vec<String>) -> Self {
        let cards = columns.iter_mut().map(|c| densify(c)).collect();
        let n_classes = densify(&mut labels);
        Self {
            columns,
            cards,
            labels,
            n_classes,
            feature_names,
        }
    }

    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.columns[j]
    }

    pub fn card(&self, j: usize) -> usize {
        self.cards[j]
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_name(&self, j: usize) -> &str {
        &self.feature_names[j]
    }

    /// A column with a single category carries no association with anything.
    pub fn is_constant(&self, j: usize) -> bool {
        self.cards[j] <= 1
    }

    /// Dataset restricted to `rows`, re-densified.
    ///
    /// Unlike [`DiscreteDataset::from_codes`] this does not require two
    /// classes to survive: training folds of an unstratified split may lose
    /// one, and association with a single-class label is simply zero.
    pub fn subset_rows(&self, rows: &[usize]) -> Self {
        let columns = self
            .columns
            .iter()
            .map(|c| rows.iter().map(|&i| c[i]).collect())
            .collect();
        let labels = rows.iter().map(|&i| self.labels[i]).collect();
        Self::build(columns, labels, self.feature_names.clone())
    }
}

/// Remaps codes to `0..k` preserving order, returning `k`.
fn densify(codes: &mut [u32]) -> usize {
    let Some(&max) = codes.iter().max() else {
        return 0;
    };
    let mut used = vec![false; max as usize + 1];
    for &c in codes.iter() {
        used[c as usize] = true;
    }
    let mut remap = vec![0u32; used.len()];
    let mut next = 0u32;
    for (code, &u) in used.iter().enumerate() {
        if u {
            remap[code] = next;
            next += 1;
        }
    }
    for c in codes.iter_mut() {
        *c = remap[*c as usize];
    }
    next as usize
}

/// Output of [`discretize`].
#[derive(Debug, Clone)]
pub struct Discretization {
    pub data: DiscreteDataset,
    /// Constant-column notices.
    pub warnings: Vec<String>,
}

pub fn discretize(raw: &RawDataset, spec: &DiscretizerSpec) -> Result<Discretization> {
    spec.validate()?;
    let columns: Vec<Vec<u32>> = raw
        .columns()
        .iter()
        .map(|column| match column {
            Column::Categorical { codes, .. } => codes.clone(),
            Column::Numeric(values) => match spec.method {
                DiscretizeMethod::EqualFrequency => equal_frequency_codes(values, spec.bins),
                DiscretizeMethod::EqualWidth => equal_width_codes(values, spec.bins),
                DiscretizeMethod::Passthrough => equal_frequency_codes(values, usize::MAX),
            },
        })
        .collect();
    let (labels, _) = code_by_first_appearance(raw.labels());
    let data = DiscreteDataset::from_codes(columns, labels, raw.feature_names().to_vec())?;
    let warnings = (0..data.n_features())
        .filter(|&j| data.is_constant(j))
        .map(|j| {
            format!(
                "feature `{}` is constant after discretization and will never be selected",
                data.feature_name(j)
            )
        })
        .collect();
    Ok(Discretization { data, warnings })
}

/// Row indices sorted by value, grouped into runs of equal values.
fn sorted_groups(values: &[f64]) -> (Vec<usize>, Vec<std::ops::Range<usize>>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut groups = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let v = values[order[start]];
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == v {
            end += 1;
        }
        groups.push(start..end);
        start = end;
    }
    (order, groups)
}

/// Quantile binning: a value's bin is fixed by the sorted rank of its first
/// occurrence, `floor(rank * bins / n)`, so equal values always share a bin.
/// With no more distinct values than bins, each distinct value gets its own
/// code in sorted order.
fn equal_frequency_codes(values: &[f64], bins: usize) -> Vec<u32> {
    let n = values.len();
    let (order, groups) = sorted_groups(values);
    let one_per_value = groups.len() <= bins;
    let mut codes = vec![0u32; n];
    for (g, range) in groups.iter().enumerate() {
        let code = if one_per_value {
            g
        } else {
            ((range.start as u128 * bins as u128) / n as u128) as usize
        };
        for &i in &order[range.clone()] {
            codes[i] = code as u32;
        }
    }
    densify(&mut codes);
    codes
}

/// `[min, max]` split into `bins` left-closed intervals; `max` falls in the last.
fn equal_width_codes(values: &[f64], bins: usize) -> Vec<u32> {
    let (_, groups) = sorted_groups(values);
    if groups.len() <= bins {
        return equal_frequency_codes(values, bins);
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (max - min) / bins as f64;
    let mut codes: Vec<u32> = values
        .iter()
        .map(|&x| (((x - min) / width).floor() as usize).min(bins - 1) as u32)
        .collect();
    densify(&mut codes);
    codes
}
