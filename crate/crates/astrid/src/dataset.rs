//! Typed dataset container, validation, preprocessing and the stratified
//! three-way split used by the evaluation protocol.
//!
//! A [`Dataset`] is an `n x m` matrix of numeric or nominal cells plus a
//! class label per row. Values arrive through [`crate::ingest`], which
//! interns nominal categories and class names to integer indices; everything
//! downstream works on indices.

use std::sync::Arc;

use thiserror::Error;

use crate::seeding;

/// Kind of a single attribute column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttributeKind {
    Numeric,
    /// Nominal attribute with its ordered list of category names.
    Nominal(Vec<String>),
}

impl AttributeKind {
    pub fn is_numeric(&self) -> bool {
        matches!(self, AttributeKind::Numeric)
    }
}

/// A single cell value: a numeric scalar or a category index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Num(f64),
    Cat(usize),
}

impl Value {
    /// Bit-exact key used when deduplicating data matrices.
    pub(crate) fn key(self) -> u64 {
        match self {
            Value::Num(x) => x.to_bits(),
            Value::Cat(c) => c as u64,
        }
    }
}

/// Attribute and class metadata shared by all row subsets of one source.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub attribute_names: Vec<String>,
    pub attribute_kinds: Vec<AttributeKind>,
    pub class_names: Vec<String>,
}

/// One attribute column, stored contiguously for cache-friendly training.
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    Nominal(Vec<usize>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Nominal(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value(&self, row: usize) -> Value {
        match self {
            Column::Numeric(v) => Value::Num(v[row]),
            Column::Nominal(v) => Value::Cat(v[row]),
        }
    }
}

/// Complete dataset: no missing cells (missingness is resolved at ingestion,
/// see [`RawDataset::preprocess`]).
///
/// Immutable after construction; cheap to share read-only across concurrent
/// trials. Use [`Dataset::validate`] to check the structural invariants that
/// construction does not enforce.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Arc<Schema>,
    columns: Vec<Column>,
    labels: Vec<usize>,
}

impl Dataset {
    /// Assemble a dataset from parts. Shape mismatches are programming
    /// errors and panic; semantic invariants are checked by [`validate`].
    ///
    /// [`validate`]: Dataset::validate
    pub fn new(schema: Schema, columns: Vec<Column>, labels: Vec<usize>) -> Self {
        Self::from_shared_schema(Arc::new(schema), columns, labels)
    }

    pub(crate) fn from_shared_schema(
        schema: Arc<Schema>,
        columns: Vec<Column>,
        labels: Vec<usize>,
    ) -> Self {
        assert_eq!(
            schema.attribute_names.len(),
            schema.attribute_kinds.len(),
            "attribute name/kind count mismatch"
        );
        assert_eq!(
            columns.len(),
            schema.attribute_kinds.len(),
            "column count does not match schema"
        );
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), labels.len(), "column {j} length mismatch");
            match (col, &schema.attribute_kinds[j]) {
                (Column::Numeric(_), AttributeKind::Numeric) => {}
                (Column::Nominal(_), AttributeKind::Nominal(_)) => {}
                _ => panic!("column {j} storage does not match its declared kind"),
            }
        }
        Dataset {
            schema,
            columns,
            labels,
        }
    }

    /// Number of rows.
    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    /// Number of attributes.
    pub fn n_attributes(&self) -> usize {
        self.columns.len()
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub(crate) fn shared_schema(&self) -> Arc<Schema> {
        Arc::clone(&self.schema)
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.schema.attribute_names
    }

    pub fn attribute_kinds(&self) -> &[AttributeKind] {
        &self.schema.attribute_kinds
    }

    pub fn class_names(&self) -> &[String] {
        &self.schema.class_names
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &Column {
        &self.columns[j]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn cell(&self, row: usize, col: usize) -> Value {
        self.columns[col].value(row)
    }

    /// Fraction of rows carrying the most frequent class label.
    pub fn major_class_proportion(&self) -> f64 {
        if self.labels.is_empty() {
            return 0.0;
        }
        let mut counts = vec![0usize; self.schema.class_names.len()];
        for &c in &self.labels {
            counts[c] += 1;
        }
        let max = counts.into_iter().max().unwrap_or(0);
        max as f64 / self.labels.len() as f64
    }

    /// Row indices of each class, in ascending row order.
    pub(crate) fn rows_by_class(&self) -> Vec<Vec<usize>> {
        let mut by_class = vec![Vec::new(); self.schema.class_names.len()];
        for (i, &c) in self.labels.iter().enumerate() {
            by_class[c].push(i);
        }
        by_class
    }

    /// Copy of the rows given by `rows`, sharing this dataset's schema.
    pub(crate) fn select_rows(&self, rows: &[usize]) -> Dataset {
        let columns = self
            .columns
            .iter()
            .map(|col| match col {
                Column::Numeric(v) => Column::Numeric(rows.iter().map(|&i| v[i]).collect()),
                Column::Nominal(v) => Column::Nominal(rows.iter().map(|&i| v[i]).collect()),
            })
            .collect();
        let labels = rows.iter().map(|&i| self.labels[i]).collect();
        Dataset {
            schema: Arc::clone(&self.schema),
            columns,
            labels,
        }
    }

    /// Check every structural invariant; returns one entry per violation,
    /// empty when the dataset is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.n_rows() == 0 {
            out.push(Violation::NoRows);
        }
        if self.n_attributes() == 0 {
            out.push(Violation::NoAttributes);
        }
        for (j, name) in self.schema.attribute_names.iter().enumerate() {
            if self.schema.attribute_names[..j].iter().any(|n| n == name) {
                out.push(Violation::DuplicateAttributeName {
                    col: j,
                    name: name.clone(),
                });
            }
        }
        for (j, kind) in self.schema.attribute_kinds.iter().enumerate() {
            if let AttributeKind::Nominal(categories) = kind {
                if categories.is_empty() {
                    out.push(Violation::EmptyCategoryList { col: j });
                }
                for (c, cat) in categories.iter().enumerate() {
                    if categories[..c].iter().any(|other| other == cat) {
                        out.push(Violation::DuplicateCategoryName {
                            col: j,
                            name: cat.clone(),
                        });
                    }
                }
            }
        }
        for (j, col) in self.columns.iter().enumerate() {
            if let (Column::Nominal(values), AttributeKind::Nominal(categories)) =
                (col, &self.schema.attribute_kinds[j])
            {
                for (i, &v) in values.iter().enumerate() {
                    if v >= categories.len() {
                        out.push(Violation::CategoryIndexOutOfRange {
                            row: i,
                            col: j,
                            index: v,
                            n_categories: categories.len(),
                        });
                    }
                }
            }
        }
        let n_classes = self.schema.class_names.len();
        let mut seen = vec![false; n_classes];
        for (i, &c) in self.labels.iter().enumerate() {
            if c >= n_classes {
                out.push(Violation::ClassIndexOutOfRange {
                    row: i,
                    index: c,
                    n_classes,
                });
            } else {
                seen[c] = true;
            }
        }
        for (c, present) in seen.iter().enumerate() {
            if !present {
                out.push(Violation::ClassWithoutRows {
                    class: c,
                    name: self.schema.class_names[c].clone(),
                });
            }
        }
        out
    }

    /// Stratified 3-way split following the train / V-test / CI-test
    /// protocol. Per-class counts use largest-remainder rounding, so the
    /// parts track `fractions` as closely as integers allow. Deterministic
    /// given `seed`.
    pub fn stratified_split(
        &self,
        fractions: (f64, f64, f64),
        seed: u64,
    ) -> Result<DataSplit, SplitError> {
        let (f_train, f_v, f_ci) = fractions;
        let sum = f_train + f_v + f_ci;
        if !(f_train > 0.0 && f_v > 0.0 && f_ci > 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(SplitError::InvalidFractions { fractions });
        }
        let by_class = self.rows_by_class();
        for (c, rows) in by_class.iter().enumerate() {
            if rows.len() < 3 {
                return Err(SplitError::ClassTooSmall {
                    class: self.schema.class_names[c].clone(),
                    count: rows.len(),
                });
            }
        }

        let mut parts: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for (c, rows) in by_class.iter().enumerate() {
            let mut rows = rows.clone();
            let mut rng = seeding::derive_rng(&[
                &seed.to_le_bytes(),
                b"split",
                &(c as u64).to_le_bytes(),
            ]);
            use rand::seq::SliceRandom;
            rows.shuffle(&mut rng);

            let counts = largest_remainder(rows.len(), [f_train, f_v, f_ci]);
            let mut offset = 0;
            for (part, &count) in parts.iter_mut().zip(counts.iter()) {
                part.extend_from_slice(&rows[offset..offset + count]);
                offset += count;
            }
        }
        // Keep each part in source row order so splitting is a pure row
        // selection, independent of class iteration order.
        for part in &mut parts {
            part.sort_unstable();
        }
        let [train_rows, v_rows, ci_rows] = parts;
        Ok(DataSplit {
            train: self.select_rows(&train_rows),
            test_v: self.select_rows(&v_rows),
            test_ci: self.select_rows(&ci_rows),
        })
    }
}

/// Apportion `total` into 3 integer parts tracking `fractions`
/// (largest-remainder method; remainder ties go to the earlier part).
fn largest_remainder(total: usize, fractions: [f64; 3]) -> [usize; 3] {
    let ideal: Vec<f64> = fractions.iter().map(|f| f * total as f64).collect();
    let mut counts: Vec<usize> = ideal.iter().map(|x| x.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let ra = ideal[a] - ideal[a].floor();
        let rb = ideal[b] - ideal[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for i in 0..(total - assigned) {
        counts[order[i % 3]] += 1;
    }
    [counts[0], counts[1], counts[2]]
}

/// The three disjoint parts of one dataset: training data, the part held
/// out for expected-accuracy estimates, and the part held out for
/// confidence intervals.
#[derive(Debug, Clone)]
pub struct DataSplit {
    pub train: Dataset,
    pub test_v: Dataset,
    pub test_ci: Dataset,
}

/// A dataset as ingested: cells may still be missing. [`preprocess`]
/// resolves missingness and produces a [`Dataset`].
///
/// [`preprocess`]: RawDataset::preprocess
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    pub attribute_names: Vec<String>,
    pub attribute_kinds: Vec<AttributeKind>,
    /// Row-major cells; `None` marks a missing value.
    pub rows: Vec<Vec<Option<Value>>>,
    /// Class index per row; `None` marks a missing class label.
    pub labels: Vec<Option<usize>>,
    pub class_names: Vec<String>,
}

impl RawDataset {
    /// Resolve missingness and drop degenerate columns: rows containing any
    /// missing cell are removed first, then any column whose remaining
    /// values are all identical. Class names left without rows are dropped
    /// and labels re-indexed.
    ///
    /// Idempotent: preprocessing an already-clean dataset only removes
    /// constant columns, and a second pass finds nothing left to do.
    pub fn preprocess(&self) -> Result<Dataset, PreprocessError> {
        let keep_rows: Vec<usize> = (0..self.rows.len())
            .filter(|&i| self.labels[i].is_some() && self.rows[i].iter().all(|c| c.is_some()))
            .collect();
        if keep_rows.is_empty() {
            return Err(PreprocessError::EmptyResult);
        }

        let m = self.attribute_names.len();
        let keep_cols: Vec<usize> = (0..m)
            .filter(|&j| {
                let first = self.rows[keep_rows[0]][j];
                keep_rows.iter().any(|&i| self.rows[i][j] != first)
            })
            .collect();
        if keep_cols.is_empty() {
            return Err(PreprocessError::EmptyResult);
        }

        // Re-intern classes so that every surviving class name has rows.
        let old_n_classes = self.class_names.len();
        let mut used = vec![false; old_n_classes];
        for &i in &keep_rows {
            used[self.labels[i].unwrap()] = true;
        }
        let mut remap = vec![usize::MAX; old_n_classes];
        let mut class_names = Vec::new();
        for (c, name) in self.class_names.iter().enumerate() {
            if used[c] {
                remap[c] = class_names.len();
                class_names.push(name.clone());
            }
        }

        let schema = Schema {
            attribute_names: keep_cols
                .iter()
                .map(|&j| self.attribute_names[j].clone())
                .collect(),
            attribute_kinds: keep_cols
                .iter()
                .map(|&j| self.attribute_kinds[j].clone())
                .collect(),
            class_names,
        };
        let columns = keep_cols
            .iter()
            .map(|&j| match self.attribute_kinds[j] {
                AttributeKind::Numeric => Column::Numeric(
                    keep_rows
                        .iter()
                        .map(|&i| match self.rows[i][j] {
                            Some(Value::Num(x)) => x,
                            _ => unreachable!("numeric column holds non-numeric cell"),
                        })
                        .collect(),
                ),
                AttributeKind::Nominal(_) => Column::Nominal(
                    keep_rows
                        .iter()
                        .map(|&i| match self.rows[i][j] {
                            Some(Value::Cat(c)) => c,
                            _ => unreachable!("nominal column holds non-nominal cell"),
                        })
                        .collect(),
                ),
            })
            .collect();
        let labels = keep_rows
            .iter()
            .map(|&i| remap[self.labels[i].unwrap()])
            .collect();
        Ok(Dataset::new(schema, columns, labels))
    }
}

/// One structural invariant violation found by [`Dataset::validate`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("dataset has no rows")]
    NoRows,
    #[error("dataset has no attributes")]
    NoAttributes,
    #[error("attribute name `{name}` duplicated at column {col}")]
    DuplicateAttributeName { col: usize, name: String },
    #[error("nominal attribute at column {col} has an empty category list")]
    EmptyCategoryList { col: usize },
    #[error("category name `{name}` duplicated in column {col}")]
    DuplicateCategoryName { col: usize, name: String },
    #[error("cell ({row}, {col}) has category index {index} but the attribute has {n_categories} categories")]
    CategoryIndexOutOfRange {
        row: usize,
        col: usize,
        index: usize,
        n_categories: usize,
    },
    #[error("row {row} has class index {index} but only {n_classes} classes are declared")]
    ClassIndexOutOfRange {
        row: usize,
        index: usize,
        n_classes: usize,
    },
    #[error("class `{name}` (index {class}) has no rows")]
    ClassWithoutRows { class: usize, name: String },
}

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("no rows or no columns remain after preprocessing")]
    EmptyResult,
}

#[derive(Debug, Error)]
pub enum SplitError {
    #[error("split fractions {fractions:?} must be positive and sum to 1")]
    InvalidFractions { fractions: (f64, f64, f64) },
    #[error("class `{class}` has only {count} rows; need at least 3 (one per part)")]
    ClassTooSmall { class: String, count: usize },
}
