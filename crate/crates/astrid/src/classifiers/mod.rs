//! Built-in trainable classifiers behind one interface.
//!
//! The roster spans both sensitivities the structure test needs: random
//! forest, decision tree and k-NN pick up attribute interactions, while
//! naive Bayes is interaction-blind by construction (it models each
//! attribute independently per class, so within-class permutations cannot
//! change what it learns).
//!
//! Training is deterministic given `(spec, data)` and invariant to the
//! order of training rows: internal randomness is seeded from
//! [`ClassifierSpec::train_seed`], and anything order-sensitive (bootstrap
//! draws, neighbor ties, floating-point summation) goes through a
//! content-sorted view of the rows. Row-order invariance is what makes the
//! trivial one-group permutation reproduce the baseline accuracy exactly.

mod forest;
mod knn;
mod naive_bayes;
mod tree;

use std::cmp::Ordering;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::dataset::{Column, Dataset, Schema};

pub use forest::ForestParams;
pub use knn::KnnParams;

/// Which classifier to train, plus its hyperparameters and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    pub train_seed: u64,
}

impl ClassifierSpec {
    pub fn new(kind: ClassifierKind, train_seed: u64) -> Self {
        ClassifierSpec { kind, train_seed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierKind {
    NaiveBayes,
    DecisionTree,
    RandomForest(ForestParams),
    Knn(KnnParams),
}

impl ClassifierKind {
    /// Short CLI-facing name.
    pub fn name(&self) -> &'static str {
        match self {
            ClassifierKind::NaiveBayes => "nb",
            ClassifierKind::DecisionTree => "tree",
            ClassifierKind::RandomForest(_) => "rf",
            ClassifierKind::Knn(_) => "knn",
        }
    }
}

impl FromStr for ClassifierKind {
    type Err = TrainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nb" | "naive-bayes" => Ok(ClassifierKind::NaiveBayes),
            "tree" | "decision-tree" => Ok(ClassifierKind::DecisionTree),
            "rf" | "random-forest" => Ok(ClassifierKind::RandomForest(ForestParams::default())),
            "knn" => Ok(ClassifierKind::Knn(KnnParams::default())),
            other => Err(TrainError::UnsupportedKind(other.to_string())),
        }
    }
}

/// A fitted classifier. Immutable; safe to share for concurrent prediction.
///
/// Prediction refuses datasets whose attribute/class metadata differs from
/// the training set: accuracy comparisons are only meaningful between
/// models queried on identically-shaped data.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    schema: Arc<Schema>,
    inner: ModelInner,
}

#[derive(Debug, Clone)]
enum ModelInner {
    NaiveBayes(naive_bayes::NbModel),
    Tree(tree::TreeModel),
    Forest(forest::ForestModel),
    Knn(knn::KnnModel),
}

impl TrainedModel {
    /// One class index per row. Total: every row gets a prediction.
    pub fn predict(&self, data: &Dataset) -> Result<Vec<usize>, PredictError> {
        if *data.schema() != *self.schema {
            return Err(PredictError::MetadataMismatch);
        }
        let out = (0..data.n_rows())
            .map(|i| match &self.inner {
                ModelInner::NaiveBayes(m) => m.predict_row(data, i),
                ModelInner::Tree(m) => m.predict_row(data, i),
                ModelInner::Forest(m) => m.predict_row(data, i),
                ModelInner::Knn(m) => m.predict_row(data, i),
            })
            .collect();
        Ok(out)
    }
}

/// Fit the classifier described by `spec` on `data`.
///
/// Deterministic: equal `(spec, data)` always yield models with identical
/// predictions, and reordering the training rows changes nothing.
pub fn train(spec: &ClassifierSpec, data: &Dataset) -> Result<TrainedModel, TrainError> {
    let n_classes = data.class_names().len();
    let mut present = vec![false; n_classes];
    for &c in data.labels() {
        present[c] = true;
    }
    if present.iter().filter(|&&p| p).count() < 2 {
        return Err(TrainError::SingleClassTraining);
    }

    let inner = match &spec.kind {
        ClassifierKind::NaiveBayes => {
            ModelInner::NaiveBayes(naive_bayes::NbModel::fit(data, n_classes))
        }
        ClassifierKind::DecisionTree => ModelInner::Tree(tree::fit_full_tree(data, n_classes)),
        ClassifierKind::RandomForest(params) => {
            params.check()?;
            ModelInner::Forest(forest::ForestModel::fit(
                data,
                n_classes,
                params,
                spec.train_seed,
            ))
        }
        ClassifierKind::Knn(params) => {
            params.check()?;
            ModelInner::Knn(knn::KnnModel::fit(data, n_classes, params))
        }
    };
    Ok(TrainedModel {
        schema: data.shared_schema(),
        inner,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrainError {
    #[error("training set contains fewer than two classes")]
    SingleClassTraining,
    #[error("unknown classifier kind `{0}` (expected nb, tree, rf or knn)")]
    UnsupportedKind(String),
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredictError {
    #[error("dataset metadata does not match the model's training set")]
    MetadataMismatch,
}

/// Row indices sorted by cell content (then label), giving an ordering that
/// depends only on what the rows contain, not where they are stored.
fn canonical_row_order(data: &Dataset) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..data.n_rows()).collect();
    idx.sort_by(|&a, &b| {
        for col in data.columns() {
            let ord = match col {
                Column::Numeric(v) => v[a].total_cmp(&v[b]),
                Column::Nominal(v) => v[a].cmp(&v[b]),
            };
            if ord != Ordering::Equal {
                return ord;
            }
        }
        data.labels()[a].cmp(&data.labels()[b])
    });
    idx
}

/// Sum in ascending value order, so the result is a function of the value
/// multiset alone. Keeps per-class statistics bitwise identical under
/// within-class permutations.
fn sorted_sum_stats(values: &mut [f64]) -> (f64, f64) {
    values.sort_by(f64::total_cmp);
    let n = values.len().max(1) as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var)
}

/// Majority class from counts; ties go to the lowest class index.
fn argmax_class(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &count) in counts.iter().enumerate() {
        if count > counts[best] {
            best = c;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AttributeKind, Schema};
    use crate::permutation::{sample_permuted, Grouping};
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn numeric_dataset(columns: Vec<Vec<f64>>, labels: Vec<usize>) -> Dataset {
        let m = columns.len();
        let n_classes = labels.iter().max().unwrap() + 1;
        Dataset::new(
            Schema {
                attribute_names: (0..m).map(|j| format!("a{}", j + 1)).collect(),
                attribute_kinds: vec![AttributeKind::Numeric; m],
                class_names: (0..n_classes).map(|c| format!("c{c}")).collect(),
            },
            columns.into_iter().map(Column::Numeric).collect(),
            labels,
        )
    }

    /// Two interleaved spirals-ish blobs plus a noise column; enough
    /// structure for every classifier to beat chance.
    pub(crate) fn blobs(n_per_class: usize, seed: u64) -> Dataset {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut noise = Vec::new();
        let mut labels = Vec::new();
        for class in 0..2usize {
            let center = if class == 0 { -1.0 } else { 1.0 };
            for _ in 0..n_per_class {
                a.push(center + rng.random::<f64>() - 0.5);
                b.push(-center + rng.random::<f64>() - 0.5);
                noise.push(rng.random::<f64>());
                labels.push(class);
            }
        }
        numeric_dataset(vec![a, b, noise], labels)
    }

    #[test]
    fn single_class_training_is_rejected() {
        let data = numeric_dataset(vec![vec![1.0, 2.0]], vec![0, 0]);
        let spec = ClassifierSpec::new(ClassifierKind::NaiveBayes, 0);
        assert!(matches!(
            train(&spec, &data),
            Err(TrainError::SingleClassTraining)
        ));
    }

    #[test]
    fn metadata_mismatch_is_rejected() {
        let data = blobs(10, 1);
        let spec = ClassifierSpec::new(ClassifierKind::DecisionTree, 0);
        let model = train(&spec, &data).unwrap();
        let other = numeric_dataset(vec![vec![0.0, 1.0]], vec![0, 1]);
        assert_eq!(model.predict(&other), Err(PredictError::MetadataMismatch));
    }

    #[test]
    fn kind_parsing() {
        assert_eq!(
            "nb".parse::<ClassifierKind>().unwrap(),
            ClassifierKind::NaiveBayes
        );
        assert_eq!(
            "rf".parse::<ClassifierKind>().unwrap().name(),
            "rf"
        );
        assert!(matches!(
            "svm".parse::<ClassifierKind>(),
            Err(TrainError::UnsupportedKind(_))
        ));
    }

    #[test]
    fn training_is_deterministic() {
        let data = blobs(40, 3);
        let probe = blobs(20, 4);
        for kind in [
            ClassifierKind::NaiveBayes,
            ClassifierKind::DecisionTree,
            ClassifierKind::RandomForest(ForestParams {
                trees: 15,
                ..ForestParams::default()
            }),
            ClassifierKind::Knn(KnnParams::default()),
        ] {
            let spec = ClassifierSpec::new(kind, 7);
            let m1 = train(&spec, &data).unwrap();
            let m2 = train(&spec, &data).unwrap();
            assert_eq!(m1.predict(&probe).unwrap(), m2.predict(&probe).unwrap());
        }
    }

    #[test]
    fn training_is_row_order_invariant() {
        let data = blobs(30, 5);
        let probe = blobs(15, 6);
        // A within-class whole-row reshuffle of the training data.
        let reordered = sample_permuted(
            &data,
            &Grouping::single_group(3),
            &mut ChaCha8Rng::seed_from_u64(99),
        )
        .unwrap();
        assert_ne!(reordered, data, "shuffle should actually move rows");
        for kind in [
            ClassifierKind::NaiveBayes,
            ClassifierKind::DecisionTree,
            ClassifierKind::RandomForest(ForestParams {
                trees: 15,
                ..ForestParams::default()
            }),
            ClassifierKind::Knn(KnnParams::default()),
        ] {
            let spec = ClassifierSpec::new(kind.clone(), 11);
            let on_original = train(&spec, &data).unwrap().predict(&probe).unwrap();
            let on_reordered = train(&spec, &reordered).unwrap().predict(&probe).unwrap();
            assert_eq!(on_original, on_reordered, "{} not order invariant", kind.name());
        }
    }
}
