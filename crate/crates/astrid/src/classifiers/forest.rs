//! Random forest: bagged CART trees with per-split attribute subsampling
//! and majority vote.
//!
//! Each tree's randomness comes from a generator seeded with
//! `train_seed + tree_index`, and bootstrap draws index into the
//! content-sorted row order, so the fitted ensemble depends only on the
//! multiset of training rows.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;

use super::tree::{fit_forest_tree, TreeModel};
use super::{argmax_class, canonical_row_order, TrainError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestParams {
    /// Number of trees in the ensemble.
    pub trees: usize,
    /// Draw each tree's training set as n samples with replacement.
    pub bootstrap: bool,
    /// Consider only ceil(sqrt(m)) attributes per split.
    pub feature_subsample: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            trees: 100,
            bootstrap: true,
            feature_subsample: true,
        }
    }
}

impl ForestParams {
    pub(super) fn check(&self) -> Result<(), TrainError> {
        if self.trees == 0 {
            return Err(TrainError::InvalidHyperparameter(
                "tree count must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub(super) struct ForestModel {
    trees: Vec<TreeModel>,
    n_classes: usize,
}

impl ForestModel {
    pub(super) fn fit(
        data: &Dataset,
        n_classes: usize,
        params: &ForestParams,
        train_seed: u64,
    ) -> Self {
        let canonical = canonical_row_order(data);
        let n = canonical.len();
        let mtry = if params.feature_subsample {
            Some((data.n_attributes() as f64).sqrt().ceil() as usize)
        } else {
            None
        };
        let trees = (0..params.trees)
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(train_seed.wrapping_add(t as u64));
                let rows: Vec<usize> = if params.bootstrap {
                    (0..n).map(|_| canonical[rng.random_range(0..n)]).collect()
                } else {
                    canonical.clone()
                };
                fit_forest_tree(data, n_classes, rows, mtry, &mut rng)
            })
            .collect();
        ForestModel { trees, n_classes }
    }

    pub(super) fn predict_row(&self, data: &Dataset, row: usize) -> usize {
        let mut votes = vec![0usize; self.n_classes];
        for tree in &self.trees {
            votes[tree.predict_row(data, row)] += 1;
        }
        argmax_class(&votes)
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::blobs;
    use super::super::{train, ClassifierKind, ClassifierSpec};
    use super::*;

    #[test]
    fn degenerate_forest_equals_plain_tree() {
        let data = blobs(40, 21);
        let probe = blobs(25, 22);
        let forest_spec = ClassifierSpec::new(
            ClassifierKind::RandomForest(ForestParams {
                trees: 1,
                bootstrap: false,
                feature_subsample: false,
            }),
            123,
        );
        let tree_spec = ClassifierSpec::new(ClassifierKind::DecisionTree, 123);
        let forest = train(&forest_spec, &data).unwrap();
        let tree = train(&tree_spec, &data).unwrap();
        assert_eq!(
            forest.predict(&probe).unwrap(),
            tree.predict(&probe).unwrap()
        );
    }

    #[test]
    fn zero_trees_is_rejected() {
        let data = blobs(5, 1);
        let spec = ClassifierSpec::new(
            ClassifierKind::RandomForest(ForestParams {
                trees: 0,
                ..ForestParams::default()
            }),
            0,
        );
        assert!(matches!(
            train(&spec, &data),
            Err(TrainError::InvalidHyperparameter(_))
        ));
    }

    #[test]
    fn forest_beats_chance_on_separable_data() {
        let data = blobs(60, 31);
        let probe = blobs(40, 32);
        let spec = ClassifierSpec::new(
            ClassifierKind::RandomForest(ForestParams {
                trees: 25,
                ..ForestParams::default()
            }),
            5,
        );
        let model = train(&spec, &data).unwrap();
        let predictions = model.predict(&probe).unwrap();
        let correct = predictions
            .iter()
            .zip(probe.labels())
            .filter(|(p, l)| p == l)
            .count();
        assert!(correct as f64 / probe.n_rows() as f64 > 0.9);
    }
}
