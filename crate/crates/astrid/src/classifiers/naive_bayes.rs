//! Gaussian / categorical naive Bayes.
//!
//! Numeric attributes get a per-class Gaussian (variance floored at 1e-9 to
//! survive near-constant columns); nominal attributes get Laplace-smoothed
//! category frequencies (alpha = 1). Class priors come from training
//! frequencies and prediction is the argmax of the log-posterior, ties
//! broken toward the lowest class index.
//!
//! Sufficient statistics are computed from value multisets (summation in
//! sorted order), so any within-class permutation of the training data
//! yields a bitwise-identical model.

use std::f64::consts::PI;

use crate::dataset::{Column, Dataset, Value};

use super::sorted_sum_stats;

const VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone)]
pub(super) struct NbModel {
    class_log_prior: Vec<f64>,
    features: Vec<NbFeature>,
}

#[derive(Debug, Clone)]
enum NbFeature {
    Gaussian {
        mean: Vec<f64>, // per class
        var: Vec<f64>,
    },
    Categorical {
        log_prob: Vec<Vec<f64>>, // [class][category]
    },
}

impl NbModel {
    pub(super) fn fit(data: &Dataset, n_classes: usize) -> Self {
        let n = data.n_rows();
        let mut class_counts = vec![0usize; n_classes];
        for &c in data.labels() {
            class_counts[c] += 1;
        }
        let class_log_prior = class_counts
            .iter()
            .map(|&count| (count as f64 / n as f64).ln())
            .collect();

        let features = data
            .columns()
            .iter()
            .enumerate()
            .map(|(j, col)| match col {
                Column::Numeric(values) => {
                    let mut mean = vec![0.0; n_classes];
                    let mut var = vec![VARIANCE_FLOOR; n_classes];
                    for class in 0..n_classes {
                        let mut class_values: Vec<f64> = values
                            .iter()
                            .zip(data.labels())
                            .filter(|&(_, &c)| c == class)
                            .map(|(&x, _)| x)
                            .collect();
                        if class_values.is_empty() {
                            continue;
                        }
                        let (m, v) = sorted_sum_stats(&mut class_values);
                        mean[class] = m;
                        var[class] = v.max(VARIANCE_FLOOR);
                    }
                    NbFeature::Gaussian { mean, var }
                }
                Column::Nominal(values) => {
                    let n_categories = match &data.attribute_kinds()[j] {
                        crate::dataset::AttributeKind::Nominal(cats) => cats.len(),
                        _ => unreachable!(),
                    };
                    let mut counts = vec![vec![0usize; n_categories]; n_classes];
                    for (&v, &c) in values.iter().zip(data.labels()) {
                        counts[c][v] += 1;
                    }
                    let log_prob = counts
                        .iter()
                        .zip(class_counts.iter())
                        .map(|(class_row, &total)| {
                            class_row
                                .iter()
                                .map(|&count| {
                                    ((count + 1) as f64 / (total + n_categories) as f64).ln()
                                })
                                .collect()
                        })
                        .collect();
                    NbFeature::Categorical { log_prob }
                }
            })
            .collect();

        NbModel {
            class_log_prior,
            features,
        }
    }

    pub(super) fn predict_row(&self, data: &Dataset, row: usize) -> usize {
        let n_classes = self.class_log_prior.len();
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for class in 0..n_classes {
            let mut score = self.class_log_prior[class];
            for (j, feature) in self.features.iter().enumerate() {
                score += match (feature, data.cell(row, j)) {
                    (NbFeature::Gaussian { mean, var }, Value::Num(x)) => {
                        let d = x - mean[class];
                        -0.5 * (2.0 * PI * var[class]).ln() - d * d / (2.0 * var[class])
                    }
                    (NbFeature::Categorical { log_prob }, Value::Cat(c)) => log_prob[class][c],
                    _ => unreachable!("cell kind does not match trained feature"),
                };
            }
            if score > best_score {
                best_score = score;
                best = class;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::numeric_dataset;
    use super::super::{train, ClassifierKind, ClassifierSpec};
    use super::*;
    use crate::dataset::{AttributeKind, Schema};
    use crate::permutation::{sample_permuted, Grouping};
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Closed-form Gaussian posterior for a 1-D two-class problem, computed
    /// independently of the model code.
    fn hand_posterior(x: f64, stats: [(f64, f64, f64); 2]) -> usize {
        // stats: (prior, mean, var) per class
        let score = |&(prior, mean, var): &(f64, f64, f64)| {
            prior.ln() - 0.5 * (2.0 * PI * var).ln() - (x - mean) * (x - mean) / (2.0 * var)
        };
        if score(&stats[0]) >= score(&stats[1]) {
            0
        } else {
            1
        }
    }

    #[test]
    fn matches_hand_computed_posterior_on_1d_data() {
        // class 0 at 0, 1, 2; class 1 at 10, 11, 12.
        let train_data = numeric_dataset(
            vec![vec![0.0, 1.0, 2.0, 10.0, 11.0, 12.0]],
            vec![0, 0, 0, 1, 1, 1],
        );
        let spec = ClassifierSpec::new(ClassifierKind::NaiveBayes, 0);
        let model = train(&spec, &train_data).unwrap();

        // population stats: mean 1 / 11, var 2/3, priors 1/2
        let stats = [(0.5, 1.0, 2.0 / 3.0), (0.5, 11.0, 2.0 / 3.0)];
        let queries = vec![-3.0, 0.5, 1.0, 5.9, 6.1, 11.0, 20.0];
        let probe = Dataset::new(
            train_data.schema().clone(),
            vec![Column::Numeric(queries.clone())],
            vec![0; queries.len()],
        );
        let predictions = model.predict(&probe).unwrap();
        let expected: Vec<usize> = queries.iter().map(|&x| hand_posterior(x, stats)).collect();
        assert_eq!(predictions, expected);
    }

    #[test]
    fn deep_inside_a_region_predicts_that_class() {
        let train_data = numeric_dataset(
            vec![vec![-2.0, -1.5, -1.0, 1.0, 1.5, 2.0]],
            vec![0, 0, 0, 1, 1, 1],
        );
        let spec = ClassifierSpec::new(ClassifierKind::NaiveBayes, 0);
        let model = train(&spec, &train_data).unwrap();
        let probe = Dataset::new(
            train_data.schema().clone(),
            vec![Column::Numeric(vec![-1.6, 1.6])],
            vec![0, 1],
        );
        assert_eq!(model.predict(&probe).unwrap(), vec![0, 1]);
    }

    #[test]
    fn handles_nominal_attributes_with_laplace_smoothing() {
        let schema = Schema {
            attribute_names: vec!["color".into()],
            attribute_kinds: vec![AttributeKind::Nominal(vec![
                "red".into(),
                "green".into(),
                "blue".into(),
            ])],
            class_names: vec!["c0".into(), "c1".into()],
        };
        // class 0 always red, class 1 always green; blue never seen.
        let data = Dataset::new(
            schema.clone(),
            vec![Column::Nominal(vec![0, 0, 1, 1])],
            vec![0, 0, 1, 1],
        );
        let spec = ClassifierSpec::new(ClassifierKind::NaiveBayes, 0);
        let model = train(&spec, &data).unwrap();
        let probe = Dataset::new(schema, vec![Column::Nominal(vec![0, 1, 2])], vec![0, 1, 0]);
        let predictions = model.predict(&probe).unwrap();
        assert_eq!(predictions[0], 0);
        assert_eq!(predictions[1], 1);
        // unseen category: smoothing keeps both classes finite, tie -> class 0
        assert_eq!(predictions[2], 0);
    }

    #[test]
    fn permutation_invariance_is_bitwise() {
        let data = super::super::tests::blobs(25, 42);
        let probe = super::super::tests::blobs(25, 43);
        let spec = ClassifierSpec::new(ClassifierKind::NaiveBayes, 0);
        let baseline = train(&spec, &data).unwrap().predict(&probe).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for grouping in [
            Grouping::single_group(3),
            Grouping::singletons(3),
            Grouping::parse("1,2|3", 3).unwrap(),
            Grouping::parse("1,3|2", 3).unwrap(),
        ] {
            for _ in 0..5 {
                let permuted = sample_permuted(&data, &grouping, &mut rng).unwrap();
                let predictions = train(&spec, &permuted).unwrap().predict(&probe).unwrap();
                assert_eq!(predictions, baseline);
            }
        }
    }
}
