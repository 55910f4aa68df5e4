//! The statistical core: test-set accuracy, expected accuracy over permuted
//! trials, empirical confidence intervals, the structure test, and the
//! interaction permutation p-value.
//!
//! Every batch of trials is embarrassingly parallel and bit-reproducible:
//! trial `i` derives its own random stream from the master seed, a purpose
//! tag, the canonical grouping string and `i`, so results are identical
//! whether trials run serially or across any number of threads. Classifier
//! seeds are not varied per trial — the trial stream drives only the
//! permutation draw — which is what makes the trivial one-group grouping
//! reproduce the baseline accuracy exactly in every trial.

use rayon::prelude::*;
use thiserror::Error;

use crate::classifiers::{train, ClassifierSpec, PredictError, TrainError, TrainedModel};
use crate::dataset::Dataset;
use crate::permutation::{sample_permuted, Grouping, GroupingError};
use crate::seeding;

/// Trial counts, confidence quantiles and the master seed.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    /// Trials per confidence interval.
    pub r: usize,
    /// Trials per expected-accuracy estimate.
    pub n: usize,
    /// Lower and upper empirical quantiles of the CI.
    pub ci_quantiles: (f64, f64),
    pub master_seed: u64,
}

impl TrialConfig {
    pub fn new(r: usize, n: usize, master_seed: u64) -> Self {
        TrialConfig {
            r,
            n,
            ci_quantiles: (0.05, 0.95),
            master_seed,
        }
    }

    fn check(&self) -> Result<(), EvalError> {
        let (lo, hi) = self.ci_quantiles;
        if self.r < 2 {
            return Err(EvalError::InvalidConfig(format!(
                "R must be at least 2, got {}",
                self.r
            )));
        }
        if self.n < 1 {
            return Err(EvalError::InvalidConfig("N must be at least 1".into()));
        }
        if !(0.0 < lo && lo < hi && hi < 1.0) {
            return Err(EvalError::InvalidConfig(format!(
                "quantiles must satisfy 0 < lower < upper < 1, got ({lo}, {hi})"
            )));
        }
        Ok(())
    }
}

impl Default for TrialConfig {
    /// The full-scale protocol: R = 250, N = 100.
    fn default() -> Self {
        TrialConfig::new(250, 100, 0)
    }
}

/// Empirical confidence interval over `R` permuted-trial accuracies.
/// The endpoints are order statistics of `samples` (nearest-rank rule),
/// so they are always attained sample values.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    /// The accuracies, in trial order.
    pub samples: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("test set is empty")]
    EmptyTestSet,
    #[error("invalid trial configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Grouping(#[from] GroupingError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Predict(#[from] PredictError),
    #[error("trial {index} failed: {source}")]
    Trial {
        index: usize,
        #[source]
        source: Box<EvalError>,
    },
}

/// Fraction of `test` rows the model labels correctly.
pub fn accuracy(model: &TrainedModel, test: &Dataset) -> Result<f64, EvalError> {
    if test.n_rows() == 0 {
        return Err(EvalError::EmptyTestSet);
    }
    let predictions = model.predict(test)?;
    let correct = predictions
        .iter()
        .zip(test.labels())
        .filter(|(p, l)| p == l)
        .count();
    Ok(correct as f64 / test.n_rows() as f64)
}

/// Trials 0..count in parallel; results come back in trial order and the
/// first failing trial (by index) wins, independent of scheduling.
///
/// One trial: draw `D^S` from the trial's own stream, retrain from
/// scratch, score on the fixed test part.
fn run_trials(
    spec: &ClassifierSpec,
    train_data: &Dataset,
    grouping: &Grouping,
    test: &Dataset,
    tag: &str,
    count: usize,
    config: &TrialConfig,
) -> Result<Vec<f64>, EvalError> {
    if grouping.n_attributes() != train_data.n_attributes() {
        return Err(GroupingError::Mismatch {
            grouping: grouping.n_attributes(),
            dataset: train_data.n_attributes(),
        }
        .into());
    }
    if test.n_rows() == 0 {
        return Err(EvalError::EmptyTestSet);
    }
    let grouping_str = grouping.to_string();
    let results: Vec<Result<f64, EvalError>> = (0..count)
        .into_par_iter()
        .map(|index| {
            let trial = || -> Result<f64, EvalError> {
                let mut rng =
                    seeding::trial_rng(config.master_seed, tag, &grouping_str, index as u64);
                let permuted = sample_permuted(train_data, grouping, &mut rng)?;
                let model = train(spec, &permuted)?;
                accuracy(&model, test)
            };
            trial().map_err(|e| EvalError::Trial {
                index,
                source: Box::new(e),
            })
        })
        .collect();
    results.into_iter().collect()
}

/// Expected accuracy `V`: the mean over `N` permuted trials, each trained
/// on a fresh draw and evaluated on `test_v`.
pub fn expected_accuracy(
    spec: &ClassifierSpec,
    train_data: &Dataset,
    grouping: &Grouping,
    test_v: &Dataset,
    config: &TrialConfig,
) -> Result<f64, EvalError> {
    let samples = expected_accuracy_samples(spec, train_data, grouping, test_v, config)?;
    Ok(samples.iter().sum::<f64>() / samples.len() as f64)
}

/// The `N` per-trial accuracies behind [`expected_accuracy`], in trial
/// order. Exposed so callers can look at the spread, not just the mean.
pub fn expected_accuracy_samples(
    spec: &ClassifierSpec,
    train_data: &Dataset,
    grouping: &Grouping,
    test_v: &Dataset,
    config: &TrialConfig,
) -> Result<Vec<f64>, EvalError> {
    config.check()?;
    run_trials(spec, train_data, grouping, test_v, "v", config.n, config)
}

/// Confidence interval from `R` permuted trials evaluated on `test_ci`.
pub fn confidence_interval(
    spec: &ClassifierSpec,
    train_data: &Dataset,
    grouping: &Grouping,
    test_ci: &Dataset,
    config: &TrialConfig,
) -> Result<ConfidenceInterval, EvalError> {
    config.check()?;
    let samples = run_trials(spec, train_data, grouping, test_ci, "ci", config.r, config)?;
    let (lower, upper) = quantile_bounds(&samples, config.ci_quantiles);
    Ok(ConfidenceInterval {
        lower,
        upper,
        samples,
    })
}

/// Nearest-rank order statistics: rank ceil(q*R), 1-based.
pub(crate) fn quantile_bounds(samples: &[f64], quantiles: (f64, f64)) -> (f64, f64) {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pick = |q: f64| sorted[nearest_rank(q, sorted.len()) - 1];
    (pick(quantiles.0), pick(quantiles.1))
}

fn nearest_rank(q: f64, r: usize) -> usize {
    let scaled = q * r as f64;
    let rounded = scaled.round();
    // Guard against q*r landing a hair above a mathematically exact integer.
    let rank = if (scaled - rounded).abs() < 1e-9 {
        rounded
    } else {
        scaled.ceil()
    };
    (rank as usize).clamp(1, r)
}

/// The structure test: is the factorisation compatible with the observed
/// accuracy? True iff the CI's upper end reaches the baseline `a0`.
pub fn structure_test(a0: f64, ci: &ConfidenceInterval) -> bool {
    ci.upper >= a0
}

/// Permutation p-value for "the classifier uses no attribute interactions":
/// R trials under the all-singletons grouping, compared against the
/// unpermuted baseline accuracy. Add-one formula, so p is never 0.
pub fn ojala_test2(
    spec: &ClassifierSpec,
    train_data: &Dataset,
    test: &Dataset,
    config: &TrialConfig,
) -> Result<f64, EvalError> {
    config.check()?;
    let baseline = train(spec, train_data)?;
    let a0 = accuracy(&baseline, test)?;
    let grouping = Grouping::singletons(train_data.n_attributes());
    let samples = run_trials(spec, train_data, &grouping, test, "og", config.r, config)?;
    let at_least = samples.iter().filter(|&&t| t >= a0).count();
    Ok((1 + at_least) as f64 / (config.r + 1) as f64)
}
