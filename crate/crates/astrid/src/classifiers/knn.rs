//! k-nearest-neighbor classifier.
//!
//! Numeric attributes are z-scored with training statistics; nominal
//! attributes contribute a 0/1 mismatch term. Training rows are kept in
//! content-sorted order and distance ties break by position in that order,
//! so predictions cannot depend on how the training rows were stored.

use crate::dataset::{Column, Dataset, Value};

use super::{argmax_class, canonical_row_order, sorted_sum_stats, TrainError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnnParams {
    /// Number of neighbors consulted per query.
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: 5 }
    }
}

impl KnnParams {
    pub(super) fn check(&self) -> Result<(), TrainError> {
        if self.k == 0 {
            return Err(TrainError::InvalidHyperparameter(
                "k must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum StoredColumn {
    /// Already z-scored values.
    Numeric(Vec<f64>),
    Nominal(Vec<usize>),
}

#[derive(Debug, Clone)]
pub(super) struct KnnModel {
    k: usize,
    columns: Vec<StoredColumn>,
    labels: Vec<usize>,
    /// Per numeric attribute: (mean, sd) of the training values; sd of 0
    /// means the attribute is constant and is ignored.
    scaling: Vec<Option<(f64, f64)>>,
    n_classes: usize,
}

impl KnnModel {
    pub(super) fn fit(data: &Dataset, n_classes: usize, params: &KnnParams) -> Self {
        let order = canonical_row_order(data);
        let scaling: Vec<Option<(f64, f64)>> = data
            .columns()
            .iter()
            .map(|col| match col {
                Column::Numeric(values) => {
                    let mut copy = values.clone();
                    let (mean, var) = sorted_sum_stats(&mut copy);
                    Some((mean, var.sqrt()))
                }
                Column::Nominal(_) => None,
            })
            .collect();
        let columns = data
            .columns()
            .iter()
            .zip(scaling.iter())
            .map(|(col, scale)| match col {
                Column::Numeric(values) => {
                    let (mean, sd) = scale.unwrap();
                    StoredColumn::Numeric(
                        order.iter().map(|&i| zscore(values[i], mean, sd)).collect(),
                    )
                }
                Column::Nominal(values) => {
                    StoredColumn::Nominal(order.iter().map(|&i| values[i]).collect())
                }
            })
            .collect();
        let labels = order.iter().map(|&i| data.labels()[i]).collect();
        KnnModel {
            k: params.k,
            columns,
            labels,
            scaling,
            n_classes,
        }
    }

    pub(super) fn predict_row(&self, data: &Dataset, row: usize) -> usize {
        let query: Vec<Value> = (0..data.n_attributes())
            .map(|j| match data.cell(row, j) {
                Value::Num(x) => {
                    let (mean, sd) = self.scaling[j].unwrap();
                    Value::Num(zscore(x, mean, sd))
                }
                v @ Value::Cat(_) => v,
            })
            .collect();

        let n_train = self.labels.len();
        let mut distances: Vec<(f64, usize)> = (0..n_train)
            .map(|i| {
                let mut d = 0.0;
                for (j, q) in query.iter().enumerate() {
                    match (&self.columns[j], q) {
                        (StoredColumn::Numeric(v), Value::Num(x)) => {
                            let diff = v[i] - x;
                            d += diff * diff;
                        }
                        (StoredColumn::Nominal(v), Value::Cat(c)) => {
                            if v[i] != *c {
                                d += 1.0;
                            }
                        }
                        _ => unreachable!("cell kind does not match trained column"),
                    }
                }
                (d, i)
            })
            .collect();
        let k = self.k.min(n_train);
        distances.select_nth_unstable_by(k - 1, |a, b| {
            a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
        });
        let mut votes = vec![0usize; self.n_classes];
        for &(_, i) in &distances[..k] {
            votes[self.labels[i]] += 1;
        }
        argmax_class(&votes)
    }
}

fn zscore(x: f64, mean: f64, sd: f64) -> f64 {
    if sd > 0.0 {
        (x - mean) / sd
    } else {
        0.0
    }
}
