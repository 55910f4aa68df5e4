//! CART-style decision tree: Gini impurity, numeric splits at midpoints
//! between sorted distinct values, nominal splits one-vs-rest per category.
//! Growth stops when a node is pure or has fewer than 2 rows; no pruning.
//! Ties between equally good splits keep the first candidate in
//! (attribute index, threshold/category) order.

use rand_chacha::ChaCha8Rng;

use crate::dataset::{Column, Dataset, Value};

use super::argmax_class;

#[derive(Debug, Clone)]
pub(super) struct TreeModel {
    nodes: Vec<Node>,
}

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        class: usize,
    },
    /// Numeric test `x <= threshold`: true goes left.
    NumericSplit {
        attr: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// Nominal test `x == category`: true goes left.
    CategorySplit {
        attr: usize,
        category: usize,
        left: usize,
        right: usize,
    },
}

impl TreeModel {
    pub(super) fn predict_row(&self, data: &Dataset, row: usize) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { class } => return *class,
                Node::NumericSplit {
                    attr,
                    threshold,
                    left,
                    right,
                } => {
                    at = match data.cell(row, *attr) {
                        Value::Num(x) if x <= *threshold => *left,
                        Value::Num(_) => *right,
                        Value::Cat(_) => unreachable!("numeric split on nominal column"),
                    };
                }
                Node::CategorySplit {
                    attr,
                    category,
                    left,
                    right,
                } => {
                    at = match data.cell(row, *attr) {
                        Value::Cat(c) if c == *category => *left,
                        Value::Cat(_) => *right,
                        Value::Num(_) => unreachable!("category split on numeric column"),
                    };
                }
            }
        }
    }
}

/// Grow an unrestricted tree considering every attribute at every split.
pub(super) fn fit_full_tree(data: &Dataset, n_classes: usize) -> TreeModel {
    let rows: Vec<usize> = (0..data.n_rows()).collect();
    let mut builder = TreeBuilder {
        data,
        n_classes,
        mtry: None,
        rng: None,
        nodes: Vec::new(),
    };
    builder.grow(rows);
    TreeModel {
        nodes: builder.nodes,
    }
}

/// Grow a forest member: `rows` is the bootstrap sample and `mtry`
/// attributes are drawn per split from `rng`.
pub(super) fn fit_forest_tree(
    data: &Dataset,
    n_classes: usize,
    rows: Vec<usize>,
    mtry: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> TreeModel {
    let mut builder = TreeBuilder {
        data,
        n_classes,
        mtry,
        rng: Some(rng),
        nodes: Vec::new(),
    };
    builder.grow(rows);
    TreeModel {
        nodes: builder.nodes,
    }
}

struct TreeBuilder<'a> {
    data: &'a Dataset,
    n_classes: usize,
    mtry: Option<usize>,
    rng: Option<&'a mut ChaCha8Rng>,
    nodes: Vec<Node>,
}

struct BestSplit {
    impurity: f64,
    attr: usize,
    test: SplitTest,
}

enum SplitTest {
    NumericLe(f64),
    CategoryEq(usize),
}

impl TreeBuilder<'_> {
    fn grow(&mut self, rows: Vec<usize>) -> usize {
        let counts = self.class_counts(&rows);
        let n_present = counts.iter().filter(|&&c| c > 0).count();
        if rows.len() < 2 || n_present <= 1 {
            return self.push_leaf(&counts);
        }

        let candidates = self.candidate_attributes();
        let best = self.best_split(&rows, &counts, &candidates);
        let Some(best) = best else {
            // all candidate columns constant within this node
            return self.push_leaf(&counts);
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.iter().partition(|&&i| match best.test {
                SplitTest::NumericLe(threshold) => match self.data.cell(i, best.attr) {
                    Value::Num(x) => x <= threshold,
                    Value::Cat(_) => unreachable!(),
                },
                SplitTest::CategoryEq(category) => match self.data.cell(i, best.attr) {
                    Value::Cat(c) => c == category,
                    Value::Num(_) => unreachable!(),
                },
            });

        let here = self.nodes.len();
        self.nodes.push(Node::Leaf { class: 0 }); // placeholder
        let left = self.grow(left_rows);
        let right = self.grow(right_rows);
        self.nodes[here] = match best.test {
            SplitTest::NumericLe(threshold) => Node::NumericSplit {
                attr: best.attr,
                threshold,
                left,
                right,
            },
            SplitTest::CategoryEq(category) => Node::CategorySplit {
                attr: best.attr,
                category,
                left,
                right,
            },
        };
        here
    }

    fn push_leaf(&mut self, counts: &[usize]) -> usize {
        let idx = self.nodes.len();
        self.nodes.push(Node::Leaf {
            class: argmax_class(counts),
        });
        idx
    }

    fn class_counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_classes];
        for &i in rows {
            counts[self.data.labels()[i]] += 1;
        }
        counts
    }

    /// Attributes to consider at this split, ascending. Sampling without
    /// replacement via partial shuffle; sorted afterwards so tie-breaking
    /// stays in attribute-index order.
    fn candidate_attributes(&mut self) -> Vec<usize> {
        let m = self.data.n_attributes();
        match (self.mtry, self.rng.as_deref_mut()) {
            (Some(mtry), Some(rng)) if mtry < m => {
                use rand::Rng;
                let mut pool: Vec<usize> = (0..m).collect();
                for i in 0..mtry {
                    let j = rng.random_range(i..m);
                    pool.swap(i, j);
                }
                let mut picked = pool[..mtry].to_vec();
                picked.sort_unstable();
                picked
            }
            _ => (0..m).collect(),
        }
    }

    fn best_split(
        &self,
        rows: &[usize],
        counts: &[usize],
        candidates: &[usize],
    ) -> Option<BestSplit> {
        let mut best: Option<BestSplit> = None;
        for &attr in candidates {
            match self.data.column(attr) {
                Column::Numeric(values) => {
                    let mut pairs: Vec<(f64, usize)> = rows
                        .iter()
                        .map(|&i| (values[i], self.data.labels()[i]))
                        .collect();
                    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                    let mut left = vec![0usize; self.n_classes];
                    let mut n_left = 0usize;
                    for w in 0..pairs.len() - 1 {
                        left[pairs[w].1] += 1;
                        n_left += 1;
                        if pairs[w + 1].0 > pairs[w].0 {
                            let impurity = weighted_gini(&left, counts, n_left, rows.len());
                            if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                                best = Some(BestSplit {
                                    impurity,
                                    attr,
                                    test: SplitTest::NumericLe(
                                        (pairs[w].0 + pairs[w + 1].0) / 2.0,
                                    ),
                                });
                            }
                        }
                    }
                }
                Column::Nominal(values) => {
                    let n_categories = match &self.data.attribute_kinds()[attr] {
                        crate::dataset::AttributeKind::Nominal(cats) => cats.len(),
                        _ => unreachable!(),
                    };
                    let mut per_category = vec![vec![0usize; self.n_classes]; n_categories];
                    for &i in rows {
                        per_category[values[i]][self.data.labels()[i]] += 1;
                    }
                    for (category, left) in per_category.iter().enumerate() {
                        let n_left: usize = left.iter().sum();
                        if n_left == 0 || n_left == rows.len() {
                            continue;
                        }
                        let impurity = weighted_gini(left, counts, n_left, rows.len());
                        if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                            best = Some(BestSplit {
                                impurity,
                                attr,
                                test: SplitTest::CategoryEq(category),
                            });
                        }
                    }
                }
            }
        }
        best
    }
}

/// Gini impurity of the two children, weighted by child size.
fn weighted_gini(left: &[usize], node: &[usize], n_left: usize, n_node: usize) -> f64 {
    let total = n_node as f64;
    let n_right = n_node - n_left;
    let gini = |counts_left: bool| -> f64 {
        let n = if counts_left { n_left } else { n_right } as f64;
        let mut sum_sq = 0.0;
        for (c, &l) in left.iter().enumerate() {
            let count = if counts_left { l } else { node[c] - l } as f64;
            sum_sq += count * count;
        }
        1.0 - sum_sq / (n * n)
    };
    (n_left as f64 / total) * gini(true) + (n_right as f64 / total) * gini(false)
}

#[cfg(test)]
mod tests {
    use super::super::tests::{blobs, numeric_dataset};
    use super::super::{train, ClassifierKind, ClassifierSpec};
    use crate::dataset::{AttributeKind, Column, Dataset, Schema};

    #[test]
    fn perfectly_fits_consistent_training_data() {
        let data = blobs(50, 9);
        let spec = ClassifierSpec::new(ClassifierKind::DecisionTree, 0);
        let model = train(&spec, &data).unwrap();
        let predictions = model.predict(&data).unwrap();
        assert_eq!(predictions, data.labels());
    }

    #[test]
    fn splits_at_midpoints() {
        // 1-D data separable at 1.5: the tree must generalize to 1.4 / 1.6.
        let data = numeric_dataset(vec![vec![0.0, 1.0, 2.0, 3.0]], vec![0, 0, 1, 1]);
        let spec = ClassifierSpec::new(ClassifierKind::DecisionTree, 0);
        let model = train(&spec, &data).unwrap();
        let probe = Dataset::new(
            data.schema().clone(),
            vec![Column::Numeric(vec![1.4, 1.6])],
            vec![0, 1],
        );
        assert_eq!(model.predict(&probe).unwrap(), vec![0, 1]);
    }

    #[test]
    fn handles_nominal_one_vs_rest_splits() {
        let schema = Schema {
            attribute_names: vec!["shape".into()],
            attribute_kinds: vec![AttributeKind::Nominal(vec![
                "square".into(),
                "circle".into(),
                "star".into(),
            ])],
            class_names: vec!["c0".into(), "c1".into()],
        };
        let data = Dataset::new(
            schema.clone(),
            vec![Column::Nominal(vec![0, 0, 1, 2, 1, 2])],
            vec![0, 0, 1, 1, 1, 1],
        );
        let spec = ClassifierSpec::new(ClassifierKind::DecisionTree, 0);
        let model = train(&spec, &data).unwrap();
        assert_eq!(model.predict(&data).unwrap(), data.labels());
    }

    #[test]
    fn conflicting_duplicate_rows_become_majority_leaf() {
        let data = numeric_dataset(vec![vec![1.0, 1.0, 1.0, 5.0]], vec![0, 1, 1, 0]);
        let spec = ClassifierSpec::new(ClassifierKind::DecisionTree, 0);
        let model = train(&spec, &data).unwrap();
        // the three x=1 rows cannot be separated; majority is class 1 there
        let predictions = model.predict(&data).unwrap();
        assert_eq!(predictions, vec![1, 1, 1, 0]);
    }
}
