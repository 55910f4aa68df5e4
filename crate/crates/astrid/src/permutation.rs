//! Attribute groupings and the constrained permutation sampler.
//!
//! A [`Grouping`] partitions the attribute indices `{1..m}`; permuting a
//! training set under a grouping shuffles rows within each class,
//! independently per group but identically for every attribute inside a
//! group. Datasets produced this way are exchangeable with the original
//! whenever the class-conditional distribution factorises over the groups,
//! which is exactly the null hypothesis the structure test probes.
//!
//! [`enumerate_permuted`] materialises the full set of reachable datasets
//! on small instances; it exists so tests can check the sampler against
//! exhaustive ground truth.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::dataset::{Column, Dataset};

/// A disjoint partition of the attribute indices of an `m`-column dataset.
///
/// Held in canonical form: indices sorted ascending within each group,
/// groups sorted by their smallest member. Equal partitions therefore
/// compare equal and render to the same string.
///
/// The interchange string format is 1-based: groups separated by `|`,
/// indices within a group separated by `,` — e.g. `1,2|3|4`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grouping {
    groups: Vec<Vec<usize>>, // 0-based internally
    m: usize,
}

impl Grouping {
    /// Build a grouping from 0-based index groups, canonicalizing on the
    /// way in. Rejects anything that is not a partition of `0..m`.
    pub fn new(groups: Vec<Vec<usize>>, m: usize) -> Result<Self, GroupingError> {
        let mut seen = vec![false; m];
        let mut count = 0;
        for group in &groups {
            if group.is_empty() {
                return Err(GroupingError::Parse("empty group".into()));
            }
            for &idx in group {
                if idx >= m {
                    return Err(GroupingError::NotAPartition(format!(
                        "attribute index {} out of range 1..={m}",
                        idx + 1
                    )));
                }
                if seen[idx] {
                    return Err(GroupingError::NotAPartition(format!(
                        "attribute index {} appears twice",
                        idx + 1
                    )));
                }
                seen[idx] = true;
                count += 1;
            }
        }
        if count != m {
            let missing = seen.iter().position(|&s| !s).unwrap();
            return Err(GroupingError::NotAPartition(format!(
                "attribute index {} is not covered",
                missing + 1
            )));
        }
        let mut groups = groups;
        for group in &mut groups {
            group.sort_unstable();
        }
        groups.sort_by_key(|g| g[0]);
        Ok(Grouping { groups, m })
    }

    /// The trivial one-group partition `{{1..m}}`.
    pub fn single_group(m: usize) -> Self {
        Grouping {
            groups: vec![(0..m).collect()],
            m,
        }
    }

    /// The all-singletons partition `{{1},{2},...,{m}}`.
    pub fn singletons(m: usize) -> Self {
        Grouping {
            groups: (0..m).map(|j| vec![j]).collect(),
            m,
        }
    }

    /// Parse the 1-based interchange format, e.g. `1,2|3|4`.
    pub fn parse(text: &str, m: usize) -> Result<Self, GroupingError> {
        let mut groups = Vec::new();
        for group_text in text.split('|') {
            let mut group = Vec::new();
            for token in group_text.split(',') {
                let token = token.trim();
                let idx: usize = token
                    .parse()
                    .map_err(|_| GroupingError::Parse(format!("bad attribute index `{token}`")))?;
                if idx == 0 {
                    return Err(GroupingError::Parse("attribute indices are 1-based".into()));
                }
                group.push(idx - 1);
            }
            groups.push(group);
        }
        Grouping::new(groups, m)
    }

    /// Number of groups (the cardinality `k`).
    pub fn cardinality(&self) -> usize {
        self.groups.len()
    }

    /// Number of attributes this grouping partitions.
    pub fn n_attributes(&self) -> usize {
        self.m
    }

    /// Groups in canonical order, 0-based indices.
    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Index of the group containing each attribute, attribute-major.
    pub fn group_of_attribute(&self) -> Vec<usize> {
        let mut out = vec![0; self.m];
        for (g, group) in self.groups.iter().enumerate() {
            for &j in group {
                out[j] = g;
            }
        }
        out
    }

    /// Move one attribute (0-based) out of its group into a new singleton;
    /// cardinality grows by exactly one.
    pub fn split_out(&self, attribute: usize) -> Result<Self, GroupingError> {
        if attribute >= self.m {
            return Err(GroupingError::NotAPartition(format!(
                "attribute index {} out of range 1..={}",
                attribute + 1,
                self.m
            )));
        }
        let home = self
            .groups
            .iter()
            .position(|g| g.contains(&attribute))
            .expect("partition covers every attribute");
        if self.groups[home].len() < 2 {
            return Err(GroupingError::AlreadySingleton(attribute + 1));
        }
        let mut groups = self.groups.clone();
        groups[home].retain(|&j| j != attribute);
        groups.push(vec![attribute]);
        Grouping::new(groups, self.m)
    }
}

impl fmt::Display for Grouping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered = self
            .groups
            .iter()
            .map(|g| g.iter().map(|j| (j + 1).to_string()).join(","))
            .join("|");
        f.write_str(&rendered)
    }
}

impl FromStr for Grouping {
    type Err = GroupingError;

    /// Parse without an expected attribute count: `m` is taken to be the
    /// largest index mentioned. Prefer [`Grouping::parse`] when `m` is known.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let max = s
            .split(['|', ','])
            .filter_map(|t| t.trim().parse::<usize>().ok())
            .max()
            .ok_or_else(|| GroupingError::Parse("no attribute indices found".into()))?;
        Grouping::parse(s, max)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupingError {
    #[error("cannot parse grouping: {0}")]
    Parse(String),
    #[error("not a partition: {0}")]
    NotAPartition(String),
    #[error("attribute {0} is already a singleton group")]
    AlreadySingleton(usize),
    #[error("grouping covers {grouping} attributes but the dataset has {dataset}")]
    Mismatch { grouping: usize, dataset: usize },
    #[error("permutation space holds {bound} plans, above the enumeration limit of {limit}")]
    TooLarge { bound: u128, limit: u128 },
}

/// The bijections of one permuted draw: for every (class, group) pair, a
/// mapping of that class's row positions onto themselves.
///
/// Applying the plan moves cell contents, never labels: all attributes of
/// one group share one bijection per class, and rows never cross classes.
#[derive(Debug, Clone)]
pub struct PermutationPlan {
    /// `source[g][i]` is the row whose cells land in row `i` for every
    /// attribute of group `g`. Identity outside the permuted class rows.
    source: Vec<Vec<usize>>,
}

impl PermutationPlan {
    /// Draw a uniformly random plan: one unbiased shuffle per (class, group)
    /// pair, consumed in canonical class-then-group order so a given stream
    /// always yields the same plan.
    pub fn sample<R: Rng + ?Sized>(train: &Dataset, grouping: &Grouping, rng: &mut R) -> Self {
        let n = train.n_rows();
        let by_class = train.rows_by_class();
        let mut source = vec![(0..n).collect::<Vec<usize>>(); grouping.cardinality()];
        for positions in &by_class {
            for src in source.iter_mut() {
                let mut shuffled = positions.clone();
                shuffled.shuffle(rng);
                for (dst, &from) in positions.iter().zip(shuffled.iter()) {
                    src[*dst] = from;
                }
            }
        }
        PermutationPlan { source }
    }

    /// Materialize the permuted dataset `D^S = (X^S, C)`.
    pub fn apply(&self, train: &Dataset, grouping: &Grouping) -> Dataset {
        let columns: Vec<Column> = {
            let group_of = grouping.group_of_attribute();
            train
                .columns()
                .iter()
                .enumerate()
                .map(|(j, col)| {
                    let src = &self.source[group_of[j]];
                    match col {
                        Column::Numeric(v) => {
                            Column::Numeric(src.iter().map(|&i| v[i]).collect())
                        }
                        Column::Nominal(v) => {
                            Column::Nominal(src.iter().map(|&i| v[i]).collect())
                        }
                    }
                })
                .collect()
        };
        Dataset::from_shared_schema(train.shared_schema(), columns, train.labels().to_vec())
    }
}

/// Draw one permuted dataset under the grouping, uniformly over the set of
/// reachable datasets. The class vector and the input dataset are untouched.
pub fn sample_permuted<R: Rng + ?Sized>(
    train: &Dataset,
    grouping: &Grouping,
    rng: &mut R,
) -> Result<Dataset, GroupingError> {
    if grouping.n_attributes() != train.n_attributes() {
        return Err(GroupingError::Mismatch {
            grouping: grouping.n_attributes(),
            dataset: train.n_attributes(),
        });
    }
    let plan = PermutationPlan::sample(train, grouping, rng);
    Ok(plan.apply(train, grouping))
}

const ENUMERATION_LIMIT: u128 = 1_000_000;

/// Exhaustively enumerate the distinct datasets reachable by the permutation
/// scheme. Intended as a testing oracle on small instances; errors out when
/// the plan space exceeds 10^6.
pub fn enumerate_permuted(
    train: &Dataset,
    grouping: &Grouping,
) -> Result<Vec<Dataset>, GroupingError> {
    if grouping.n_attributes() != train.n_attributes() {
        return Err(GroupingError::Mismatch {
            grouping: grouping.n_attributes(),
            dataset: train.n_attributes(),
        });
    }
    let by_class = train.rows_by_class();
    let k = grouping.cardinality() as u32;
    let mut bound: u128 = 1;
    for positions in &by_class {
        let fact: u128 = (1..=positions.len() as u128).product();
        bound = fact
            .checked_pow(k)
            .and_then(|f| bound.checked_mul(f))
            .unwrap_or(u128::MAX);
        if bound > ENUMERATION_LIMIT {
            return Err(GroupingError::TooLarge {
                bound,
                limit: ENUMERATION_LIMIT,
            });
        }
    }

    // One axis per (class, group) pair, each ranging over all bijections of
    // that class's row positions.
    let n = train.n_rows();
    let axes: Vec<Vec<Vec<usize>>> = by_class
        .iter()
        .flat_map(|positions| {
            (0..k).map(|_| {
                positions
                    .iter()
                    .copied()
                    .permutations(positions.len())
                    .collect::<Vec<_>>()
            })
        })
        .collect();

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for combo in axes.iter().multi_cartesian_product() {
        let mut source = vec![(0..n).collect::<Vec<usize>>(); k as usize];
        for (class_idx, positions) in by_class.iter().enumerate() {
            for g in 0..k as usize {
                let perm = combo[class_idx * k as usize + g];
                for (dst, &from) in positions.iter().zip(perm.iter()) {
                    source[g][*dst] = from;
                }
            }
        }
        let plan = PermutationPlan { source };
        let permuted = plan.apply(train, grouping);
        let key: Vec<u64> = (0..permuted.n_rows())
            .flat_map(|i| {
                (0..permuted.n_attributes()).map(move |j| (i, j))
            })
            .map(|(i, j)| permuted.cell(i, j).key())
            .collect();
        if seen.insert(key) {
            out.push(permuted);
        }
    }
    Ok(out)
}
