//! Find out which attribute groups a classifier actually exploits jointly.
//!
//! Given a classification dataset and any trainable classifier, this crate
//! answers two questions:
//!
//! 1. **Does a given attribute grouping capture the structure the
//!    classifier relies on?** Train on data permuted so that only the
//!    within-group, within-class structure survives; if the resulting
//!    accuracies' confidence interval still reaches the original accuracy,
//!    the grouping is valid.
//! 2. **What is the finest valid grouping?** A greedy top-down search
//!    extracts one attribute at a time, producing one grouping per
//!    cardinality, and picks the maximum-cardinality grouping that passes
//!    the structure test.
//!
//! ```
//! use astrid::{
//!     classifiers::{ClassifierKind, ClassifierSpec},
//!     evaluation::TrialConfig,
//!     ingest::generate_synthetic,
//!     search::run_astrid,
//! };
//!
//! // Four attributes; 1 and 2 carry class signal only jointly.
//! let data = generate_synthetic(60, 42);
//! let split = data.stratified_split((0.5, 0.25, 0.25), 42)?;
//! let spec = ClassifierSpec::new(ClassifierKind::NaiveBayes, 0);
//! let config = TrialConfig::new(20, 10, 42);
//!
//! let result = run_astrid(&spec, &split, &config, false)?;
//! // naive Bayes ignores interactions, so every grouping is valid and the
//! // finest one wins:
//! assert_eq!(result.selected.to_string(), "1|2|3|4");
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! The full walk-through lives in the book under `book/`; its code blocks
//! double as this crate's doctests.

pub mod classifiers;
pub mod dataset;
pub mod evaluation;
pub mod ingest;
pub mod permutation;
pub mod search;

mod seeding;

#[cfg(doctest)]
mod book;

pub use classifiers::{ClassifierKind, ClassifierSpec, TrainedModel};
pub use dataset::{AttributeKind, DataSplit, Dataset, RawDataset, Schema, Value};
pub use evaluation::{ConfidenceInterval, TrialConfig};
pub use permutation::Grouping;
pub use search::{AstridResult, SearchTrace};
