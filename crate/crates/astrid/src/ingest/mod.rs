//! Parsers and generators that produce datasets: ARFF and CSV readers,
//! their writers (round-trip capable), and the synthetic benchmark
//! generator.

mod arff;
mod csv_io;
mod synthetic;

use thiserror::Error;

pub use arff::{parse_arff, to_dataset, write_arff, ArffDocument};
pub use csv_io::{parse_csv, write_csv, ClassColumn, KindHint};
pub use synthetic::generate_synthetic;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: attribute `{name}` has unsupported type `{kind}`")]
    UnsupportedAttributeType {
        line: usize,
        name: String,
        kind: String,
    },
    #[error("class attribute `{0}` is not nominal")]
    ClassAttributeNotNominal(String),
    #[error("no attribute named `{0}`")]
    UnknownAttribute(String),
    #[error("no column named `{0}` in the header")]
    UnknownClassColumn(String),
    #[error("data row {row}, attribute `{attribute}`: {message}")]
    BadCell {
        row: usize,
        attribute: String,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl IngestError {
    fn syntax(line: usize, message: impl Into<String>) -> Self {
        IngestError::Syntax {
            line,
            message: message.into(),
        }
    }
}
