//! CSV reader and writer.
//!
//! The reader expects a header row and RFC-style quoting; empty fields mark
//! missing values. Column types are inferred all-or-nothing: a column is
//! numeric iff every non-missing cell parses as a finite number, otherwise
//! it is nominal with categories in first-appearance order. Hints override
//! inference per column.

use std::collections::HashMap;
use std::io::{Read, Write};

use crate::dataset::{AttributeKind, Dataset, RawDataset, Value};

use super::IngestError;

/// How to locate the class column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassColumn {
    Name(String),
    /// 0-based column index.
    Index(usize),
}

/// Per-column type override, keyed by header name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindHint {
    Numeric,
    Nominal,
}

/// Parse a CSV byte stream into a raw dataset.
pub fn parse_csv(
    input: impl Read,
    class: &ClassColumn,
    hints: &HashMap<String, KindHint>,
) -> Result<RawDataset, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let headers: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() {
        return Err(IngestError::syntax(1, "missing header row"));
    }

    let mut records: Vec<(usize, csv::StringRecord)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(records.len() + 2);
        records.push((line, record));
    }

    let class_idx = match class {
        ClassColumn::Name(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IngestError::UnknownClassColumn(name.clone()))?,
        ClassColumn::Index(i) => {
            if *i >= headers.len() {
                return Err(IngestError::UnknownClassColumn(i.to_string()));
            }
            *i
        }
    };

    let keep: Vec<usize> = (0..headers.len()).filter(|&j| j != class_idx).collect();
    let mut attribute_kinds = Vec::with_capacity(keep.len());
    for &j in &keep {
        let kind = match hints.get(&headers[j]) {
            Some(KindHint::Numeric) => {
                for (line, record) in &records {
                    let field = &record[j];
                    if !field.is_empty() && parse_number(field).is_none() {
                        return Err(IngestError::syntax(
                            *line,
                            format!(
                                "column `{}` is hinted numeric but holds `{field}`",
                                headers[j]
                            ),
                        ));
                    }
                }
                AttributeKind::Numeric
            }
            Some(KindHint::Nominal) => nominal_kind(&records, j),
            None => {
                let all_numeric = records
                    .iter()
                    .all(|(_, r)| r[j].is_empty() || parse_number(&r[j]).is_some());
                if all_numeric {
                    AttributeKind::Numeric
                } else {
                    nominal_kind(&records, j)
                }
            }
        };
        attribute_kinds.push(kind);
    }

    // Class names in first-appearance order.
    let mut class_names: Vec<String> = Vec::new();
    let mut labels = Vec::with_capacity(records.len());
    for (_, record) in &records {
        let field = &record[class_idx];
        if field.is_empty() {
            labels.push(None);
        } else {
            let idx = match class_names.iter().position(|c| c == field) {
                Some(i) => i,
                None => {
                    class_names.push(field.to_string());
                    class_names.len() - 1
                }
            };
            labels.push(Some(idx));
        }
    }

    let mut rows = Vec::with_capacity(records.len());
    for (_, record) in &records {
        let mut cells = Vec::with_capacity(keep.len());
        for (&j, kind) in keep.iter().zip(attribute_kinds.iter()) {
            let field = &record[j];
            let cell = if field.is_empty() {
                None
            } else {
                match kind {
                    AttributeKind::Numeric => Some(Value::Num(
                        parse_number(field).expect("numeric columns were pre-checked"),
                    )),
                    AttributeKind::Nominal(categories) => Some(Value::Cat(
                        categories
                            .iter()
                            .position(|c| c == field)
                            .expect("categories collected from these records"),
                    )),
                }
            };
            cells.push(cell);
        }
        rows.push(cells);
    }

    Ok(RawDataset {
        attribute_names: keep.iter().map(|&j| headers[j].clone()).collect(),
        attribute_kinds,
        rows,
        labels,
        class_names,
    })
}

fn nominal_kind(records: &[(usize, csv::StringRecord)], j: usize) -> AttributeKind {
    let mut categories: Vec<String> = Vec::new();
    for (_, record) in records {
        let field = &record[j];
        if !field.is_empty() && !categories.iter().any(|c| c == field) {
            categories.push(field.to_string());
        }
    }
    if categories.is_empty() {
        // all-missing column: give it a placeholder category so the kind
        // stays well-formed; every row is missing and gets removed anyway
        categories.push(String::new());
    }
    AttributeKind::Nominal(categories)
}

fn parse_number(field: &str) -> Option<f64> {
    field.parse::<f64>().ok().filter(|x| x.is_finite())
}

fn csv_error(err: csv::Error) -> IngestError {
    let line = err
        .position()
        .map(|p| p.line() as usize)
        .unwrap_or_default();
    IngestError::Syntax {
        line,
        message: err.to_string(),
    }
}

/// Write a dataset as CSV: attribute columns in order, the class as the
/// last column under `class_name`. Numeric cells print with full
/// round-trip precision.
pub fn write_csv(
    data: &Dataset,
    class_name: &str,
    out: impl Write,
) -> Result<(), IngestError> {
    let mut writer = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = data.attribute_names().iter().map(String::as_str).collect();
    header.push(class_name);
    writer.write_record(&header).map_err(csv_error)?;
    for i in 0..data.n_rows() {
        let mut record: Vec<String> = Vec::with_capacity(data.n_attributes() + 1);
        for j in 0..data.n_attributes() {
            record.push(match data.cell(i, j) {
                Value::Num(x) => x.to_string(),
                Value::Cat(c) => match &data.attribute_kinds()[j] {
                    AttributeKind::Nominal(categories) => categories[c].clone(),
                    AttributeKind::Numeric => unreachable!(),
                },
            });
        }
        record.push(data.class_names()[data.labels()[i]].clone());
        writer.write_record(&record).map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}
