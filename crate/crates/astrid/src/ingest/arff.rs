//! ARFF reader and writer.
//!
//! Supports the dense subset of the format: `@relation`, `@attribute` with
//! `numeric`/`real`/`integer` or `{c1,c2,...}` types, `@data` with
//! comma-separated rows, `%` comment lines, `?` for missing values,
//! case-insensitive keywords and single- or double-quoted names. `string`
//! and `date` attributes are rejected outright — silently dropping columns
//! would desynchronize attribute indices everywhere downstream.

use std::io::{BufRead, BufReader, Read};

use crate::dataset::{AttributeKind, RawDataset, Value};

use super::IngestError;

/// A parsed ARFF file, kept close to the text: data cells stay raw tokens
/// (`None` for `?`), so writing and re-parsing reproduces the document.
#[derive(Debug, Clone, PartialEq)]
pub struct ArffDocument {
    pub relation_name: String,
    pub attributes: Vec<(String, AttributeKind)>,
    pub data_rows: Vec<Vec<Option<String>>>,
}

/// Parse an ARFF byte stream.
pub fn parse_arff(input: impl Read) -> Result<ArffDocument, IngestError> {
    let reader = BufReader::new(input);
    let mut relation_name: Option<String> = None;
    let mut attributes: Vec<(String, AttributeKind)> = Vec::new();
    let mut data_rows = Vec::new();
    let mut in_data = false;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }

        if !in_data {
            let lower = trimmed.to_ascii_lowercase();
            if lower.starts_with("@relation") {
                let rest = trimmed["@relation".len()..].trim();
                relation_name = Some(unquote(rest).ok_or_else(|| {
                    IngestError::syntax(line_no, "expected a relation name after @relation")
                })?);
            } else if lower.starts_with("@attribute") {
                let rest = trimmed["@attribute".len()..].trim();
                let (name, kind_text) = split_name(rest).ok_or_else(|| {
                    IngestError::syntax(line_no, "expected `@attribute <name> <type>`")
                })?;
                let kind = parse_kind(kind_text, &name, line_no)?;
                attributes.push((name, kind));
            } else if lower == "@data" {
                if relation_name.is_none() {
                    return Err(IngestError::syntax(line_no, "@data before @relation"));
                }
                if attributes.is_empty() {
                    return Err(IngestError::syntax(
                        line_no,
                        "@data before any @attribute declaration",
                    ));
                }
                in_data = true;
            } else {
                return Err(IngestError::syntax(
                    line_no,
                    format!("expected @relation, @attribute or @data, found `{trimmed}`"),
                ));
            }
        } else {
            if trimmed.starts_with('{') {
                return Err(IngestError::syntax(
                    line_no,
                    "sparse ARFF rows are not supported",
                ));
            }
            let tokens = tokenize_row(trimmed, line_no)?;
            if tokens.len() != attributes.len() {
                return Err(IngestError::syntax(
                    line_no,
                    format!(
                        "expected {} comma-separated values, found {}",
                        attributes.len(),
                        tokens.len()
                    ),
                ));
            }
            for (token, (name, kind)) in tokens.iter().zip(attributes.iter()) {
                check_token(token.as_deref(), kind, name, line_no)?;
            }
            data_rows.push(tokens);
        }
    }

    let relation_name = relation_name
        .ok_or_else(|| IngestError::syntax(0, "missing @relation declaration"))?;
    if !in_data {
        return Err(IngestError::syntax(0, "missing @data section"));
    }
    Ok(ArffDocument {
        relation_name,
        attributes,
        data_rows,
    })
}

fn parse_kind(text: &str, name: &str, line: usize) -> Result<AttributeKind, IngestError> {
    let lower = text.to_ascii_lowercase();
    if lower == "numeric" || lower == "real" || lower == "integer" {
        return Ok(AttributeKind::Numeric);
    }
    if text.starts_with('{') {
        let Some(inner) = text.strip_prefix('{').and_then(|t| t.strip_suffix('}')) else {
            return Err(IngestError::syntax(line, "unterminated category list"));
        };
        let mut categories = Vec::new();
        for raw in split_respecting_quotes(inner, line)? {
            let category = unquote(raw.trim()).ok_or_else(|| {
                IngestError::syntax(line, format!("bad category token `{}`", raw.trim()))
            })?;
            if category.is_empty() {
                return Err(IngestError::syntax(line, "empty category name"));
            }
            if categories.contains(&category) {
                return Err(IngestError::syntax(
                    line,
                    format!("duplicate category `{category}`"),
                ));
            }
            categories.push(category);
        }
        if categories.is_empty() {
            return Err(IngestError::syntax(line, "empty category list"));
        }
        return Ok(AttributeKind::Nominal(categories));
    }
    if lower == "string" || lower.starts_with("date") {
        return Err(IngestError::UnsupportedAttributeType {
            line,
            name: name.to_string(),
            kind: text.to_string(),
        });
    }
    Err(IngestError::syntax(
        line,
        format!("unknown attribute type `{text}`"),
    ))
}

/// Split `<name> <rest>` where the name may be quoted.
fn split_name(text: &str) -> Option<(String, &str)> {
    let text = text.trim_start();
    let mut chars = text.char_indices();
    let (_, first) = chars.next()?;
    if first == '\'' || first == '"' {
        for (i, c) in chars {
            if c == first {
                let name = text[1..i].to_string();
                if name.is_empty() {
                    return None;
                }
                return Some((name, text[i + 1..].trim_start()));
            }
        }
        None
    } else {
        let end = text.find(char::is_whitespace)?;
        Some((text[..end].to_string(), text[end..].trim_start()))
    }
}

/// Strip matching quotes; `None` on empty input, unterminated quotes, or a
/// bare token containing a quote character.
fn unquote(token: &str) -> Option<String> {
    if token.is_empty() {
        return None;
    }
    let bytes = token.as_bytes();
    if bytes[0] == b'\'' || bytes[0] == b'"' {
        if token.len() >= 2 && bytes[token.len() - 1] == bytes[0] {
            let inner = &token[1..token.len() - 1];
            if inner.contains(bytes[0] as char) {
                return None;
            }
            return Some(inner.to_string());
        }
        return None;
    }
    if token.contains('\'') || token.contains('"') {
        return None;
    }
    Some(token.to_string())
}

/// Split a data row on commas, honoring quoted tokens. `?` marks missing.
fn tokenize_row(line: &str, line_no: usize) -> Result<Vec<Option<String>>, IngestError> {
    let mut tokens = Vec::new();
    for raw in split_respecting_quotes(line, line_no)? {
        let raw = raw.trim();
        if raw == "?" {
            tokens.push(None);
        } else {
            let value = unquote(raw)
                .ok_or_else(|| IngestError::syntax(line_no, format!("bad token `{raw}`")))?;
            tokens.push(Some(value));
        }
    }
    Ok(tokens)
}

fn split_respecting_quotes(line: &str, line_no: usize) -> Result<Vec<&str>, IngestError> {
    let mut parts = Vec::new();
    let mut start = 0;
    let mut quote: Option<char> = None;
    for (i, c) in line.char_indices() {
        match quote {
            Some(q) if c == q => quote = None,
            Some(_) => {}
            None if c == '\'' || c == '"' => quote = Some(c),
            None if c == ',' => {
                parts.push(&line[start..i]);
                start = i + 1;
            }
            None => {}
        }
    }
    if quote.is_some() {
        return Err(IngestError::syntax(line_no, "unterminated quote"));
    }
    parts.push(&line[start..]);
    Ok(parts)
}

fn check_token(
    token: Option<&str>,
    kind: &AttributeKind,
    name: &str,
    line: usize,
) -> Result<(), IngestError> {
    let Some(token) = token else { return Ok(()) };
    match kind {
        AttributeKind::Numeric => {
            let parsed: f64 = token.parse().map_err(|_| {
                IngestError::syntax(
                    line,
                    format!("attribute `{name}`: `{token}` is not a number"),
                )
            })?;
            if !parsed.is_finite() {
                return Err(IngestError::syntax(
                    line,
                    format!("attribute `{name}`: `{token}` is not finite"),
                ));
            }
        }
        AttributeKind::Nominal(categories) => {
            if !categories.iter().any(|c| c == token) {
                return Err(IngestError::syntax(
                    line,
                    format!("attribute `{name}`: `{token}` is not a declared category"),
                ));
            }
        }
    }
    Ok(())
}

/// Render the document back to ARFF text. Names and tokens that need it are
/// quoted, so the output re-parses to an equal document.
pub fn write_arff(doc: &ArffDocument) -> String {
    let mut out = String::new();
    out.push_str("@relation ");
    out.push_str(&quote_if_needed(&doc.relation_name));
    out.push('\n');
    for (name, kind) in &doc.attributes {
        out.push_str("@attribute ");
        out.push_str(&quote_if_needed(name));
        out.push(' ');
        match kind {
            AttributeKind::Numeric => out.push_str("numeric"),
            AttributeKind::Nominal(categories) => {
                out.push('{');
                for (i, category) in categories.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&quote_if_needed(category));
                }
                out.push('}');
            }
        }
        out.push('\n');
    }
    out.push_str("@data\n");
    for row in &doc.data_rows {
        let rendered: Vec<String> = row
            .iter()
            .map(|cell| match cell {
                None => "?".to_string(),
                Some(token) => quote_if_needed(token),
            })
            .collect();
        out.push_str(&rendered.join(","));
        out.push('\n');
    }
    out
}

fn quote_if_needed(token: &str) -> String {
    let needs = token.is_empty()
        || token == "?"
        || token
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | '%' | '{' | '}'));
    if token.contains('\'') {
        format!("\"{token}\"")
    } else if needs || token.contains('"') {
        format!("'{token}'")
    } else {
        token.to_string()
    }
}

/// Pull the named nominal attribute out as the class, leaving the remaining
/// attributes as columns in declared order. Cells stay optional; run
/// preprocessing to resolve missingness.
pub fn to_dataset(doc: &ArffDocument, class_attribute: &str) -> Result<RawDataset, IngestError> {
    let class_idx = doc
        .attributes
        .iter()
        .position(|(name, _)| name == class_attribute)
        .ok_or_else(|| IngestError::UnknownAttribute(class_attribute.to_string()))?;
    let class_names = match &doc.attributes[class_idx].1 {
        AttributeKind::Nominal(categories) => categories.clone(),
        AttributeKind::Numeric => {
            return Err(IngestError::ClassAttributeNotNominal(
                class_attribute.to_string(),
            ))
        }
    };

    let keep: Vec<usize> = (0..doc.attributes.len())
        .filter(|&j| j != class_idx)
        .collect();
    let attribute_names = keep
        .iter()
        .map(|&j| doc.attributes[j].0.clone())
        .collect();
    let attribute_kinds: Vec<AttributeKind> =
        keep.iter().map(|&j| doc.attributes[j].1.clone()).collect();

    let mut rows = Vec::with_capacity(doc.data_rows.len());
    let mut labels = Vec::with_capacity(doc.data_rows.len());
    for (row_idx, row) in doc.data_rows.iter().enumerate() {
        let mut cells = Vec::with_capacity(keep.len());
        for (&j, kind) in keep.iter().zip(attribute_kinds.iter()) {
            let cell = match &row[j] {
                None => None,
                Some(token) => Some(cell_value(token, kind, row_idx, &doc.attributes[j].0)?),
            };
            cells.push(cell);
        }
        rows.push(cells);
        labels.push(match &row[class_idx] {
            None => None,
            Some(token) => Some(
                class_names
                    .iter()
                    .position(|c| c == token)
                    .ok_or_else(|| IngestError::BadCell {
                        row: row_idx + 1,
                        attribute: class_attribute.to_string(),
                        message: format!("`{token}` is not a declared class"),
                    })?,
            ),
        });
    }

    Ok(RawDataset {
        attribute_names,
        attribute_kinds,
        rows,
        labels,
        class_names,
    })
}

fn cell_value(
    token: &str,
    kind: &AttributeKind,
    row_idx: usize,
    attribute: &str,
) -> Result<Value, IngestError> {
    match kind {
        AttributeKind::Numeric => token
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(Value::Num)
            .ok_or_else(|| IngestError::BadCell {
                row: row_idx + 1,
                attribute: attribute.to_string(),
                message: format!("`{token}` is not a finite number"),
            }),
        AttributeKind::Nominal(categories) => categories
            .iter()
            .position(|c| c == token)
            .map(Value::Cat)
            .ok_or_else(|| IngestError::BadCell {
                row: row_idx + 1,
                attribute: attribute.to_string(),
                message: format!("`{token}` is not a declared category"),
            }),
    }
}
