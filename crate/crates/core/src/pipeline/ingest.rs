//! Text loaders for edge lists, embeddings, and attribute CSVs.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::graph::{BuildReport, Graph, GraphBuilder};
use crate::group::AttributeTable;

pub const DEFAULT_LABEL: &str = "0";

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Data lines as `(1-based line number, trimmed text)`, skipping blanks and `#` comments.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses an edge list: one `idA idB` pair per line. A line holding a single
/// id declares a node that may have no edges.
pub fn parse_graph(text: &str, path: &Path) -> Result<(Graph, BuildReport)> {
    let mut builder = GraphBuilder::new();
    for (line, content) in data_lines(text) {
        let mut tokens = content.split_whitespace();
        match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => builder.add_edge(a, b),
            (Some(a), None, None) => {
                builder.add_node(a);
            }
            _ => {
                return Err(parse_error(
                    path,
                    line,
                    format!("expected \"idA idB\", got {content:?}"),
                ))
            }
        }
    }
    let (g, report) = builder.build();
    if report.duplicate_edges > 0 || report.self_loops > 0 {
        log::warn!(
            "{}: dropped {} duplicate edges and {} self-loops",
            path.display(),
            report.duplicate_edges,
            report.self_loops
        );
    }
    Ok((g, report))
}

pub fn load_graph(path: &Path) -> Result<(Graph, BuildReport)> {
    parse_graph(&read(path)?, path)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingLoadReport {
    /// Rows whose id is not a node of the graph.
    pub unknown_rows: usize,
}

/// Parses `id v1 … vd` rows aligned to `g`. A leading `n d` header line is
/// accepted when it matches the rows that follow.
pub fn parse_embeddings(text: &str, path: &Path, g: &Graph) -> Result<(EmbeddingMatrix, EmbeddingLoadReport)> {
    let lines: Vec<(usize, &str)> = data_lines(text).collect();
    let mut rows = &lines[..];
    let mut dim: Option<usize> = None;
    if let [(_, first), rest @ ..] = rows {
        if let Some((n, d)) = header(first) {
            let next_width = rest.first().map(|(_, l)| l.split_whitespace().count());
            if n == rest.len() && next_width == Some(d + 1) {
                dim = Some(d);
                rows = rest;
            }
        }
    }

    let n = g.node_count();
    let mut values: Vec<Option<Vec<f64>>> = vec![None; n];
    let mut report = EmbeddingLoadReport::default();
    for &(line, content) in rows {
        let mut tokens = content.split_whitespace();
        let id = tokens.next().expect("data lines are non-empty");
        let row: Vec<f64> = tokens
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| parse_error(path, line, format!("not a finite number: {t:?}")))
            })
            .collect::<Result<_>>()?;
        let expected = *dim.get_or_insert(row.len());
        if row.len() != expected || expected == 0 {
            return Err(Error::DimensionMismatch {
                path: path.to_path_buf(),
                line,
                expected,
                found: row.len(),
            });
        }
        let Ok(u) = g.index_of(id) else {
            report.unknown_rows += 1;
            continue;
        };
        if values[u].is_some() {
            return Err(parse_error(path, line, format!("duplicate embedding for node {id}")));
        }
        values[u] = Some(row);
    }
    if report.unknown_rows > 0 {
        log::warn!(
            "{}: skipped {} rows for ids not in the graph",
            path.display(),
            report.unknown_rows
        );
    }

    let d = dim.unwrap_or(0);
    let mut flat = Vec::with_capacity(n * d);
    for (u, row) in values.into_iter().enumerate() {
        match row {
            Some(row) => flat.extend(row),
            None => return Err(Error::MissingEmbedding(g.node_ids()[u].clone())),
        }
    }
    Ok((EmbeddingMatrix::new(n, d.max(1), flat)?, report))
}

fn header(line: &str) -> Option<(usize, usize)> {
    let mut tokens = line.split_whitespace();
    let n = tokens.next()?.parse().ok()?;
    let d = tokens.next()?.parse().ok()?;
    tokens.next().is_none().then_some((n, d))
}

pub fn load_embeddings(path: &Path, g: &Graph) -> Result<(EmbeddingMatrix, EmbeddingLoadReport)> {
    parse_embeddings(&read(path)?, path, g)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeLoadReport {
    /// Nodes absent from the file that received the default label.
    pub imputed: usize,
    /// Rows naming ids that are not graph nodes.
    pub unknown_rows: usize,
}

/// Parses a two-column `id,<attribute>` CSV with a header row. Nodes missing
/// from the file get `default_label`.
pub fn parse_attributes(
    text: &str,
    path: &Path,
    name: &str,
    g: &Graph,
    default_label: &str,
) -> Result<(AttributeTable, AttributeLoadReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut labels: Vec<Option<String>> = vec![None; g.node_count()];
    let mut report = AttributeLoadReport::default();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 2 {
            return Err(parse_error(
                path,
                line,
                format!("expected 2 fields, found {}", record.len()),
            ));
        }
        match g.index_of(&record[0]) {
            Ok(u) => {
                if labels[u].is_some() {
                    return Err(parse_error(
                        path,
                        line,
                        format!("duplicate label for node {}", &record[0]),
                    ));
                }
                labels[u] = Some(record[1].to_string());
            }
            Err(_) => {
                log::warn!(
                    "{}:{line}: unknown node id {:?}, row skipped",
                    path.display(),
                    &record[0]
                );
                report.unknown_rows += 1;
            }
        }
    }
    let labels: Vec<String> = labels
        .into_iter()
        .map(|l| {
            l.unwrap_or_else(|| {
                report.imputed += 1;
                default_label.to_string()
            })
        })
        .collect();
    if report.imputed > 0 {
        log::info!(
            "{}: imputed label {default_label:?} for {} nodes",
            path.display(),
            report.imputed
        );
    }
    let table = if labels.is_empty() {
        AttributeTable::new(name, &labels, &[default_label.to_string()])?
    } else {
        AttributeTable::new::<String>(name, &labels, &[])?
    };
    Ok((table, report))
}

pub fn load_attributes(
    path: &Path,
    name: &str,
    g: &Graph,
    default_label: &str,
) -> Result<(AttributeTable, AttributeLoadReport)> {
    parse_attributes(&read(path)?, path, name, g, default_label)
}
