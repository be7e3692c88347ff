//! Edge-list parsing into a canonical interaction log.
//!
//! Input is plain text, one interaction per line: `src dst [timestamp]`,
//! `#`-prefixed comments, whitespace or comma delimited. Duplicate
//! interactions are kept; the split stage decides what to do with them.

use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum IngestError {
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount { line: usize, expected: usize, found: usize },
    #[error("line {line}: invalid timestamp {value:?}")]
    BadTimestamp { line: usize, value: String },
    #[error("no interaction records in input")]
    Empty,
    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub src: String,
    pub dst: String,
    pub timestamp: Option<u64>,
}

/// Ordered interaction stream, exactly as read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionLog {
    pub records: Vec<InteractionRecord>,
    pub temporal: bool,
    pub declared_directed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Delimiter {
    /// Any run of spaces/tabs, or a single comma.
    Auto,
    Char(char),
}

#[derive(Debug, Clone)]
pub struct ParseOptions {
    pub delimiter: Delimiter,
    pub has_timestamps: bool,
    pub directed: bool,
    pub comment_prefix: char,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            delimiter: Delimiter::Auto,
            has_timestamps: false,
            directed: false,
            comment_prefix: '#',
        }
    }
}

/// Parses an edge list, one record per non-comment, non-blank line.
pub fn parse_edge_list<R: BufRead>(reader: R, options: &ParseOptions) -> Result<InteractionLog, IngestError> {
    let expected = if options.has_timestamps { 3 } else { 2 };
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| IngestError::Io(e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with(options.comment_prefix) {
            continue;
        }
        let fields: Vec<&str> = match options.delimiter {
            Delimiter::Auto => {
                if trimmed.contains(',') {
                    trimmed.split(',').map(str::trim).collect()
                } else {
                    trimmed.split_whitespace().collect()
                }
            }
            Delimiter::Char(c) => trimmed.split(c).map(str::trim).collect(),
        };
        if fields.len() != expected {
            return Err(IngestError::FieldCount { line: line_no, expected, found: fields.len() });
        }
        let timestamp = if options.has_timestamps {
            Some(fields[2].parse::<u64>().map_err(|_| IngestError::BadTimestamp {
                line: line_no,
                value: fields[2].to_string(),
            })?)
        } else {
            None
        };
        records.push(InteractionRecord {
            src: fields[0].to_string(),
            dst: fields[1].to_string(),
            timestamp,
        });
    }
    if records.is_empty() {
        return Err(IngestError::Empty);
    }
    Ok(InteractionLog {
        records,
        temporal: options.has_timestamps,
        declared_directed: options.directed,
    })
}

/// Reorders every record so `src <= dst` and drops self-records.
///
/// Duplicates are kept on purpose: the future split sorts raw interactions
/// before deduplicating, so collapsing here would change its 75% cut.
pub fn canonicalize_undirected(log: &InteractionLog) -> InteractionLog {
    let records = log
        .records
        .iter()
        .filter(|r| r.src != r.dst)
        .map(|r| {
            if r.src <= r.dst {
                r.clone()
            } else {
                InteractionRecord { src: r.dst.clone(), dst: r.src.clone(), timestamp: r.timestamp }
            }
        })
        .collect();
    InteractionLog { records, temporal: log.temporal, declared_directed: false }
}

/// Keeps only the first occurrence of each directed `(src, dst)` pair,
/// preserving order. Collapses repeat-interaction streams to first-contact
/// edges, the form some published edge lists already come in.
pub fn dedup_directed_first(log: &InteractionLog) -> InteractionLog {
    let mut seen = std::collections::HashSet::new();
    let records = log
        .records
        .iter()
        .filter(|r| seen.insert((r.src.clone(), r.dst.clone())))
        .cloned()
        .collect();
    InteractionLog { records, temporal: log.temporal, declared_directed: log.declared_directed }
}

/// Summary counters used by the dataset regression checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DatasetStats {
    pub distinct_labels: usize,
    pub records: usize,
    pub distinct_directed_pairs: usize,
    pub distinct_undirected_pairs: usize,
}

pub fn dataset_stats(log: &InteractionLog) -> DatasetStats {
    use std::collections::BTreeSet;
    let mut labels = BTreeSet::new();
    let mut directed = BTreeSet::new();
    let mut undirected = BTreeSet::new();
    for r in &log.records {
        labels.insert(r.src.as_str());
        labels.insert(r.dst.as_str());
        directed.insert((r.src.as_str(), r.dst.as_str()));
        let (lo, hi) = if r.src <= r.dst { (&r.src, &r.dst) } else { (&r.dst, &r.src) };
        undirected.insert((lo.as_str(), hi.as_str()));
    }
    DatasetStats {
        distinct_labels: labels.len(),
        records: log.records.len(),
        distinct_directed_pairs: directed.len(),
        distinct_undirected_pairs: undirected.len(),
    }
}
