//! Corpus loading, validation, and sentiment partitioning.
//!
//! Corpora are JSON Lines files, one document per line:
//! `{"id": "...", "author_id": "..."|null, "text": "..."}`. Line order is
//! preserved; it is the iteration order everywhere downstream.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sentiment::SentimentLabel;

/// One raw corpus record, the unit of extraction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    #[serde(default)]
    pub author_id: Option<String>,
    pub text: String,
}

/// An ordered document collection with a human-readable source label
/// (e.g. "twitter", "scopus"; defaults to the corpus file stem).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub source_label: String,
}

impl Corpus {
    pub fn new(documents: Vec<Document>, source_label: impl Into<String>) -> Self {
        Corpus {
            documents,
            source_label: source_label.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Distinct author ids, sorted.
    pub fn authors(&self) -> BTreeSet<&str> {
        self.documents
            .iter()
            .filter_map(|d| d.author_id.as_deref())
            .collect()
    }

    /// Canonical JSON Lines serialization: one object per line, fields in
    /// `id`, `author_id`, `text` order, `author_id` explicit `null` when
    /// absent. Loading this back yields the same corpus, byte for byte.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for doc in &self.documents {
            // Document serialization cannot fail: strings only.
            out.push_str(&serde_json::to_string(doc).expect("document serializes"));
            out.push('\n');
        }
        out
    }

    pub fn write_jsonl(&self, path: &Path) -> Result<(), CorpusError> {
        fs::write(path, self.to_jsonl()).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read corpus {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} line {line}: malformed record: {reason}")]
    MalformedLine {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("{path} line {line}: duplicate document id `{id}`")]
    DuplicateId {
        path: String,
        line: usize,
        id: String,
    },
    #[error("document id `{id}` missing from sentiment labels")]
    MissingLabel { id: String },
}

/// A loaded corpus plus the number of malformed lines skipped
/// (always 0 in strict mode, which errors instead).
#[derive(Debug, Clone)]
pub struct LoadedCorpus {
    pub corpus: Corpus,
    pub skipped: usize,
}

/// Parses JSON Lines content. Blank lines are ignored. In strict mode the
/// first malformed line aborts with its line number; otherwise malformed
/// lines are skipped and counted. Duplicate ids are always fatal.
pub fn parse_jsonl(
    content: &str,
    strict: bool,
    source_label: impl Into<String>,
    path: &str,
) -> Result<LoadedCorpus, CorpusError> {
    let mut documents = Vec::new();
    let mut seen = HashSet::new();
    let mut skipped = 0usize;
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Result<Document, _> = serde_json::from_str(line);
        let doc = match parsed {
            Ok(doc) if doc.id.is_empty() => Err("empty id".to_string()),
            Ok(doc) => Ok(doc),
            Err(err) => Err(err.to_string()),
        };
        match doc {
            Ok(doc) => {
                if !seen.insert(doc.id.clone()) {
                    return Err(CorpusError::DuplicateId {
                        path: path.to_string(),
                        line: line_no,
                        id: doc.id,
                    });
                }
                documents.push(doc);
            }
            Err(reason) if strict => {
                return Err(CorpusError::MalformedLine {
                    path: path.to_string(),
                    line: line_no,
                    reason,
                });
            }
            Err(_) => skipped += 1,
        }
    }
    Ok(LoadedCorpus {
        corpus: Corpus::new(documents, source_label),
        skipped,
    })
}

/// Loads a JSON Lines corpus from disk. The source label defaults to the
/// file stem.
pub fn load_corpus(path: &Path, strict: bool) -> Result<LoadedCorpus, CorpusError> {
    let display = path.display().to_string();
    let content = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: display.clone(),
        source,
    })?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_jsonl(&content, strict, label, &display)
}

/// The four sentiment subsets of a corpus; `all` is the unmodified input.
#[derive(Debug, Clone)]
pub struct SentimentPartition {
    pub positive: Corpus,
    pub negative: Corpus,
    pub neutral: Corpus,
    pub all: Corpus,
}

/// Splits a corpus into positive/negative/neutral/all subsets by a per-id
/// label map. Subset order follows corpus order. Errors if any document id
/// lacks a label.
pub fn partition_by_sentiment(
    corpus: &Corpus,
    labels: &HashMap<String, SentimentLabel>,
) -> Result<SentimentPartition, CorpusError> {
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    let mut neutral = Vec::new();
    for doc in &corpus.documents {
        let label = labels
            .get(&doc.id)
            .ok_or_else(|| CorpusError::MissingLabel { id: doc.id.clone() })?;
        match label {
            SentimentLabel::Positive => positive.push(doc.clone()),
            SentimentLabel::Negative => negative.push(doc.clone()),
            SentimentLabel::Neutral => neutral.push(doc.clone()),
        }
    }
    let label = &corpus.source_label;
    Ok(SentimentPartition {
        positive: Corpus::new(positive, label.clone()),
        negative: Corpus::new(negative, label.clone()),
        neutral: Corpus::new(neutral, label.clone()),
        all: corpus.clone(),
    })
}
