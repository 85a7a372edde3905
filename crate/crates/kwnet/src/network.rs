//! Co-occurrence and author network construction.
//!
//! Both builders apply the per-document cleanup passes in the fixed order
//! subsumption removal, then artifact stripping, before aggregating. Node
//! counts are document counts (not raw occurrence totals; the occurrence
//! total is carried as an auxiliary field), and a co-occurrence edge gains
//! weight 1 per document containing both endpoints.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::{ExtractedDoc, ExtractedKeyword};

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {reason}")]
    Malformed { path: String, reason: String },
    #[error("unknown network mode `{0}` (expected cooccurrence|author)")]
    BadMode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkMode {
    Cooccurrence,
    Author,
}

impl fmt::Display for NetworkMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NetworkMode::Cooccurrence => "cooccurrence",
            NetworkMode::Author => "author",
        })
    }
}

impl FromStr for NetworkMode {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cooccurrence" => Ok(NetworkMode::Cooccurrence),
            "author" => Ok(NetworkMode::Author),
            other => Err(NetworkError::BadMode(other.to_string())),
        }
    }
}

/// Per-node bookkeeping. In author mode the three numeric fields are unused
/// and held at zero; author identity lives in the node label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeInfo {
    pub count: u64,
    pub min_relevance_seen: f64,
    pub occurrences: u64,
}

/// Weighted undirected graph over keywords (co-occurrence mode) or authors
/// (author mode). Edge keys are label pairs with `source < target`; maps are
/// ordered so iteration (and serialization) is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct KeywordNetwork {
    pub mode: NetworkMode,
    pub nodes: BTreeMap<String, NodeInfo>,
    pub edges: BTreeMap<(String, String), f64>,
}

impl KeywordNetwork {
    pub fn empty(mode: NetworkMode) -> Self {
        KeywordNetwork {
            mode,
            nodes: BTreeMap::new(),
            edges: BTreeMap::new(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn total_edge_weight(&self) -> f64 {
        self.edges.values().sum()
    }

    /// Writes `nodes.csv` (label,count,min_relevance_seen,occurrences) and
    /// `edges.csv` (source,target,weight), both sorted for stable diffs.
    pub fn write_csv(&self, dir: &Path) -> Result<(), NetworkError> {
        fs::create_dir_all(dir).map_err(|source| NetworkError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        let nodes_path = dir.join("nodes.csv");
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["label", "count", "min_relevance_seen", "occurrences"])
            .and_then(|_| {
                for (label, info) in &self.nodes {
                    w.write_record([
                        label.as_str(),
                        &info.count.to_string(),
                        &format!("{}", info.min_relevance_seen),
                        &info.occurrences.to_string(),
                    ])?;
                }
                Ok(())
            })
            .map_err(|source| NetworkError::Csv {
                path: nodes_path.display().to_string(),
                source,
            })?;
        write_bytes(&nodes_path, w.into_inner().expect("vec writer"))?;

        let edges_path = dir.join("edges.csv");
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["source", "target", "weight"])
            .and_then(|_| {
                for ((a, b), weight) in &self.edges {
                    w.write_record([a.as_str(), b.as_str(), &format!("{weight}")])?;
                }
                Ok(())
            })
            .map_err(|source| NetworkError::Csv {
                path: edges_path.display().to_string(),
                source,
            })?;
        write_bytes(&edges_path, w.into_inner().expect("vec writer"))
    }

    /// Reads a network back from `nodes.csv`/`edges.csv` in `dir`.
    pub fn read_csv(dir: &Path, mode: NetworkMode) -> Result<Self, NetworkError> {
        let nodes_path = dir.join("nodes.csv");
        let mut nodes = BTreeMap::new();
        let mut reader =
            csv::Reader::from_path(&nodes_path).map_err(|source| NetworkError::Csv {
                path: nodes_path.display().to_string(),
                source,
            })?;
        for record in reader.records() {
            let record = record.map_err(|source| NetworkError::Csv {
                path: nodes_path.display().to_string(),
                source,
            })?;
            let parsed = (|| -> Option<(String, NodeInfo)> {
                Some((
                    record.get(0)?.to_string(),
                    NodeInfo {
                        count: record.get(1)?.parse().ok()?,
                        min_relevance_seen: record.get(2)?.parse().ok()?,
                        occurrences: record.get(3)?.parse().ok()?,
                    },
                ))
            })();
            let (label, info) = parsed.ok_or_else(|| NetworkError::Malformed {
                path: nodes_path.display().to_string(),
                reason: format!("bad node record {record:?}"),
            })?;
            nodes.insert(label, info);
        }

        let edges_path = dir.join("edges.csv");
        let mut edges = BTreeMap::new();
        let mut reader =
            csv::Reader::from_path(&edges_path).map_err(|source| NetworkError::Csv {
                path: edges_path.display().to_string(),
                source,
            })?;
        for record in reader.records() {
            let record = record.map_err(|source| NetworkError::Csv {
                path: edges_path.display().to_string(),
                source,
            })?;
            let parsed = (|| -> Option<(String, String, f64)> {
                Some((
                    record.get(0)?.to_string(),
                    record.get(1)?.to_string(),
                    record.get(2)?.parse().ok()?,
                ))
            })();
            let (a, b, weight) = parsed.ok_or_else(|| NetworkError::Malformed {
                path: edges_path.display().to_string(),
                reason: format!("bad edge record {record:?}"),
            })?;
            if a == b {
                return Err(NetworkError::Malformed {
                    path: edges_path.display().to_string(),
                    reason: format!("self-loop on `{a}`"),
                });
            }
            if !nodes.contains_key(&a) || !nodes.contains_key(&b) {
                return Err(NetworkError::Malformed {
                    path: edges_path.display().to_string(),
                    reason: format!("edge ({a},{b}) references unknown node"),
                });
            }
            let key = if a < b { (a, b) } else { (b, a) };
            edges.insert(key, weight);
        }
        Ok(KeywordNetwork { mode, nodes, edges })
    }
}

fn write_bytes(path: &Path, bytes: Vec<u8>) -> Result<(), NetworkError> {
    fs::write(path, bytes).map_err(|source| NetworkError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Artifact (noisy keyword) rules: exact keyword matches plus substring
/// matches, both case-insensitive. File lines are literal keywords or
/// `contains:<substring>`; `#` starts a comment.
#[derive(Debug, Clone, Default)]
pub struct ArtifactRules {
    exact: HashSet<String>,
    contains: Vec<String>,
}

impl ArtifactRules {
    pub fn new<E, C>(exact: E, contains: C) -> Self
    where
        E: IntoIterator,
        E::Item: AsRef<str>,
        C: IntoIterator,
        C::Item: AsRef<str>,
    {
        ArtifactRules {
            exact: exact
                .into_iter()
                .map(|s| s.as_ref().to_lowercase())
                .collect(),
            contains: contains
                .into_iter()
                .map(|s| s.as_ref().to_lowercase())
                .collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_path(path: &Path) -> Result<Self, NetworkError> {
        let raw = fs::read_to_string(path).map_err(|source| NetworkError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut exact = Vec::new();
        let mut contains = Vec::new();
        for line in raw.lines() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            match t.strip_prefix("contains:") {
                Some(sub) => contains.push(sub.trim().to_string()),
                None => exact.push(t.to_string()),
            }
        }
        Ok(Self::new(exact, contains))
    }

    pub fn is_empty(&self) -> bool {
        self.exact.is_empty() && self.contains.is_empty()
    }

    pub fn matches(&self, keyword: &str) -> bool {
        let lowered = keyword.to_lowercase();
        self.exact.contains(&lowered) || self.contains.iter().any(|sub| lowered.contains(sub))
    }
}

/// Drops every keyword whose token sequence is contiguously contained in a
/// longer keyword of the same document (the retained set is an antichain
/// under containment). Idempotent.
pub fn remove_subsumed(keywords: &[ExtractedKeyword]) -> Vec<ExtractedKeyword> {
    let token_seqs: Vec<Vec<&str>> = keywords
        .iter()
        .map(|k| k.keyword_text.split(' ').collect())
        .collect();
    keywords
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let mine = &token_seqs[*i];
            !token_seqs.iter().any(|other| {
                other.len() > mine.len() && other.windows(mine.len()).any(|w| w == mine.as_slice())
            })
        })
        .map(|(_, k)| k.clone())
        .collect()
}

/// Removes keywords matching the artifact rules; order preserved. Idempotent.
pub fn strip_artifacts(
    keywords: &[ExtractedKeyword],
    rules: &ArtifactRules,
) -> Vec<ExtractedKeyword> {
    if rules.is_empty() {
        return keywords.to_vec();
    }
    keywords
        .iter()
        .filter(|k| !rules.matches(&k.keyword_text))
        .cloned()
        .collect()
}

/// The per-document cleanup both builders share: subsumption removal first,
/// then artifact stripping (the order is observable and fixed).
fn clean_keywords(doc: &ExtractedDoc, rules: &ArtifactRules) -> Vec<ExtractedKeyword> {
    strip_artifacts(&remove_subsumed(&doc.keywords), rules)
}

/// Builds the keyword co-occurrence network. Each document contributes 1 to
/// the count of every keyword it contains and 1 to the weight of every
/// unordered keyword pair; `min_relevance_seen` tracks the smallest local
/// relevance observed per keyword, and `occurrences` the raw occurrence
/// total.
pub fn build_cooccurrence(docs: &[ExtractedDoc], rules: &ArtifactRules) -> KeywordNetwork {
    let mut ids: HashMap<String, u32> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut count: Vec<u64> = Vec::new();
    let mut occurrences: Vec<u64> = Vec::new();
    let mut min_rel: Vec<f64> = Vec::new();
    let mut pair_weight: HashMap<u64, u64> = HashMap::new();

    let mut doc_ids: Vec<u32> = Vec::new();
    for doc in docs {
        doc_ids.clear();
        for kw in clean_keywords(doc, rules) {
            let id = *ids.entry(kw.keyword_text.clone()).or_insert_with(|| {
                labels.push(kw.keyword_text.clone());
                count.push(0);
                occurrences.push(0);
                min_rel.push(f64::INFINITY);
                (labels.len() - 1) as u32
            });
            let i = id as usize;
            count[i] += 1;
            occurrences[i] += kw.occurrences as u64;
            if kw.relevance < min_rel[i] {
                min_rel[i] = kw.relevance;
            }
            doc_ids.push(id);
        }
        for (i, &a) in doc_ids.iter().enumerate() {
            for &b in &doc_ids[i + 1..] {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                *pair_weight
                    .entry(((lo as u64) << 32) | hi as u64)
                    .or_insert(0) += 1;
            }
        }
    }

    let mut net = KeywordNetwork::empty(NetworkMode::Cooccurrence);
    for (i, label) in labels.iter().enumerate() {
        net.nodes.insert(
            label.clone(),
            NodeInfo {
                count: count[i],
                min_relevance_seen: min_rel[i],
                occurrences: occurrences[i],
            },
        );
    }
    for (packed, weight) in pair_weight {
        let a = &labels[(packed >> 32) as usize];
        let b = &labels[(packed & 0xffff_ffff) as usize];
        let key = if a < b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        net.edges.insert(key, weight as f64);
    }
    net
}

/// Removes every single-count node whose minimum observed relevance is at
/// or below `threshold`, plus incident edges. Threshold 0 is the identity
/// (relevances are always >= 1.0). Co-occurrence mode only.
pub fn prune_single_occurrence(net: &KeywordNetwork, threshold: f64) -> KeywordNetwork {
    assert_eq!(
        net.mode,
        NetworkMode::Cooccurrence,
        "single-occurrence pruning applies to co-occurrence networks"
    );
    retain_nodes(net, |_, info| {
        !(info.count == 1 && info.min_relevance_seen <= threshold)
    })
}

/// Removes nodes appearing in fewer than `min_docs` documents, plus
/// incident edges. Co-occurrence mode only.
pub fn prune_min_doc_freq(net: &KeywordNetwork, min_docs: u64) -> KeywordNetwork {
    assert_eq!(
        net.mode,
        NetworkMode::Cooccurrence,
        "document-frequency pruning applies to co-occurrence networks"
    );
    retain_nodes(net, |_, info| info.count >= min_docs)
}

fn retain_nodes<F>(net: &KeywordNetwork, keep: F) -> KeywordNetwork
where
    F: Fn(&str, &NodeInfo) -> bool,
{
    let nodes: BTreeMap<String, NodeInfo> = net
        .nodes
        .iter()
        .filter(|(label, info)| keep(label, info))
        .map(|(label, info)| (label.clone(), *info))
        .collect();
    let edges = net
        .edges
        .iter()
        .filter(|((a, b), _)| nodes.contains_key(a) && nodes.contains_key(b))
        .map(|(k, w)| (k.clone(), *w))
        .collect();
    KeywordNetwork {
        mode: net.mode,
        nodes,
        edges,
    }
}

/// An author network plus the number of documents skipped for lacking an
/// author id.
#[derive(Debug, Clone)]
pub struct AuthorBuild {
    pub network: KeywordNetwork,
    pub skipped_docs: usize,
}

/// Builds the author similarity network: one node per author (isolated when
/// their keyword set is empty or shared with no one), an edge wherever the
/// Jaccard similarity of two authors' keyword sets is positive. Artifact
/// stripping applies only when `strip_noise` is set; single-occurrence
/// pruning never applies here.
pub fn build_author_network(
    docs: &[ExtractedDoc],
    strip_noise: bool,
    rules: &ArtifactRules,
) -> AuthorBuild {
    let empty = ArtifactRules::empty();
    let effective = if strip_noise { rules } else { &empty };
    let mut skipped = 0usize;
    let mut sets: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for doc in docs {
        let Some(author) = &doc.author_id else {
            skipped += 1;
            continue;
        };
        let entry = sets.entry(author.clone()).or_default();
        for kw in clean_keywords(doc, effective) {
            entry.insert(kw.keyword_text);
        }
    }

    let authors: Vec<&String> = sets.keys().collect();
    let index: HashMap<&str, u32> = authors
        .iter()
        .enumerate()
        .map(|(i, a)| (a.as_str(), i as u32))
        .collect();
    // intersection sizes via keyword -> author inverted index
    let mut owners: HashMap<&str, Vec<u32>> = HashMap::new();
    for (author, set) in &sets {
        let a = index[author.as_str()];
        for kw in set {
            owners.entry(kw.as_str()).or_default().push(a);
        }
    }
    let mut inter: HashMap<u64, u64> = HashMap::new();
    for list in owners.values() {
        for (i, &a) in list.iter().enumerate() {
            for &b in &list[i + 1..] {
                // lists are ascending because sets is iterated in order
                *inter.entry(((a as u64) << 32) | b as u64).or_insert(0) += 1;
            }
        }
    }

    let mut net = KeywordNetwork::empty(NetworkMode::Author);
    for author in &authors {
        net.nodes.insert(
            (*author).clone(),
            NodeInfo {
                count: 0,
                min_relevance_seen: 0.0,
                occurrences: 0,
            },
        );
    }
    for (packed, shared) in inter {
        let a = authors[(packed >> 32) as usize];
        let b = authors[(packed & 0xffff_ffff) as usize];
        let union = sets[a].len() + sets[b].len() - shared as usize;
        let weight = shared as f64 / union as f64;
        let key = if a < b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        net.edges.insert(key, weight);
    }
    AuthorBuild {
        network: net,
        skipped_docs: skipped,
    }
}
