//! Sweep orchestration: expand a config grid, run the full pipeline per
//! cell, and emit comparison reports over the resulting artifact tree.
//!
//! Layout of an artifact tree under `out/`:
//!
//! ```text
//! manifest.json                    lineage record: inputs, digests, seed, configs
//! cache/extract_<setting>.jsonl    per-length-setting extraction, shared by configs
//! configs/<config_id>/nodes.csv    one directory per grid cell
//!                     edges.csv
//!                     metrics.json
//!                     ranked_degree_centrality.csv
//!                     ranked_node_strength.csv
//!                     ranked_count.csv
//! reports/...                      written later by `report`, not part of the manifest
//! ```
//!
//! Determinism contract: equal (input bytes, sweep config, seed) produce a
//! byte-identical tree. Everything that iterates does so in sorted or
//! grid order, floats print in shortest round-trip form, and the only
//! randomness (Louvain, at report time) is seeded from the manifest.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analytics::{
    cdf, metric, properties, summarize, MetricKind, MetricSummary, NetworkProperties,
    NodeMetricVector,
};
use crate::corpus::{parse_jsonl, CorpusError};
use crate::extract::{extract_document, ExtractError, ExtractedDoc, LengthSetting, Stopwords};
use crate::louvain::{community_report, louvain, CommunityReport};
use crate::network::{
    build_author_network, build_cooccurrence, prune_min_doc_freq, prune_single_occurrence,
    ArtifactRules, KeywordNetwork, NetworkError, NetworkMode,
};
use crate::rank::{rank_nodes, rbo_matrix, RankError, RankedList, RboParams, RboVariant};
use crate::sentiment::{label_text, Lexicon, LexiconError, SentimentLabel};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("axis `{0}` is empty")]
    EmptyAxis(&'static str),
    #[error("invalid config {id}: {reason}")]
    InvalidConfig { id: String, reason: String },
    #[error("sentiment subset `{0}` requires a lexicon path")]
    MissingLexicon(String),
    #[error("no output directory: set `out_dir` in the sweep file or pass --out")]
    MissingOutDir,
    #[error("failed to access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("bad sweep file {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {reason}")]
    Malformed { path: String, reason: String },
    #[error("unknown report kind `{0}` (expected properties|rbo|communities|cdf)")]
    BadReportKind(String),
    #[error("artifact missing: {0}")]
    MissingArtifact(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Rank(#[from] RankError),
}

/// Which documents feed a network build. `None` means sentiment is not
/// consulted at all (bibliometric corpora); `All` keeps every document but
/// belongs to a sentiment-partitioned grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentSubset {
    Positive,
    Negative,
    Neutral,
    All,
    None,
}

impl SentimentSubset {
    /// Short form used in config ids.
    pub fn slug(&self) -> &'static str {
        match self {
            SentimentSubset::Positive => "pos",
            SentimentSubset::Negative => "neg",
            SentimentSubset::Neutral => "neu",
            SentimentSubset::All => "all",
            SentimentSubset::None => "none",
        }
    }

    /// Whether a document with this label belongs to the subset.
    pub fn selects(&self, label: Option<SentimentLabel>) -> bool {
        match self {
            SentimentSubset::All | SentimentSubset::None => true,
            SentimentSubset::Positive => label == Some(SentimentLabel::Positive),
            SentimentSubset::Negative => label == Some(SentimentLabel::Negative),
            SentimentSubset::Neutral => label == Some(SentimentLabel::Neutral),
        }
    }

    /// Only the three label-filtered subsets need sentiment scores.
    pub fn requires_lexicon(&self) -> bool {
        matches!(
            self,
            SentimentSubset::Positive | SentimentSubset::Negative | SentimentSubset::Neutral
        )
    }
}

impl fmt::Display for SentimentSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SentimentSubset::Positive => "positive",
            SentimentSubset::Negative => "negative",
            SentimentSubset::Neutral => "neutral",
            SentimentSubset::All => "all",
            SentimentSubset::None => "none",
        })
    }
}

impl FromStr for SentimentSubset {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(SentimentSubset::Positive),
            "negative" => Ok(SentimentSubset::Negative),
            "neutral" => Ok(SentimentSubset::Neutral),
            "all" => Ok(SentimentSubset::All),
            "none" => Ok(SentimentSubset::None),
            other => Err(SweepError::Malformed {
                path: "sentiment subset".to_string(),
                reason: format!("unknown subset `{other}`"),
            }),
        }
    }
}

/// One cell of the experiment grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub length_setting: LengthSetting,
    pub sentiment_subset: SentimentSubset,
    pub relevance_threshold: f64,
    pub min_doc_freq: u64,
    pub strip_noise: bool,
    pub network_mode: NetworkMode,
    pub seed: u64,
}

impl PipelineConfig {
    /// Directory-safe identifier, unique within a grid:
    /// `cooccurrence_1-2_pos_thr1_mdf1_strip`.
    pub fn config_id(&self) -> String {
        format!(
            "{}_{}_{}_thr{}_mdf{}_{}",
            self.network_mode,
            self.length_setting,
            self.sentiment_subset.slug(),
            self.relevance_threshold,
            self.min_doc_freq,
            if self.strip_noise { "strip" } else { "keep" },
        )
    }

    /// Relevance thresholds and document-frequency floors act on
    /// co-occurrence networks; sentiment partitioning likewise. Author-mode
    /// cells must hold those at their no-op values.
    pub fn validate(&self) -> Result<(), SweepError> {
        let fail = |reason: String| {
            Err(SweepError::InvalidConfig {
                id: self.config_id(),
                reason,
            })
        };
        if !self.relevance_threshold.is_finite() || self.relevance_threshold < 0.0 {
            return fail(format!(
                "relevance threshold must be finite and >= 0, got {}",
                self.relevance_threshold
            ));
        }
        if self.min_doc_freq < 1 {
            return fail("min_doc_freq must be >= 1".to_string());
        }
        if self.network_mode == NetworkMode::Author {
            if self.sentiment_subset != SentimentSubset::None {
                return fail("author mode does not partition by sentiment".to_string());
            }
            if self.relevance_threshold != 0.0 {
                return fail("relevance threshold applies to co-occurrence mode only".to_string());
            }
            if self.min_doc_freq != 1 {
                return fail("min_doc_freq applies to co-occurrence mode only".to_string());
            }
        }
        Ok(())
    }
}

/// Value sets per swept field. Omitted axes fall back to single no-op
/// values (except length settings, which default to the full six-way grid).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Axes {
    pub network_modes: Vec<NetworkMode>,
    pub length_settings: Vec<LengthSetting>,
    pub sentiment_subsets: Vec<SentimentSubset>,
    pub relevance_thresholds: Vec<f64>,
    pub min_doc_freqs: Vec<u64>,
    pub strip_noise: Vec<bool>,
}

impl Default for Axes {
    fn default() -> Self {
        Axes {
            network_modes: vec![NetworkMode::Cooccurrence],
            length_settings: LengthSetting::default_grid().to_vec(),
            sentiment_subsets: vec![SentimentSubset::None],
            relevance_thresholds: vec![0.0],
            min_doc_freqs: vec![1],
            strip_noise: vec![true],
        }
    }
}

/// Canned grids mirroring the usual corpus treatments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// 6 length settings x 4 sentiment subsets x thresholds {0, 1, 4} = 72.
    Twitter,
    /// 6 length settings, no sentiment, min doc frequency 5.
    Scopus,
    /// 6 length settings x noise {stripped, kept} = 12 author networks.
    Author,
}

impl Profile {
    pub fn axes(&self) -> Axes {
        let base = Axes::default();
        match self {
            Profile::Twitter => Axes {
                sentiment_subsets: vec![
                    SentimentSubset::Positive,
                    SentimentSubset::Negative,
                    SentimentSubset::Neutral,
                    SentimentSubset::All,
                ],
                relevance_thresholds: vec![0.0, 1.0, 4.0],
                ..base
            },
            Profile::Scopus => Axes {
                min_doc_freqs: vec![5],
                ..base
            },
            Profile::Author => Axes {
                network_modes: vec![NetworkMode::Author],
                strip_noise: vec![true, false],
                ..base
            },
        }
    }
}

impl FromStr for Profile {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "twitter" => Ok(Profile::Twitter),
            "scopus" => Ok(Profile::Scopus),
            "author" => Ok(Profile::Author),
            other => Err(SweepError::Malformed {
                path: "profile".to_string(),
                reason: format!("unknown profile `{other}` (expected twitter|scopus|author)"),
            }),
        }
    }
}

/// A sweep: input paths plus the grid axes. JSON on disk; relative paths
/// resolve against the sweep file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub corpus: PathBuf,
    pub stopwords: PathBuf,
    #[serde(default)]
    pub lexicon: Option<PathBuf>,
    #[serde(default)]
    pub artifacts: Option<PathBuf>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub axes: Axes,
}

impl SweepConfig {
    pub fn from_path(path: &Path) -> Result<Self, SweepError> {
        let content = fs::read_to_string(path).map_err(|source| SweepError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut sweep: SweepConfig =
            serde_json::from_str(&content).map_err(|source| SweepError::Parse {
                path: path.display().to_string(),
                source,
            })?;
        if let Some(base) = path.parent() {
            let resolve = |p: &mut PathBuf| {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            };
            resolve(&mut sweep.corpus);
            resolve(&mut sweep.stopwords);
            if let Some(p) = sweep.lexicon.as_mut() {
                resolve(p);
            }
            if let Some(p) = sweep.artifacts.as_mut() {
                resolve(p);
            }
            if let Some(p) = sweep.out_dir.as_mut() {
                resolve(p);
            }
        }
        Ok(sweep)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let axes = &self.axes;
        let checks: [(&'static str, usize); 6] = [
            ("network_modes", axes.network_modes.len()),
            ("length_settings", axes.length_settings.len()),
            ("sentiment_subsets", axes.sentiment_subsets.len()),
            ("relevance_thresholds", axes.relevance_thresholds.len()),
            ("min_doc_freqs", axes.min_doc_freqs.len()),
            ("strip_noise", axes.strip_noise.len()),
        ];
        for (name, len) in checks {
            if len == 0 {
                return Err(SweepError::EmptyAxis(name));
            }
        }
        if self.lexicon.is_none() {
            if let Some(subset) = axes.sentiment_subsets.iter().find(|s| s.requires_lexicon()) {
                return Err(SweepError::MissingLexicon(subset.to_string()));
            }
        }
        for config in expand_with_seed(axes, self.seed) {
            config.validate()?;
        }
        Ok(())
    }
}

fn expand_with_seed(axes: &Axes, seed: u64) -> Vec<PipelineConfig> {
    let mut configs = Vec::new();
    for &network_mode in &axes.network_modes {
        for &length_setting in &axes.length_settings {
            for &sentiment_subset in &axes.sentiment_subsets {
                for &relevance_threshold in &axes.relevance_thresholds {
                    for &min_doc_freq in &axes.min_doc_freqs {
                        for &strip_noise in &axes.strip_noise {
                            configs.push(PipelineConfig {
                                length_setting,
                                sentiment_subset,
                                relevance_threshold,
                                min_doc_freq,
                                strip_noise,
                                network_mode,
                                seed,
                            });
                        }
                    }
                }
            }
        }
    }
    configs
}

/// The grid in a fixed nesting order: mode, length, subset, threshold,
/// min-doc-freq, strip-noise (innermost). Every cell is validated.
pub fn expand(sweep: &SweepConfig) -> Result<Vec<PipelineConfig>, SweepError> {
    sweep.validate()?;
    Ok(expand_with_seed(&sweep.axes, sweep.seed))
}

// ---------------------------------------------------------------------------
// Manifest

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestInputs {
    pub corpus: InputDigest,
    pub stopwords: InputDigest,
    pub lexicon: Option<InputDigest>,
    pub artifacts: Option<InputDigest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub length_setting: LengthSetting,
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEntry {
    pub config_id: String,
    pub config: PipelineConfig,
    pub status: RunStatus,
    #[serde(default)]
    pub error: Option<String>,
    pub files: Vec<String>,
}

/// The data-lineage record for one sweep run: inputs and their digests, the
/// seed every downstream random choice flows from, and one entry per config
/// listing the files it owns. Every file under `out/` except the manifest
/// itself and `reports/` belongs to exactly one cache or config entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub seed: u64,
    pub corpus_docs: usize,
    pub skipped_lines: usize,
    pub inputs: ManifestInputs,
    pub cache: Vec<CacheEntry>,
    pub configs: Vec<ConfigEntry>,
}

impl Manifest {
    pub fn from_path(path: &Path) -> Result<Self, SweepError> {
        let content = fs::read_to_string(path).map_err(|source| SweepError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&content).map_err(|source| SweepError::Parse {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Per-config summary written to `metrics.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigMetrics {
    pub properties: NetworkProperties,
    pub summaries: BTreeMap<String, MetricSummary>,
    pub docs_in_subset: usize,
    pub skipped_docs: usize,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the sweep file's `out_dir`.
    pub out_dir: Option<PathBuf>,
    /// Rayon worker count; `None` uses the global default.
    pub jobs: Option<usize>,
    /// Overrides the sweep file's seed (the CLI maps KWNET_SEED here).
    pub seed_override: Option<u64>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

fn read_input(path: &Path) -> Result<(Vec<u8>, InputDigest), SweepError> {
    let bytes = fs::read(path).map_err(|source| SweepError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let digest = InputDigest {
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
    };
    Ok((bytes, digest))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), SweepError> {
    fs::write(path, bytes).map_err(|source| SweepError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<(), SweepError> {
    fs::create_dir_all(path).map_err(|source| SweepError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

/// Network builds are shared across grid cells that differ only in pruning
/// parameters: the base graph depends on (mode, length setting, subset,
/// strip-noise) alone.
type GroupKey = (NetworkMode, LengthSetting, SentimentSubset, bool);

struct BaseBuild {
    network: KeywordNetwork,
    docs_in_subset: usize,
    skipped_docs: usize,
}

fn base_build(
    key: &GroupKey,
    extracted: &BTreeMap<LengthSetting, Vec<ExtractedDoc>>,
    rules: &ArtifactRules,
) -> BaseBuild {
    let (mode, setting, subset, strip) = key;
    let docs = &extracted[setting];
    match mode {
        NetworkMode::Cooccurrence => {
            let selected: Vec<ExtractedDoc> = docs
                .iter()
                .filter(|d| subset.selects(d.sentiment))
                .cloned()
                .collect();
            let empty = ArtifactRules::empty();
            let effective = if *strip { rules } else { &empty };
            BaseBuild {
                network: build_cooccurrence(&selected, effective),
                docs_in_subset: selected.len(),
                skipped_docs: 0,
            }
        }
        NetworkMode::Author => {
            let build = build_author_network(docs, *strip, rules);
            BaseBuild {
                docs_in_subset: docs.len() - build.skipped_docs,
                skipped_docs: build.skipped_docs,
                network: build.network,
            }
        }
    }
}

const RANKED_METRICS: [MetricKind; 3] = [
    MetricKind::DegreeCentrality,
    MetricKind::NodeStrength,
    MetricKind::Count,
];

fn process_config(
    config: &PipelineConfig,
    base: &BaseBuild,
    out_dir: &Path,
) -> Result<Vec<String>, SweepError> {
    let id = config.config_id();
    let dir = out_dir.join("configs").join(&id);
    create_dir(&dir)?;

    let network = match config.network_mode {
        NetworkMode::Cooccurrence => {
            let thresholded = prune_single_occurrence(&base.network, config.relevance_threshold);
            prune_min_doc_freq(&thresholded, config.min_doc_freq)
        }
        NetworkMode::Author => base.network.clone(),
    };

    network.write_csv(&dir)?;
    let mut files = vec![
        format!("configs/{id}/nodes.csv"),
        format!("configs/{id}/edges.csv"),
    ];

    let mut summaries = BTreeMap::new();
    for kind in RANKED_METRICS {
        let values = metric(&network, kind);
        if !values.values.is_empty() {
            summaries.insert(kind.to_string(), summarize(&values));
        }
        let ranked = rank_nodes(&values);
        let name = format!("ranked_{kind}.csv");
        ranked.write_csv(&dir.join(&name))?;
        files.push(format!("configs/{id}/{name}"));
    }

    let metrics = ConfigMetrics {
        properties: properties(&network),
        summaries,
        docs_in_subset: base.docs_in_subset,
        skipped_docs: base.skipped_docs,
    };
    write_file(&dir.join("metrics.json"), pretty_json(&metrics).as_bytes())?;
    files.push(format!("configs/{id}/metrics.json"));
    Ok(files)
}

fn run_inner(sweep: &SweepConfig, opts: &RunOptions) -> Result<Manifest, SweepError> {
    sweep.validate()?;
    let out_dir = opts
        .out_dir
        .clone()
        .or_else(|| sweep.out_dir.clone())
        .ok_or(SweepError::MissingOutDir)?;
    let seed = opts.seed_override.unwrap_or(sweep.seed);
    let configs = expand_with_seed(&sweep.axes, seed);

    let (corpus_bytes, corpus_digest) = read_input(&sweep.corpus)?;
    let (stopword_bytes, stopwords_digest) = read_input(&sweep.stopwords)?;
    let lexicon_input = sweep.lexicon.as_deref().map(read_input).transpose()?;
    let artifacts_input = sweep.artifacts.as_deref().map(read_input).transpose()?;

    let corpus_text = String::from_utf8(corpus_bytes).map_err(|e| SweepError::Malformed {
        path: sweep.corpus.display().to_string(),
        reason: format!("corpus is not UTF-8: {e}"),
    })?;
    let label = sweep
        .corpus
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let loaded = parse_jsonl(
        &corpus_text,
        false,
        label,
        &sweep.corpus.display().to_string(),
    )?;
    let corpus = loaded.corpus;

    let stopwords = Stopwords::from_words(
        String::from_utf8_lossy(&stopword_bytes)
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string),
    );
    let lexicon = sweep
        .lexicon
        .as_deref()
        .map(Lexicon::from_path)
        .transpose()?;
    let rules = sweep
        .artifacts
        .as_deref()
        .map(ArtifactRules::from_path)
        .transpose()?
        .unwrap_or_else(ArtifactRules::empty);

    // Sentiment is per-document and setting-independent; compute once.
    let labels: Option<Vec<SentimentLabel>> = lexicon.as_ref().map(|lex| {
        corpus
            .documents
            .par_iter()
            .map(|doc| label_text(&doc.text, lex))
            .collect()
    });

    create_dir(&out_dir)?;
    let cache_dir = out_dir.join("cache");
    create_dir(&cache_dir)?;

    // Extraction cache: one pass per distinct length setting, shared by all
    // downstream subsets and prunings.
    let mut settings: Vec<LengthSetting> = configs.iter().map(|c| c.length_setting).collect();
    settings.sort();
    settings.dedup();
    let extracted_pairs: Result<Vec<(LengthSetting, Vec<ExtractedDoc>)>, SweepError> = settings
        .par_iter()
        .map(|&setting| {
            let docs: Vec<ExtractedDoc> = corpus
                .documents
                .par_iter()
                .enumerate()
                .map(|(i, doc)| {
                    let mut extracted = extract_document(doc, &stopwords, setting);
                    extracted.sentiment = labels.as_ref().map(|l| l[i]);
                    extracted
                })
                .collect();
            Ok((setting, docs))
        })
        .collect();
    let extracted: BTreeMap<LengthSetting, Vec<ExtractedDoc>> =
        extracted_pairs?.into_iter().collect();

    let mut cache_entries = Vec::new();
    for (setting, docs) in &extracted {
        let mut body = String::new();
        for doc in docs {
            body.push_str(&serde_json::to_string(doc).expect("serializable doc"));
            body.push('\n');
        }
        let file = format!("cache/extract_{setting}.jsonl");
        write_file(&out_dir.join(&file), body.as_bytes())?;
        cache_entries.push(CacheEntry {
            length_setting: *setting,
            file,
            sha256: sha256_hex(body.as_bytes()),
        });
    }

    // Shared base networks, then per-config pruning and serialization.
    let mut group_keys: Vec<GroupKey> = configs
        .iter()
        .map(|c| {
            (
                c.network_mode,
                c.length_setting,
                c.sentiment_subset,
                c.strip_noise,
            )
        })
        .collect();
    group_keys.sort();
    group_keys.dedup();
    let bases: BTreeMap<GroupKey, BaseBuild> = group_keys
        .par_iter()
        .map(|key| (*key, base_build(key, &extracted, &rules)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect();

    let entries: Vec<ConfigEntry> = configs
        .par_iter()
        .map(|config| {
            let key = (
                config.network_mode,
                config.length_setting,
                config.sentiment_subset,
                config.strip_noise,
            );
            let result = process_config(config, &bases[&key], &out_dir);
            match result {
                Ok(files) => ConfigEntry {
                    config_id: config.config_id(),
                    config: config.clone(),
                    status: RunStatus::Ok,
                    error: None,
                    files,
                },
                Err(err) => ConfigEntry {
                    config_id: config.config_id(),
                    config: config.clone(),
                    status: RunStatus::Failed,
                    error: Some(err.to_string()),
                    files: Vec::new(),
                },
            }
        })
        .collect();

    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        corpus_docs: corpus.len(),
        skipped_lines: loaded.skipped,
        inputs: ManifestInputs {
            corpus: corpus_digest,
            stopwords: stopwords_digest,
            lexicon: lexicon_input.map(|(_, d)| d),
            artifacts: artifacts_input.map(|(_, d)| d),
        },
        cache: cache_entries,
        configs: entries,
    };
    write_file(
        &out_dir.join("manifest.json"),
        pretty_json(&manifest).as_bytes(),
    )?;
    Ok(manifest)
}

/// Runs the whole grid and writes the artifact tree. Configs that fail are
/// recorded in the manifest without aborting the rest.
pub fn run(sweep: &SweepConfig, opts: &RunOptions) -> Result<Manifest, SweepError> {
    match opts.jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| SweepError::Malformed {
                    path: "thread pool".to_string(),
                    reason: e.to_string(),
                })?;
            pool.install(|| run_inner(sweep, opts))
        }
        None => run_inner(sweep, opts),
    }
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    Properties,
    Rbo,
    Communities,
    Cdf,
}

impl fmt::Display for ReportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportKind::Properties => "properties",
            ReportKind::Rbo => "rbo",
            ReportKind::Communities => "communities",
            ReportKind::Cdf => "cdf",
        })
    }
}

impl FromStr for ReportKind {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "properties" => Ok(ReportKind::Properties),
            "rbo" => Ok(ReportKind::Rbo),
            "communities" => Ok(ReportKind::Communities),
            "cdf" => Ok(ReportKind::Cdf),
            other => Err(SweepError::BadReportKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    /// RBO persistence values, one matrix per (metric, p).
    pub ps: Vec<f64>,
    pub variant: RboVariant,
    /// Community report: cumulative node share to cover and nodes shown per
    /// community.
    pub coverage: f64,
    pub top_k: usize,
    /// Restrict to these config ids (manifest order); `None` means all.
    pub configs: Option<Vec<String>>,
    /// Overrides the manifest seed for Louvain (the CLI maps KWNET_SEED here).
    pub seed_override: Option<u64>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            ps: vec![0.9, 0.99],
            variant: RboVariant::Extrapolated,
            coverage: 0.9,
            top_k: 5,
            configs: None,
            seed_override: None,
        }
    }
}

/// One config's row in `reports/communities.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityRow {
    pub config_id: String,
    pub seed: u64,
    pub modularity: f64,
    pub num_communities: usize,
    pub report: CommunityReport,
}

fn selected_entries<'a>(
    manifest: &'a Manifest,
    opts: &ReportOptions,
) -> Result<Vec<&'a ConfigEntry>, SweepError> {
    let ok: Vec<&ConfigEntry> = manifest
        .configs
        .iter()
        .filter(|e| e.status == RunStatus::Ok)
        .collect();
    match &opts.configs {
        None => Ok(ok),
        Some(wanted) => {
            let by_id: HashMap<&str, &ConfigEntry> =
                ok.iter().map(|e| (e.config_id.as_str(), *e)).collect();
            let mut missing: Vec<&str> = wanted
                .iter()
                .map(String::as_str)
                .filter(|id| !by_id.contains_key(*id))
                .collect();
            if !missing.is_empty() {
                missing.sort();
                return Err(SweepError::MissingArtifact(format!(
                    "configs not in manifest (or failed): {}",
                    missing.join(", ")
                )));
            }
            Ok(ok
                .into_iter()
                .filter(|e| wanted.contains(&e.config_id))
                .collect())
        }
    }
}

fn config_dir(artifacts: &Path, id: &str) -> PathBuf {
    artifacts.join("configs").join(id)
}

fn read_metrics(artifacts: &Path, id: &str) -> Result<ConfigMetrics, SweepError> {
    let path = config_dir(artifacts, id).join("metrics.json");
    let content = fs::read_to_string(&path)
        .map_err(|_| SweepError::MissingArtifact(path.display().to_string()))?;
    serde_json::from_str(&content).map_err(|source| SweepError::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn csv_error(path: &Path) -> impl Fn(csv::Error) -> SweepError + '_ {
    move |source| {
        SweepError::Network(NetworkError::Csv {
            path: path.display().to_string(),
            source,
        })
    }
}

fn write_properties_report(
    artifacts: &Path,
    entries: &[&ConfigEntry],
    reports_dir: &Path,
) -> Result<Vec<PathBuf>, SweepError> {
    let path = reports_dir.join("properties.csv");
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "config_id",
        "network_mode",
        "length_setting",
        "sentiment_subset",
        "relevance_threshold",
        "min_doc_freq",
        "strip_noise",
        "num_nodes",
        "num_edges",
        "total_edge_weight",
        "largest_component",
    ])
    .map_err(csv_error(&path))?;
    for entry in entries {
        let m = read_metrics(artifacts, &entry.config_id)?;
        let c = &entry.config;
        w.write_record([
            entry.config_id.clone(),
            c.network_mode.to_string(),
            c.length_setting.to_string(),
            c.sentiment_subset.to_string(),
            format!("{}", c.relevance_threshold),
            format!("{}", c.min_doc_freq),
            format!("{}", c.strip_noise),
            format!("{}", m.properties.num_nodes),
            format!("{}", m.properties.num_edges),
            format!("{}", m.properties.total_edge_weight),
            format!("{}", m.properties.largest_component),
        ])
        .map_err(csv_error(&path))?;
    }
    write_file(&path, &w.into_inner().expect("vec writer"))?;
    Ok(vec![path])
}

fn write_rbo_reports(
    artifacts: &Path,
    entries: &[&ConfigEntry],
    reports_dir: &Path,
    opts: &ReportOptions,
) -> Result<Vec<PathBuf>, SweepError> {
    let mut written = Vec::new();
    for kind in RANKED_METRICS {
        // Empty rankings (empty networks) cannot enter an RBO comparison;
        // they are dropped from the matrix rather than failing the report.
        let mut lists: Vec<(String, RankedList)> = Vec::new();
        for entry in entries {
            let path = config_dir(artifacts, &entry.config_id).join(format!("ranked_{kind}.csv"));
            if !path.exists() {
                return Err(SweepError::MissingArtifact(path.display().to_string()));
            }
            let ranked = RankedList::read_csv(&path)?;
            if !ranked.is_empty() {
                lists.push((entry.config_id.clone(), ranked));
            }
        }
        if lists.len() < 2 {
            continue;
        }
        for &p in &opts.ps {
            let params = RboParams {
                p,
                variant: opts.variant,
            };
            let matrix = rbo_matrix(&lists, &params)?;
            let path = reports_dir.join(format!("rbo_{kind}_p{p}.csv"));
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["config_id".to_string()];
            header.extend(matrix.labels.iter().cloned());
            w.write_record(&header).map_err(csv_error(&path))?;
            for (label, row) in matrix.labels.iter().zip(&matrix.values) {
                let mut record = vec![label.clone()];
                record.extend(row.iter().map(|v| format!("{v}")));
                w.write_record(&record).map_err(csv_error(&path))?;
            }
            write_file(&path, &w.into_inner().expect("vec writer"))?;
            written.push(path);
        }
    }
    Ok(written)
}

fn write_communities_report(
    artifacts: &Path,
    entries: &[&ConfigEntry],
    reports_dir: &Path,
    opts: &ReportOptions,
    manifest_seed: u64,
) -> Result<Vec<PathBuf>, SweepError> {
    let seed = opts.seed_override.unwrap_or(manifest_seed);
    let rows: Result<Vec<CommunityRow>, SweepError> = entries
        .par_iter()
        .map(|entry| {
            let dir = config_dir(artifacts, &entry.config_id);
            let network = KeywordNetwork::read_csv(&dir, entry.config.network_mode)?;
            let partition = louvain(&network, seed, 1.0);
            let report = community_report(&network, &partition, opts.coverage, opts.top_k);
            let num_communities = partition
                .assignment
                .values()
                .collect::<std::collections::BTreeSet<_>>()
                .len();
            Ok(CommunityRow {
                config_id: entry.config_id.clone(),
                seed,
                modularity: partition.modularity,
                num_communities,
                report,
            })
        })
        .collect();
    let path = reports_dir.join("communities.json");
    write_file(&path, pretty_json(&rows?).as_bytes())?;
    Ok(vec![path])
}

fn write_cdf_reports(
    artifacts: &Path,
    entries: &[&ConfigEntry],
    reports_dir: &Path,
) -> Result<Vec<PathBuf>, SweepError> {
    let cdf_dir = reports_dir.join("cdf");
    create_dir(&cdf_dir)?;
    let mut written = Vec::new();
    for entry in entries {
        for kind in RANKED_METRICS {
            let ranked_path =
                config_dir(artifacts, &entry.config_id).join(format!("ranked_{kind}.csv"));
            if !ranked_path.exists() {
                return Err(SweepError::MissingArtifact(
                    ranked_path.display().to_string(),
                ));
            }
            let ranked = RankedList::read_csv(&ranked_path)?;
            let vector = NodeMetricVector {
                kind,
                values: ranked.entries.iter().cloned().collect(),
            };
            let steps = cdf(&vector);
            let path = cdf_dir.join(format!("{}_{kind}.csv", entry.config_id));
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["value", "cumulative_probability"])
                .map_err(csv_error(&path))?;
            for (value, prob) in steps {
                w.write_record([format!("{value}"), format!("{prob}")])
                    .map_err(csv_error(&path))?;
            }
            write_file(&path, &w.into_inner().expect("vec writer"))?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Builds one comparison report over a finished artifact tree, returning the
/// files written under `<artifacts>/reports/`. An RBO report with fewer than
/// two non-empty rankings writes nothing (callers may notice and say so).
pub fn report(
    artifacts: &Path,
    kind: ReportKind,
    opts: &ReportOptions,
) -> Result<Vec<PathBuf>, SweepError> {
    let manifest = Manifest::from_path(&artifacts.join("manifest.json"))?;
    let entries = selected_entries(&manifest, opts)?;
    let reports_dir = artifacts.join("reports");
    create_dir(&reports_dir)?;
    match kind {
        ReportKind::Properties => write_properties_report(artifacts, &entries, &reports_dir),
        ReportKind::Rbo => write_rbo_reports(artifacts, &entries, &reports_dir, opts),
        ReportKind::Communities => {
            write_communities_report(artifacts, &entries, &reports_dir, opts, manifest.seed)
        }
        ReportKind::Cdf => write_cdf_reports(artifacts, &entries, &reports_dir),
    }
}
