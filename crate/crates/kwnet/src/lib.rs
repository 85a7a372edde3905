//! Keyword-network toolkit: extraction, sentiment partitioning, network
//! construction, and sensitivity analysis across preprocessing decisions.
//!
//! The pipeline goes from raw document corpora (JSON Lines) to weighted
//! undirected networks and their analytics:
//!
//! 1. [`corpus`] — load and partition document corpora.
//! 2. [`extract`] — per-document RAKE keyword extraction under a length
//!    setting, with local relevance scores.
//! 3. [`sentiment`] — lexicon-based compound scoring and classification.
//! 4. [`network`] — word co-occurrence and author (Jaccard) networks with
//!    subsumption removal, artifact stripping, and pruning rules.
//! 5. [`analytics`] / [`louvain`] — global properties, centrality and
//!    strength distributions, weighted Louvain communities.
//! 6. [`rank`] — node rankings and rank-biased overlap between them.
//! 7. [`sweep`] — the orchestrator that runs the whole pipeline over a
//!    cross-product of preprocessing decisions and emits comparison reports.
//!
//! [`synth`] generates the seeded synthetic corpora used by fixtures and
//! benchmarks. Everything is deterministic: equal inputs, configuration,
//! and seed produce byte-identical output trees.

pub mod analytics;
pub mod corpus;
pub mod extract;
pub mod louvain;
pub mod network;
pub mod rank;
pub mod sentiment;
pub mod sweep;
pub mod synth;
pub(crate) mod text;

#[cfg(test)]
pub(crate) mod testutil;

pub use analytics::{
    cdf, degree_centrality, metric, node_strength, properties, summarize, MetricKind,
    MetricSummary, NetworkProperties, NodeMetricVector,
};
pub use corpus::{load_corpus, partition_by_sentiment, Corpus, Document, SentimentPartition};
pub use extract::{extract_document, ExtractedDoc, ExtractedKeyword, LengthSetting, Stopwords};
pub use louvain::{community_report, louvain, modularity, CommunityReport, Partition};
pub use network::{
    build_author_network, build_cooccurrence, prune_min_doc_freq, prune_single_occurrence,
    remove_subsumed, strip_artifacts, ArtifactRules, KeywordNetwork, NetworkMode, NodeInfo,
};
pub use rank::{prefix_weight, rank_nodes, rbo, rbo_matrix, RankedList, RboParams, RboVariant};
pub use sentiment::{classify, label_text, score_text, Lexicon, SentimentLabel, SentimentScores};
pub use sweep::{
    expand, report, run, Axes, Manifest, PipelineConfig, Profile, ReportKind, ReportOptions,
    RunOptions, SentimentSubset, SweepConfig,
};
pub use synth::{synth_corpus, SynthOptions};
