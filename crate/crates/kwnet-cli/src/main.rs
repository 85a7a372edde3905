//! `kwnet`: keyword-network pipeline CLI.
//!
//! Subcommands mirror the pipeline stages — load, extract, sentiment,
//! build-cooc/build-author, metrics, communities, rbo — plus the sweep
//! orchestrator, its report generator, and a synthetic-corpus utility.
//! Stage commands compose through files: `extract` writes the JSONL that
//! `build-*` consume, `metrics` writes the ranked lists that `rbo` compares.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Parser, Subcommand};
use serde::Serialize;

use kwnet::analytics::{
    cdf, metric, properties, summarize, MetricKind, MetricSummary, NetworkProperties,
};
use kwnet::corpus::load_corpus;
use kwnet::extract::{extract_document, ExtractedDoc, LengthSetting, Stopwords};
use kwnet::louvain::{community_report, louvain, CommunityReport};
use kwnet::network::{
    build_author_network, build_cooccurrence, prune_min_doc_freq, prune_single_occurrence,
    ArtifactRules, KeywordNetwork, NetworkMode,
};
use kwnet::rank::{rank_nodes, rbo_matrix, RankedList, RboParams, RboVariant};
use kwnet::sentiment::{classify, score_text, Lexicon};
use kwnet::sweep::{
    report as sweep_report, run as sweep_run, Profile, ReportKind, ReportOptions, RunOptions,
    RunStatus, SweepConfig,
};
use kwnet::synth::{synth_corpus, SynthOptions};

#[derive(Parser)]
#[command(
    name = "kwnet",
    version,
    about = "Keyword co-occurrence and author networks from document corpora",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a JSON Lines corpus and print its size
    Load {
        #[arg(long)]
        corpus: PathBuf,
        /// Fail on the first malformed line instead of skipping it
        #[arg(long)]
        strict: bool,
    },
    /// Extract keywords per document under one length setting
    Extract {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        stopwords: PathBuf,
        #[arg(long)]
        min_len: usize,
        #[arg(long)]
        max_len: usize,
        /// Output JSONL, one extracted document per line
        #[arg(long)]
        out: PathBuf,
    },
    /// Score and classify sentiment per document
    Sentiment {
        #[arg(long)]
        corpus: PathBuf,
        /// TSV lexicon: token<TAB>valence
        #[arg(long)]
        lexicon: PathBuf,
        /// Output CSV: id,compound,label
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a keyword co-occurrence network from extracted documents
    BuildCooc {
        /// JSONL produced by `kwnet extract`
        #[arg(long)]
        extracted: PathBuf,
        /// Noise rules file (exact lines and `contains:` lines)
        #[arg(long)]
        artifacts: Option<PathBuf>,
        /// Drop single-occurrence keywords at or below this relevance
        #[arg(long, default_value_t = 0.0)]
        threshold: f64,
        /// Drop keywords appearing in fewer documents than this
        #[arg(long, default_value_t = 1)]
        min_doc_freq: u64,
        #[arg(long, default_value_t = true, action = ArgAction::Set)]
        strip_noise: bool,
        /// Output directory for nodes.csv and edges.csv
        #[arg(long)]
        out: PathBuf,
    },
    /// Build an author similarity network from extracted documents
    BuildAuthor {
        /// JSONL produced by `kwnet extract`
        #[arg(long)]
        extracted: PathBuf,
        #[arg(long)]
        artifacts: Option<PathBuf>,
        #[arg(long, default_value_t = true, action = ArgAction::Set)]
        strip_noise: bool,
        /// Output directory for nodes.csv and edges.csv
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute properties, metric summaries, rankings, and CDFs
    Metrics {
        /// Directory holding nodes.csv and edges.csv
        #[arg(long)]
        network: PathBuf,
        #[arg(long, default_value = "cooccurrence")]
        mode: String,
        /// Output directory (metrics.json, ranked_*.csv, cdf_*.csv)
        #[arg(long)]
        out: PathBuf,
    },
    /// Detect Louvain communities and report the largest ones
    Communities {
        /// Directory holding nodes.csv and edges.csv
        #[arg(long)]
        network: PathBuf,
        #[arg(long, default_value = "cooccurrence")]
        mode: String,
        /// Louvain shuffle seed (KWNET_SEED overrides)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cumulative node share the report must cover
        #[arg(long, default_value_t = 0.9)]
        coverage: f64,
        /// Strongest nodes listed per community
        #[arg(long, default_value_t = 5)]
        top_k: usize,
        /// Output JSON path (default: <network>/communities.json)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pairwise rank-biased overlap between ranked lists
    Rbo {
        /// Two or more ranked CSV files (label,value); labels come from
        /// file stems
        #[arg(long, num_args = 2.., required = true)]
        inputs: Vec<PathBuf>,
        /// Persistence values, one matrix per p
        #[arg(long = "p", default_values_t = vec![0.9, 0.99])]
        p: Vec<f64>,
        #[arg(long, default_value = "extrapolated")]
        variant: String,
        /// Output directory for rbo_matrix_p<p>.csv
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a full preprocessing-decision grid
    Sweep {
        /// Sweep file (JSON); exclusive with --profile
        #[arg(long, conflicts_with = "profile")]
        config: Option<PathBuf>,
        /// Canned grid: twitter (72 cells), scopus (6), author (12)
        #[arg(long)]
        profile: Option<String>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        stopwords: Option<PathBuf>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        artifacts: Option<PathBuf>,
        /// Artifact tree root (overrides the sweep file's out_dir)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads
        #[arg(long)]
        jobs: Option<usize>,
        /// Overrides the sweep file's seed (KWNET_SEED also does)
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Build comparison reports over a finished sweep tree
    Report {
        #[arg(long)]
        artifacts: PathBuf,
        /// properties | rbo | communities | cdf
        #[arg(long)]
        kind: String,
        #[arg(long = "p", default_values_t = vec![0.9, 0.99])]
        p: Vec<f64>,
        #[arg(long, default_value = "extrapolated")]
        variant: String,
        #[arg(long, default_value_t = 0.9)]
        coverage: f64,
        #[arg(long, default_value_t = 5)]
        top_k: usize,
        /// Restrict to these config ids (repeatable)
        #[arg(long = "config")]
        configs: Vec<String>,
        /// Overrides the manifest seed for Louvain (KWNET_SEED also does)
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Generate a seeded synthetic corpus
    GenCorpus {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 500)]
        docs: usize,
        #[arg(long, default_value_t = 30)]
        authors: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Load { corpus, strict } => cmd_load(&corpus, strict),
        Command::Extract {
            corpus,
            stopwords,
            min_len,
            max_len,
            out,
        } => cmd_extract(&corpus, &stopwords, min_len, max_len, &out),
        Command::Sentiment {
            corpus,
            lexicon,
            out,
        } => cmd_sentiment(&corpus, &lexicon, &out),
        Command::BuildCooc {
            extracted,
            artifacts,
            threshold,
            min_doc_freq,
            strip_noise,
            out,
        } => cmd_build_cooc(
            &extracted,
            artifacts.as_deref(),
            threshold,
            min_doc_freq,
            strip_noise,
            &out,
        ),
        Command::BuildAuthor {
            extracted,
            artifacts,
            strip_noise,
            out,
        } => cmd_build_author(&extracted, artifacts.as_deref(), strip_noise, &out),
        Command::Metrics { network, mode, out } => cmd_metrics(&network, &mode, &out),
        Command::Communities {
            network,
            mode,
            seed,
            coverage,
            top_k,
            out,
        } => cmd_communities(&network, &mode, seed, coverage, top_k, out.as_deref()),
        Command::Rbo {
            inputs,
            p,
            variant,
            out,
        } => cmd_rbo(&inputs, &p, &variant, &out),
        Command::Sweep {
            config,
            profile,
            corpus,
            stopwords,
            lexicon,
            artifacts,
            out,
            jobs,
            seed,
        } => cmd_sweep(
            config, profile, corpus, stopwords, lexicon, artifacts, out, jobs, seed,
        ),
        Command::Report {
            artifacts,
            kind,
            p,
            variant,
            coverage,
            top_k,
            configs,
            seed,
        } => cmd_report(
            &artifacts, &kind, p, &variant, coverage, top_k, configs, seed,
        ),
        Command::GenCorpus {
            out,
            docs,
            authors,
            seed,
        } => cmd_gen_corpus(&out, docs, authors, seed),
    }
}

/// KWNET_SEED overrides any seed recorded in sweep files or manifests;
/// explicit --seed flags take precedence over the environment.
fn env_seed() -> Result<Option<u64>> {
    match std::env::var("KWNET_SEED") {
        Ok(raw) => {
            let seed = raw
                .trim()
                .parse()
                .with_context(|| format!("KWNET_SEED must be an unsigned integer, got `{raw}`"))?;
            Ok(Some(seed))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(err) => bail!("cannot read KWNET_SEED: {err}"),
    }
}

fn parse_mode(mode: &str) -> Result<NetworkMode> {
    mode.parse::<NetworkMode>()
        .map_err(|e| anyhow::anyhow!("{e}"))
}

fn load_rules(path: Option<&Path>) -> Result<ArtifactRules> {
    match path {
        Some(path) => Ok(ArtifactRules::from_path(path)?),
        None => Ok(ArtifactRules::empty()),
    }
}

fn read_extracted(path: &Path) -> Result<Vec<ExtractedDoc>> {
    let content = fs::read_to_string(path)
        .with_context(|| format!("cannot read extracted docs from {}", path.display()))?;
    let mut docs = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let doc: ExtractedDoc = serde_json::from_str(line)
            .with_context(|| format!("{}:{}: bad extracted document", path.display(), idx + 1))?;
        docs.push(doc);
    }
    Ok(docs)
}

fn cmd_load(corpus: &Path, strict: bool) -> Result<()> {
    let loaded = load_corpus(corpus, strict)?;
    println!(
        "{}: {} documents, {} authors, {} malformed lines skipped",
        corpus.display(),
        loaded.corpus.len(),
        loaded.corpus.authors().len(),
        loaded.skipped
    );
    Ok(())
}

fn cmd_extract(
    corpus: &Path,
    stopwords: &Path,
    min_len: usize,
    max_len: usize,
    out: &Path,
) -> Result<()> {
    let setting = LengthSetting::new(min_len, max_len)?;
    let stopwords = Stopwords::from_path(stopwords)?;
    let loaded = load_corpus(corpus, false)?;
    let mut body = String::new();
    let mut keywords = 0usize;
    for doc in &loaded.corpus.documents {
        let extracted = extract_document(doc, &stopwords, setting);
        keywords += extracted.keywords.len();
        body.push_str(&serde_json::to_string(&extracted)?);
        body.push('\n');
    }
    fs::write(out, body).with_context(|| format!("cannot write {}", out.display()))?;
    println!(
        "extracted {} keywords from {} documents under {} -> {}",
        keywords,
        loaded.corpus.len(),
        setting,
        out.display()
    );
    Ok(())
}

fn cmd_sentiment(corpus: &Path, lexicon: &Path, out: &Path) -> Result<()> {
    let lexicon = Lexicon::from_path(lexicon)?;
    let loaded = load_corpus(corpus, false)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "compound", "label"])?;
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for doc in &loaded.corpus.documents {
        let scores = score_text(&doc.text, &lexicon);
        let label = classify(&scores);
        *counts.entry(label.to_string()).or_insert(0) += 1;
        w.write_record([
            doc.id.as_str(),
            &format!("{}", scores.compound),
            &label.to_string(),
        ])?;
    }
    fs::write(out, w.into_inner()?).with_context(|| format!("cannot write {}", out.display()))?;
    let summary: Vec<String> = counts.iter().map(|(l, n)| format!("{n} {l}")).collect();
    println!(
        "scored {} documents ({}) -> {}",
        loaded.corpus.len(),
        summary.join(", "),
        out.display()
    );
    Ok(())
}

fn describe_network(net: &KeywordNetwork) -> String {
    format!(
        "{} nodes, {} edges, total weight {}",
        net.num_nodes(),
        net.num_edges(),
        net.total_edge_weight()
    )
}

fn cmd_build_cooc(
    extracted: &Path,
    artifacts: Option<&Path>,
    threshold: f64,
    min_doc_freq: u64,
    strip_noise: bool,
    out: &Path,
) -> Result<()> {
    let docs = read_extracted(extracted)?;
    let rules = if strip_noise {
        load_rules(artifacts)?
    } else {
        ArtifactRules::empty()
    };
    let base = build_cooccurrence(&docs, &rules);
    let thresholded = prune_single_occurrence(&base, threshold);
    let net = prune_min_doc_freq(&thresholded, min_doc_freq);
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    net.write_csv(out)?;
    println!("{} -> {}", describe_network(&net), out.display());
    Ok(())
}

fn cmd_build_author(
    extracted: &Path,
    artifacts: Option<&Path>,
    strip_noise: bool,
    out: &Path,
) -> Result<()> {
    let docs = read_extracted(extracted)?;
    let rules = load_rules(artifacts)?;
    let build = build_author_network(&docs, strip_noise, &rules);
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    build.network.write_csv(out)?;
    println!(
        "{} ({} documents without author skipped) -> {}",
        describe_network(&build.network),
        build.skipped_docs,
        out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct MetricsOut {
    properties: NetworkProperties,
    summaries: BTreeMap<String, MetricSummary>,
}

fn cmd_metrics(network: &Path, mode: &str, out: &Path) -> Result<()> {
    let mode = parse_mode(mode)?;
    let net = KeywordNetwork::read_csv(network, mode)?;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;

    let mut summaries = BTreeMap::new();
    for kind in [
        MetricKind::DegreeCentrality,
        MetricKind::NodeStrength,
        MetricKind::Count,
    ] {
        let values = metric(&net, kind);
        if !values.values.is_empty() {
            summaries.insert(kind.to_string(), summarize(&values));
        }
        rank_nodes(&values).write_csv(&out.join(format!("ranked_{kind}.csv")))?;

        let path = out.join(format!("cdf_{kind}.csv"));
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["value", "cumulative_probability"])?;
        for (value, prob) in cdf(&values) {
            w.write_record([format!("{value}"), format!("{prob}")])?;
        }
        fs::write(&path, w.into_inner()?)
            .with_context(|| format!("cannot write {}", path.display()))?;
    }

    let metrics = MetricsOut {
        properties: properties(&net),
        summaries,
    };
    let mut json = serde_json::to_string_pretty(&metrics)?;
    json.push('\n');
    fs::write(out.join("metrics.json"), json)?;
    println!("{} -> {}", describe_network(&net), out.display());
    Ok(())
}

#[derive(Serialize)]
struct CommunitiesOut {
    seed: u64,
    modularity: f64,
    num_communities: usize,
    report: CommunityReport,
}

fn cmd_communities(
    network: &Path,
    mode: &str,
    seed: u64,
    coverage: f64,
    top_k: usize,
    out: Option<&Path>,
) -> Result<()> {
    let mode = parse_mode(mode)?;
    let seed = env_seed()?.unwrap_or(seed);
    let net = KeywordNetwork::read_csv(network, mode)?;
    let partition = louvain(&net, seed, 1.0);
    let report = community_report(&net, &partition, coverage, top_k);
    let num_communities = partition
        .assignment
        .values()
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    let output = CommunitiesOut {
        seed,
        modularity: partition.modularity,
        num_communities,
        report,
    };
    let default_out = network.join("communities.json");
    let path = out.unwrap_or(&default_out);
    let mut json = serde_json::to_string_pretty(&output)?;
    json.push('\n');
    fs::write(path, json).with_context(|| format!("cannot write {}", path.display()))?;
    println!(
        "{} communities, modularity {} (seed {}) -> {}",
        num_communities,
        output.modularity,
        seed,
        path.display()
    );
    Ok(())
}

fn parse_variant(variant: &str) -> Result<RboVariant> {
    match variant {
        "extrapolated" => Ok(RboVariant::Extrapolated),
        "min" => Ok(RboVariant::Min),
        other => bail!("unknown RBO variant `{other}` (expected extrapolated|min)"),
    }
}

fn cmd_rbo(inputs: &[PathBuf], ps: &[f64], variant: &str, out: &Path) -> Result<()> {
    let variant = parse_variant(variant)?;
    let mut lists = Vec::new();
    for path in inputs {
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let list = RankedList::read_csv(path)?;
        if list.is_empty() {
            bail!("{}: ranked list is empty", path.display());
        }
        lists.push((label, list));
    }
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    for &p in ps {
        let matrix = rbo_matrix(&lists, &RboParams { p, variant })?;
        let path = out.join(format!("rbo_matrix_p{p}.csv"));
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["list".to_string()];
        header.extend(matrix.labels.iter().cloned());
        w.write_record(&header)?;
        for (label, row) in matrix.labels.iter().zip(&matrix.values) {
            let mut record = vec![label.clone()];
            record.extend(row.iter().map(|v| format!("{v}")));
            w.write_record(&record)?;
        }
        fs::write(&path, w.into_inner()?)
            .with_context(|| format!("cannot write {}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    config: Option<PathBuf>,
    profile: Option<String>,
    corpus: Option<PathBuf>,
    stopwords: Option<PathBuf>,
    lexicon: Option<PathBuf>,
    artifacts: Option<PathBuf>,
    out: Option<PathBuf>,
    jobs: Option<usize>,
    seed: Option<u64>,
) -> Result<()> {
    let sweep = match (config, profile) {
        (Some(path), None) => SweepConfig::from_path(&path)?,
        (None, Some(profile)) => {
            let profile: Profile = profile.parse().map_err(|e| anyhow::anyhow!("{e}"))?;
            SweepConfig {
                corpus: corpus.context("--profile requires --corpus")?,
                stopwords: stopwords.context("--profile requires --stopwords")?,
                lexicon,
                artifacts,
                out_dir: None,
                seed: 0,
                axes: profile.axes(),
            }
        }
        (None, None) => bail!("pass --config <file> or --profile twitter|scopus|author"),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    let opts = RunOptions {
        out_dir: out,
        jobs,
        seed_override: seed.or(env_seed()?),
    };
    let manifest = sweep_run(&sweep, &opts)?;
    let failed: Vec<&str> = manifest
        .configs
        .iter()
        .filter(|e| e.status == RunStatus::Failed)
        .map(|e| e.config_id.as_str())
        .collect();
    println!(
        "ran {} configs on {} documents (seed {}), {} failed",
        manifest.configs.len(),
        manifest.corpus_docs,
        manifest.seed,
        failed.len()
    );
    for id in failed {
        eprintln!("failed: {id}");
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_report(
    artifacts: &Path,
    kind: &str,
    ps: Vec<f64>,
    variant: &str,
    coverage: f64,
    top_k: usize,
    configs: Vec<String>,
    seed: Option<u64>,
) -> Result<()> {
    let kind: ReportKind = kind.parse().map_err(|e| anyhow::anyhow!("{e}"))?;
    let opts = ReportOptions {
        ps,
        variant: parse_variant(variant)?,
        coverage,
        top_k,
        configs: if configs.is_empty() {
            None
        } else {
            Some(configs)
        },
        seed_override: seed.or(env_seed()?),
    };
    let written = sweep_report(artifacts, kind, &opts)?;
    if written.is_empty() {
        println!("{kind} report skipped: fewer than two non-empty rankings to compare");
    }
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_gen_corpus(out: &Path, docs: usize, authors: usize, seed: u64) -> Result<()> {
    let label = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "synthetic".to_string());
    let corpus = synth_corpus(&SynthOptions {
        num_docs: docs,
        num_authors: authors,
        seed,
        source_label: label,
    });
    corpus.write_jsonl(out)?;
    println!(
        "wrote {} documents ({} authors, seed {}) -> {}",
        corpus.len(),
        corpus.authors().len(),
        seed,
        out.display()
    );
    Ok(())
}
