//! Seeded synthetic corpora.
//!
//! Generates climate-discourse style short documents with enough structure
//! to exercise the whole pipeline: multi-word topic phrases that survive
//! stopword segmentation, sentiment-bearing words drawn from the demo
//! lexicon, platform artifacts (rt/amp/short URLs) in roughly half the
//! documents, a Zipf-ish author distribution with occasional missing
//! authors, and a sprinkle of empty texts. Output depends only on
//! `SynthOptions`, so fixtures and benchmarks are reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document};

/// Multi-word phrases are written as space-joined token runs; the generator
/// keeps each run contiguous so phrase extraction can recover it.
const TOPICS: &[&str] = &[
    "climate change",
    "global warming",
    "carbon emissions",
    "renewable energy",
    "sea level rise",
    "extreme weather",
    "fossil fuels",
    "clean energy",
    "paris agreement",
    "carbon tax",
    "energy policy",
    "green new deal",
    "solar power",
    "wind farms",
    "electric vehicles",
    "net zero",
    "heat waves",
    "polar ice",
    "make america great",
    "america",
    "scientists",
    "hoax",
    "economy",
    "drought",
    "wildfires",
    "flooding",
    "public health",
    "air quality",
    "government regulation",
    "weather",
];

const POSITIVE_WORDS: &[&str] = &[
    "good", "great", "love", "hope", "happy", "win", "clean", "support", "best", "agree",
];

const NEGATIVE_WORDS: &[&str] = &[
    "bad", "terrible", "hate", "fear", "crisis", "disaster", "worst", "lie", "fail", "wrong",
];

const GLUE: &[&str] = &[
    "the", "of", "and", "to", "in", "a", "is", "on", "for", "we", "our", "this", "that", "with",
    "are", "it", "be", "as", "not", "they", "but", "about", "if", "was", "from", "don't", "it's",
];

const FILLERS: &[&str] = &["2030", "100", "1", "5"];

const URLS: &[&str] = &[
    "https://t.co/ab3xy9",
    "https://t.co/q8k2mm",
    "https://t.co/zz71pe",
    "http://example.com/report",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthOptions {
    pub num_docs: usize,
    pub num_authors: usize,
    pub seed: u64,
    pub source_label: String,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            num_docs: 500,
            num_authors: 30,
            seed: 0,
            source_label: "synthetic".to_string(),
        }
    }
}

/// Zipf-weighted index into `0..n`: weight of rank i is 1/(i+1).
fn zipf_index(rng: &mut ChaCha8Rng, n: usize, total: f64) -> usize {
    let mut x = rng.random_range(0.0..total);
    for i in 0..n {
        let w = 1.0 / (i + 1) as f64;
        if x < w {
            return i;
        }
        x -= w;
    }
    n - 1
}

fn uniform<'a>(rng: &mut ChaCha8Rng, pool: &[&'a str]) -> &'a str {
    pool[rng.random_range(0..pool.len())]
}

fn push_glue(rng: &mut ChaCha8Rng, words: &mut Vec<String>, count: usize) {
    for _ in 0..count {
        words.push(uniform(rng, GLUE).to_string());
    }
}

pub fn synth_corpus(opts: &SynthOptions) -> Corpus {
    assert!(opts.num_authors > 0, "need at least one author");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let topic_total: f64 = (1..=TOPICS.len()).map(|i| 1.0 / i as f64).sum();
    let author_total: f64 = (1..=opts.num_authors).map(|i| 1.0 / i as f64).sum();

    let mut documents = Vec::with_capacity(opts.num_docs);
    for i in 0..opts.num_docs {
        let id = format!("t{i:05}");
        let author_id = if rng.random_range(0.0..1.0) < 0.03 {
            None
        } else {
            Some(format!(
                "u{:02}",
                zipf_index(&mut rng, opts.num_authors, author_total)
            ))
        };

        if rng.random_range(0.0..1.0) < 0.01 {
            documents.push(Document {
                id,
                author_id,
                text: String::new(),
            });
            continue;
        }

        let target = rng.random_range(8..=18usize);
        let mut words: Vec<String> = Vec::with_capacity(target + 6);
        if rng.random_range(0.0..1.0) < 0.25 {
            words.push("rt".to_string());
        }
        let lead = rng.random_range(1..=2);
        push_glue(&mut rng, &mut words, lead);
        while words.len() < target {
            let roll = rng.random_range(0.0..1.0);
            if roll < 0.55 {
                let topic = TOPICS[zipf_index(&mut rng, TOPICS.len(), topic_total)];
                words.extend(topic.split_whitespace().map(str::to_string));
                // Sentence punctuation attaches to the last word; the
                // tokenizer later strips it back out.
                if rng.random_range(0.0..1.0) < 0.3 {
                    let tail = words.last_mut().expect("topic pushed words");
                    tail.push(if rng.random_range(0.0..1.0) < 0.5 {
                        ','
                    } else {
                        '.'
                    });
                }
            } else if roll < 0.70 {
                let pool = if rng.random_range(0.0..1.0) < 0.5 {
                    POSITIVE_WORDS
                } else {
                    NEGATIVE_WORDS
                };
                words.push(uniform(&mut rng, pool).to_string());
            } else if roll < 0.78 {
                words.push(uniform(&mut rng, FILLERS).to_string());
            } else if roll < 0.84 {
                words.push("amp".to_string());
            } else {
                push_glue(&mut rng, &mut words, 1);
            }
        }
        if rng.random_range(0.0..1.0) < 0.25 {
            words.push(uniform(&mut rng, URLS).to_string());
        }
        let mut text = words.join(" ");
        if rng.random_range(0.0..1.0) < 0.4 {
            text.push(if rng.random_range(0.0..1.0) < 0.7 {
                '.'
            } else {
                '!'
            });
        }
        documents.push(Document {
            id,
            author_id,
            text,
        });
    }

    Corpus {
        documents,
        source_label: opts.source_label.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_jsonl;

    #[test]
    fn generation_is_deterministic_in_the_seed() {
        let opts = SynthOptions {
            num_docs: 200,
            ..SynthOptions::default()
        };
        let a = synth_corpus(&opts);
        let b = synth_corpus(&opts);
        assert_eq!(a.to_jsonl(), b.to_jsonl());

        let other = synth_corpus(&SynthOptions {
            seed: 1,
            ..opts.clone()
        });
        assert_ne!(a.to_jsonl(), other.to_jsonl());
    }

    #[test]
    fn output_parses_strictly_and_ids_are_sequential() {
        let opts = SynthOptions {
            num_docs: 150,
            num_authors: 10,
            seed: 7,
            source_label: "s".to_string(),
        };
        let corpus = synth_corpus(&opts);
        assert_eq!(corpus.documents.len(), 150);
        for (i, doc) in corpus.documents.iter().enumerate() {
            assert_eq!(doc.id, format!("t{i:05}"));
            if let Some(a) = &doc.author_id {
                assert!(a.starts_with('u') && a.len() == 3, "author {a}");
            }
        }
        let loaded = parse_jsonl(&corpus.to_jsonl(), true, "s".to_string(), "mem").unwrap();
        assert_eq!(loaded.skipped, 0);
        assert_eq!(loaded.corpus, corpus);
    }

    #[test]
    fn corpus_has_expected_texture() {
        let corpus = synth_corpus(&SynthOptions {
            num_docs: 1000,
            ..SynthOptions::default()
        });
        let empties = corpus
            .documents
            .iter()
            .filter(|d| d.text.is_empty())
            .count();
        let missing_author = corpus
            .documents
            .iter()
            .filter(|d| d.author_id.is_none())
            .count();
        let with_rt = corpus
            .documents
            .iter()
            .filter(|d| d.text.starts_with("rt "))
            .count();
        let with_url = corpus
            .documents
            .iter()
            .filter(|d| d.text.contains("https://t.co/"))
            .count();
        let with_topic = corpus
            .documents
            .iter()
            .filter(|d| d.text.contains("climate change"))
            .count();
        assert!((1..=40).contains(&empties), "empties {empties}");
        assert!(
            (5..=80).contains(&missing_author),
            "missing {missing_author}"
        );
        assert!(with_rt > 100, "rt prefix {with_rt}");
        assert!(with_url > 100, "urls {with_url}");
        assert!(with_topic > 200, "climate change in {with_topic}");
        assert!(corpus.authors().len() <= 30);
        assert!(corpus.authors().len() >= 15);
    }
}
