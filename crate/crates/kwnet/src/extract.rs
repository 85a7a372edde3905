//! Per-document RAKE keyword extraction.
//!
//! Text is case-folded and split at phrase delimiters; each maximal
//! stopword-free token run becomes a candidate phrase. Candidates outside
//! the length setting are discarded (not re-split). Word statistics
//! (`deg`, `freq`) are computed over the retained candidates of a single
//! document, and a candidate's relevance is the sum of its word scores
//! `deg(w)/freq(w)`. Scores are document-local by design: the same keyword
//! can carry different relevances in different documents.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::corpus::Document;
use crate::sentiment::SentimentLabel;
use crate::text;

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("invalid length setting {min}-{max}: need 1 <= min <= max")]
    InvalidLengthSetting { min: usize, max: usize },
    #[error("cannot parse length setting `{0}`: expected `<min>-<max>`")]
    BadLengthSyntax(String),
    #[error("failed to read stopwords {path}: {source}")]
    StopwordsIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Keyword length bounds in tokens: the `a-b` of the six grid settings
/// (1-1, 1-2, 1-3, 2-2, 2-3, 3-3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LengthSetting {
    min_len: usize,
    max_len: usize,
}

impl LengthSetting {
    pub fn new(min_len: usize, max_len: usize) -> Result<Self, ExtractError> {
        if min_len < 1 || min_len > max_len {
            return Err(ExtractError::InvalidLengthSetting {
                min: min_len,
                max: max_len,
            });
        }
        Ok(LengthSetting { min_len, max_len })
    }

    pub fn min_len(&self) -> usize {
        self.min_len
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// The six settings used throughout the experiment grid.
    pub fn default_grid() -> [LengthSetting; 6] {
        [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)].map(|(a, b)| LengthSetting {
            min_len: a,
            max_len: b,
        })
    }
}

impl fmt::Display for LengthSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.min_len, self.max_len)
    }
}

impl FromStr for LengthSetting {
    type Err = ExtractError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once('-')
            .ok_or_else(|| ExtractError::BadLengthSyntax(s.to_string()))?;
        let min = a
            .trim()
            .parse()
            .map_err(|_| ExtractError::BadLengthSyntax(s.to_string()))?;
        let max = b
            .trim()
            .parse()
            .map_err(|_| ExtractError::BadLengthSyntax(s.to_string()))?;
        LengthSetting::new(min, max)
    }
}

impl Serialize for LengthSetting {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LengthSetting {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Case-folded stopword set; file format is one token per line with `#`
/// comments.
#[derive(Debug, Clone, Default)]
pub struct Stopwords {
    words: HashSet<String>,
}

impl Stopwords {
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Stopwords {
            words: words
                .into_iter()
                .map(|w| w.as_ref().to_lowercase())
                .collect(),
        }
    }

    pub fn from_path(path: &Path) -> Result<Self, ExtractError> {
        let raw = fs::read_to_string(path).map_err(|source| ExtractError::StopwordsIo {
            path: path.display().to_string(),
            source,
        })?;
        Ok(Self::from_words(raw.lines().filter_map(|line| {
            let t = line.trim();
            (!t.is_empty() && !t.starts_with('#')).then_some(t)
        })))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// A maximal stopword-free token run that survived the length filter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidatePhrase {
    pub tokens: Vec<String>,
}

impl CandidatePhrase {
    /// Canonical keyword text: tokens joined by single spaces.
    pub fn keyword_text(&self) -> String {
        self.tokens.join(" ")
    }
}

/// A scored keyword; repeat occurrences within the document are merged into
/// `occurrences` (identical candidates score identically by construction).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractedKeyword {
    pub keyword_text: String,
    pub length: usize,
    pub relevance: f64,
    pub occurrences: usize,
}

/// The processed counterpart of a `Document`: keywords with document-local
/// relevance scores. `sentiment` stays `None` until a labelling pass fills
/// it (bibliometric corpora never do).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractedDoc {
    pub id: String,
    #[serde(default)]
    pub author_id: Option<String>,
    pub keywords: Vec<ExtractedKeyword>,
    #[serde(default)]
    pub sentiment: Option<SentimentLabel>,
}

/// Zero-copy segmentation over the already-lowercased text.
fn segment_ref<'a>(
    lowered: &'a str,
    stopwords: &Stopwords,
    setting: LengthSetting,
) -> Vec<Vec<&'a str>> {
    let mut candidates = Vec::new();
    let mut run: Vec<&str> = Vec::new();
    let flush = |run: &mut Vec<&'a str>, out: &mut Vec<Vec<&'a str>>| {
        if run.len() >= setting.min_len && run.len() <= setting.max_len {
            out.push(run.clone());
        }
        run.clear();
    };
    for fragment in text::fragments(lowered) {
        for token in fragment.split_whitespace() {
            if stopwords.contains(token) {
                flush(&mut run, &mut candidates);
            } else {
                run.push(token);
            }
        }
        flush(&mut run, &mut candidates);
    }
    candidates
}

/// Scores candidates from one document: `freq(w)` counts candidate
/// occurrences containing `w` (with multiplicity), `deg(w)` sums their
/// lengths, and relevance is the per-word `deg/freq` sum. Duplicate
/// candidates merge into one keyword with an occurrence count, keeping
/// first-appearance order.
fn score_refs(candidates: &[Vec<&str>]) -> Vec<ExtractedKeyword> {
    let mut stats: HashMap<&str, (u64, u64)> = HashMap::new();
    for cand in candidates {
        let len = cand.len() as u64;
        for &word in cand {
            let entry = stats.entry(word).or_insert((0, 0));
            entry.0 += 1;
            entry.1 += len;
        }
    }
    let mut merged: Vec<ExtractedKeyword> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for cand in candidates {
        let keyword_text = cand.join(" ");
        if let Some(&i) = index.get(&keyword_text) {
            merged[i].occurrences += 1;
            continue;
        }
        let relevance = cand
            .iter()
            .map(|w| {
                let (freq, deg) = stats[w];
                deg as f64 / freq as f64
            })
            .sum();
        index.insert(keyword_text.clone(), merged.len());
        merged.push(ExtractedKeyword {
            keyword_text,
            length: cand.len(),
            relevance,
            occurrences: 1,
        });
    }
    merged
}

/// Splits case-folded text at phrase delimiters and stopwords; maximal
/// stopword-free runs become candidates, and runs outside
/// `[min_len, max_len]` are discarded whole.
pub fn segment_candidates(
    text: &str,
    stopwords: &Stopwords,
    setting: LengthSetting,
) -> Vec<CandidatePhrase> {
    let lowered = text.to_lowercase();
    segment_ref(&lowered, stopwords, setting)
        .into_iter()
        .map(|tokens| CandidatePhrase {
            tokens: tokens.into_iter().map(str::to_string).collect(),
        })
        .collect()
}

/// Public wrapper over the scoring pass; `candidates` must come from a
/// single document and length setting.
pub fn score_candidates(candidates: &[CandidatePhrase]) -> Vec<ExtractedKeyword> {
    let refs: Vec<Vec<&str>> = candidates
        .iter()
        .map(|c| c.tokens.iter().map(String::as_str).collect())
        .collect();
    score_refs(&refs)
}

/// Segment-then-score composition for one document.
pub fn extract_document(
    doc: &Document,
    stopwords: &Stopwords,
    setting: LengthSetting,
) -> ExtractedDoc {
    let lowered = doc.text.to_lowercase();
    let candidates = segment_ref(&lowered, stopwords, setting);
    ExtractedDoc {
        id: doc.id.clone(),
        author_id: doc.author_id.clone(),
        keywords: score_refs(&candidates),
        sentiment: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setting(a: usize, b: usize) -> LengthSetting {
        LengthSetting::new(a, b).unwrap()
    }

    fn stops(words: &[&str]) -> Stopwords {
        Stopwords::from_words(words.iter().copied())
    }

    fn texts(cands: &[CandidatePhrase]) -> Vec<String> {
        cands.iter().map(|c| c.keyword_text()).collect()
    }

    const SAMPLE: &str = "analysis of keyword networks and keyword extraction";

    #[test]
    fn segments_at_stopwords() {
        let cands = segment_candidates(SAMPLE, &stops(&["of", "and"]), setting(1, 3));
        assert_eq!(
            texts(&cands),
            ["analysis", "keyword networks", "keyword extraction"]
        );
    }

    #[test]
    fn length_filter_discards_whole_candidates() {
        let cands = segment_candidates(SAMPLE, &stops(&["of", "and"]), setting(2, 2));
        assert_eq!(texts(&cands), ["keyword networks", "keyword extraction"]);
        // an oversized run is dropped, never re-split into windows
        let none = segment_candidates("one two three four", &stops(&[]), setting(1, 3));
        assert!(none.is_empty());
    }

    #[test]
    fn empty_text_has_no_candidates() {
        assert!(segment_candidates("", &stops(&["of"]), setting(1, 3)).is_empty());
    }

    #[test]
    fn deg_over_freq_scoring_on_the_sample() {
        let doc = Document {
            id: "d".into(),
            author_id: None,
            text: SAMPLE.into(),
        };
        let out = extract_document(&doc, &stops(&["of", "and"]), setting(1, 3));
        let scores: Vec<(&str, f64)> = out
            .keywords
            .iter()
            .map(|k| (k.keyword_text.as_str(), k.relevance))
            .collect();
        // freq(keyword)=2, deg(keyword)=4 -> word score 2; networks/extraction score 2
        assert_eq!(
            scores,
            [
                ("analysis", 1.0),
                ("keyword networks", 4.0),
                ("keyword extraction", 4.0)
            ]
        );
        assert_eq!(out.sentiment, None);
    }

    #[test]
    fn setting_3_3_yields_nothing_on_the_sample() {
        let doc = Document {
            id: "d".into(),
            author_id: None,
            text: SAMPLE.into(),
        };
        let out = extract_document(&doc, &stops(&["of", "and"]), setting(3, 3));
        assert!(out.keywords.is_empty());
    }

    #[test]
    fn lone_three_word_candidate_hits_the_maximum() {
        let cands = segment_candidates("alpha beta gamma", &stops(&[]), setting(3, 3));
        let scored = score_candidates(&cands);
        assert_eq!(scored.len(), 1);
        // deg=3, freq=1 for each word -> relevance 9.0, the documented maximum
        assert_eq!(scored[0].relevance, 9.0);
    }

    #[test]
    fn duplicates_merge_with_occurrence_count_in_first_seen_order() {
        let text = "keyword networks and keyword networks and analysis";
        let out = score_candidates(&segment_candidates(text, &stops(&["and"]), setting(1, 3)));
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].keyword_text, "keyword networks");
        assert_eq!(out[0].occurrences, 2);
        assert_eq!(out[1].keyword_text, "analysis");
        assert_eq!(out[1].occurrences, 1);
    }

    #[test]
    fn one_one_setting_scores_exactly_one() {
        let text = "good good great terrible, climate. climate climate";
        let out = score_candidates(&segment_candidates(text, &stops(&[]), setting(1, 1)));
        assert!(!out.is_empty());
        assert!(out.iter().all(|k| k.relevance == 1.0));
    }

    #[test]
    fn punctuation_splits_phrases() {
        let cands = segment_candidates(
            "climate change! (sea level rise) \"global warming\"",
            &stops(&[]),
            setting(1, 3),
        );
        assert_eq!(
            texts(&cands),
            ["climate change", "sea level rise", "global warming"]
        );
    }

    #[test]
    fn apostrophes_and_digits_stay_in_tokens() {
        let cands = segment_candidates("don't panic 5 degrees", &stops(&[]), setting(1, 4));
        assert_eq!(texts(&cands), ["don't panic 5 degrees"]);
    }

    #[test]
    fn case_folds_before_matching_stopwords() {
        let cands = segment_candidates(
            "The Climate AND weather",
            &stops(&["the", "and"]),
            setting(1, 3),
        );
        assert_eq!(texts(&cands), ["climate", "weather"]);
    }

    #[test]
    fn extract_document_equals_segment_then_score() {
        let doc = Document {
            id: "d".into(),
            author_id: Some("u".into()),
            text: "Make America Great Again; america, great again!".into(),
        };
        let sw = stops(&["again"]);
        for s in LengthSetting::default_grid() {
            let composed = score_candidates(&segment_candidates(&doc.text, &sw, s));
            assert_eq!(
                extract_document(&doc, &sw, s).keywords,
                composed,
                "setting {s}"
            );
        }
    }

    #[test]
    fn length_setting_parses_and_displays() {
        let s: LengthSetting = "2-3".parse().unwrap();
        assert_eq!((s.min_len(), s.max_len()), (2, 3));
        assert_eq!(s.to_string(), "2-3");
        assert!("3-2".parse::<LengthSetting>().is_err());
        assert!("0-1".parse::<LengthSetting>().is_err());
        assert!("x".parse::<LengthSetting>().is_err());
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, "\"2-3\"");
        assert_eq!(serde_json::from_str::<LengthSetting>(&json).unwrap(), s);
    }

    #[test]
    fn stopword_file_supports_comments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stops.txt");
        std::fs::write(&path, "# english\nThe\nof\n\nand\n").unwrap();
        let sw = Stopwords::from_path(&path).unwrap();
        assert!(sw.contains("the") && sw.contains("of") && sw.contains("and"));
        assert_eq!(sw.len(), 3);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        /// Token soup mixing content words, stopwords, and delimiters.
        fn arb_text() -> impl Strategy<Value = String> {
            let piece = prop_oneof![
                Just("alpha"),
                Just("beta"),
                Just("gamma"),
                Just("delta"),
                Just("the"),
                Just("of"),
                Just("and"),
                Just("."),
                Just(","),
                Just("!"),
                Just("("),
                Just(")"),
                Just("42"),
                Just("don't"),
            ];
            proptest::collection::vec(piece, 0..40).prop_map(|v| v.join(" "))
        }

        fn arb_setting() -> impl Strategy<Value = LengthSetting> {
            proptest::sample::select(LengthSetting::default_grid().to_vec())
        }

        proptest! {
            #[test]
            fn keyword_lengths_and_relevance_bounds(text in arb_text(), s in arb_setting()) {
                let sw = stops(&["the", "of", "and"]);
                for k in score_candidates(&segment_candidates(&text, &sw, s)) {
                    prop_assert!(k.length >= s.min_len() && k.length <= s.max_len());
                    let lo = k.length as f64;
                    let hi = (k.length * s.max_len()) as f64;
                    prop_assert!(k.relevance >= lo - 1e-9 && k.relevance <= hi + 1e-9);
                    prop_assert!(k.relevance >= 1.0 - 1e-9 && k.relevance <= 9.0 + 1e-9);
                    for token in k.keyword_text.split(' ') {
                        prop_assert!(!sw.contains(token));
                    }
                }
            }

            #[test]
            fn one_one_is_always_exactly_one(text in arb_text()) {
                let sw = stops(&["the", "of", "and"]);
                let out = score_candidates(&segment_candidates(&text, &sw, setting(1, 1)));
                prop_assert!(out.iter().all(|k| k.relevance == 1.0));
            }

            #[test]
            fn widening_never_drops_candidates(text in arb_text()) {
                let sw = stops(&["the", "of", "and"]);
                let narrow = segment_candidates(&text, &sw, setting(2, 2));
                let wide = segment_candidates(&text, &sw, setting(1, 3));
                // multiset containment
                let mut counts = std::collections::HashMap::new();
                for c in &wide {
                    *counts.entry(c.keyword_text()).or_insert(0i64) += 1;
                }
                for c in &narrow {
                    let e = counts.entry(c.keyword_text()).or_insert(0);
                    *e -= 1;
                    prop_assert!(*e >= 0);
                }
            }

            #[test]
            fn extraction_is_deterministic(text in arb_text(), s in arb_setting()) {
                let sw = stops(&["the", "of"]);
                let a = score_candidates(&segment_candidates(&text, &sw, s));
                let b = score_candidates(&segment_candidates(&text, &sw, s));
                prop_assert_eq!(a, b);
            }

            #[test]
            fn occurrences_sum_to_candidate_count(text in arb_text(), s in arb_setting()) {
                let sw = stops(&["the", "of", "and"]);
                let cands = segment_candidates(&text, &sw, s);
                let scored = score_candidates(&cands);
                prop_assert_eq!(scored.iter().map(|k| k.occurrences).sum::<usize>(), cands.len());
                // keyword texts are unique after merging
                let distinct: std::collections::HashSet<_> =
                    scored.iter().map(|k| &k.keyword_text).collect();
                prop_assert_eq!(distinct.len(), scored.len());
            }
        }
    }
}
