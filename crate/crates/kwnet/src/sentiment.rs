//! Lexicon-based sentiment scoring.
//!
//! A deliberately simple stand-in for heavier sentiment engines: tokens are
//! matched against a valence lexicon, the summed valence is squashed into
//! (-1, 1), and the compound score is classified with the standard +/-0.05
//! thresholds. Intensifiers, negation handling, and emoji rules are out of
//! scope; the lexicon file is the extension point.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text;

/// Normalization constant in `compound = s / sqrt(s^2 + ALPHA)`.
const ALPHA: f64 = 15.0;

/// Compound-score cutoffs: strictly above +0.05 is positive, strictly below
/// -0.05 is negative, everything between is neutral.
pub const POSITIVE_THRESHOLD: f64 = 0.05;
pub const NEGATIVE_THRESHOLD: f64 = -0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentLabel {
    Positive,
    Negative,
    Neutral,
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SentimentLabel::Positive => "positive",
            SentimentLabel::Negative => "negative",
            SentimentLabel::Neutral => "neutral",
        };
        f.write_str(s)
    }
}

/// Per-text sentiment scores.
///
/// `positive`, `negative`, and `neutral` are token-share proportions and sum
/// to 1; `compound` is the normalized signed valence sum in (-1, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentScores {
    pub positive: f64,
    pub negative: f64,
    pub neutral: f64,
    pub compound: f64,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("failed to read lexicon {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("lexicon {path} line {line}: expected `token<TAB>valence`")]
    Malformed { path: String, line: usize },
    #[error("lexicon {path} line {line}: valence `{value}` is not a finite number")]
    BadValence {
        path: String,
        line: usize,
        value: String,
    },
}

/// Token -> valence mapping. Tokens are stored case-folded.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    valences: HashMap<String, f64>,
}

impl Lexicon {
    pub fn new(entries: impl IntoIterator<Item = (String, f64)>) -> Self {
        let valences = entries
            .into_iter()
            .map(|(token, valence)| (token.to_lowercase(), valence))
            .collect();
        Lexicon { valences }
    }

    /// Loads a TSV lexicon: `token<TAB>valence` per line. Blank lines and
    /// `#` comment lines are skipped; columns past the second are ignored.
    pub fn from_path(path: &Path) -> Result<Self, LexiconError> {
        let display = path.display().to_string();
        let raw = fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: display.clone(),
            source,
        })?;
        let mut valences = HashMap::new();
        for (idx, line) in raw.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let token = fields.next().unwrap_or("").trim();
            let value = fields.next().map(str::trim);
            let (token, value) = match (token.is_empty(), value) {
                (false, Some(v)) if !v.is_empty() => (token, v),
                _ => {
                    return Err(LexiconError::Malformed {
                        path: display,
                        line: line_no,
                    })
                }
            };
            let valence: f64 = value.parse().map_err(|_| LexiconError::BadValence {
                path: display.clone(),
                line: line_no,
                value: value.to_string(),
            })?;
            if !valence.is_finite() {
                return Err(LexiconError::BadValence {
                    path: display,
                    line: line_no,
                    value: value.to_string(),
                });
            }
            valences.insert(token.to_lowercase(), valence);
        }
        Ok(Lexicon { valences })
    }

    pub fn valence(&self, token: &str) -> Option<f64> {
        self.valences.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.valences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valences.is_empty()
    }

    /// Lexicon with every valence negated.
    pub fn negated(&self) -> Self {
        Lexicon {
            valences: self
                .valences
                .iter()
                .map(|(token, v)| (token.clone(), -v))
                .collect(),
        }
    }
}

/// Scores a text against a lexicon.
///
/// The valence sum `s` over matched tokens is squashed to
/// `compound = s / sqrt(s^2 + 15)`; the three proportions are the shares of
/// positive-matched, negative-matched, and unmatched tokens. A text with no
/// tokens scores all-neutral with compound 0.
pub fn score_text(raw_text: &str, lexicon: &Lexicon) -> SentimentScores {
    let lowered = raw_text.to_lowercase();
    let mut total = 0usize;
    let mut matched_positive = 0usize;
    let mut matched_negative = 0usize;
    let mut valence_sum = 0.0f64;
    for token in text::tokens(&lowered) {
        total += 1;
        if let Some(valence) = lexicon.valence(token) {
            valence_sum += valence;
            if valence > 0.0 {
                matched_positive += 1;
            } else if valence < 0.0 {
                matched_negative += 1;
            }
        }
    }
    if total == 0 {
        return SentimentScores {
            positive: 0.0,
            negative: 0.0,
            neutral: 1.0,
            compound: 0.0,
        };
    }
    let compound = valence_sum / (valence_sum * valence_sum + ALPHA).sqrt();
    let n = total as f64;
    let positive = matched_positive as f64 / n;
    let negative = matched_negative as f64 / n;
    SentimentScores {
        positive,
        negative,
        neutral: (total - matched_positive - matched_negative) as f64 / n,
        compound,
    }
}

/// Classifies a compound score with strict +/-0.05 thresholds.
pub fn classify(scores: &SentimentScores) -> SentimentLabel {
    if scores.compound > POSITIVE_THRESHOLD {
        SentimentLabel::Positive
    } else if scores.compound < NEGATIVE_THRESHOLD {
        SentimentLabel::Negative
    } else {
        SentimentLabel::Neutral
    }
}

/// Convenience: score and classify in one step.
pub fn label_text(raw_text: &str, lexicon: &Lexicon) -> SentimentLabel {
    classify(&score_text(raw_text, lexicon))
}
