//! Shared tokenization rules.
//!
//! The compatibility contract for the whole pipeline: text is case-folded,
//! split into fragments at phrase delimiters, and fragments are split into
//! tokens at whitespace. Apostrophes stay inside tokens and digits are
//! ordinary token characters. URLs and mentions get no special treatment;
//! platform artifacts they produce are handled downstream by artifact rules.

/// Characters that end a phrase: no keyword may span one of these.
pub(crate) const PHRASE_DELIMITERS: [char; 13] = [
    '.', ',', ';', ':', '!', '?', '(', ')', '[', ']', '"', '\n', '\r',
];

pub(crate) fn is_delimiter(c: char) -> bool {
    PHRASE_DELIMITERS.contains(&c)
}

/// Splits case-folded text into phrase fragments.
pub(crate) fn fragments(lowered: &str) -> impl Iterator<Item = &str> {
    lowered.split(is_delimiter)
}

/// All tokens of the case-folded text, ignoring fragment boundaries.
pub(crate) fn tokens(lowered: &str) -> impl Iterator<Item = &str> {
    fragments(lowered).flat_map(str::split_whitespace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fragments_split_at_punctuation_and_newlines() {
        let lowered = "first part, second part\nthird";
        let parts: Vec<&str> = fragments(lowered).collect();
        assert_eq!(parts, vec!["first part", " second part", "third"]);
    }

    #[test]
    fn tokens_keep_apostrophes_and_digits() {
        let toks: Vec<&str> = tokens("it's 5 degrees (above normal)").collect();
        assert_eq!(toks, vec!["it's", "5", "degrees", "above", "normal"]);
    }
}
