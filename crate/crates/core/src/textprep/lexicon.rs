use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::tokenize::normalize;
use super::FormatError;

/// Size of the marker/modal lexicon the feature layout is designed around.
pub const EXPECTED_LEXICON_SIZE: usize = 255;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkerCategory {
    DiscourseMarker,
    Modal,
}

impl FromStr for MarkerCategory {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "discourse_marker" => Ok(MarkerCategory::DiscourseMarker),
            "modal" => Ok(MarkerCategory::Modal),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    /// Normalized lemma sequence.
    pub phrase: Vec<String>,
    pub category: MarkerCategory,
}

/// The lexicon loaded with fewer or more entries than the feature design
/// expects. Not fatal: the layout is sized to the actual entry count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LexiconSizeWarning {
    pub expected: usize,
    pub actual: usize,
}

impl fmt::Display for LexiconSizeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lexicon has {} entries, expected {}", self.actual, self.expected)
    }
}

/// Discourse markers and modal words; slot `i` is the `i`-th entry in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MarkerLexicon {
    entries: Vec<LexiconEntry>,
    slots: HashMap<Vec<String>, usize>,
    by_first: HashMap<String, usize>,
}

impl MarkerLexicon {
    /// Parse `phrase<TAB>category` lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<(MarkerLexicon, Option<LexiconSizeWarning>), FormatError> {
        let mut lex = MarkerLexicon::default();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let Some((phrase, category)) = line.split_once('\t') else {
                return Err(FormatError::new(lineno, "expected `phrase<TAB>category`"));
            };
            let category: MarkerCategory = category
                .trim()
                .parse()
                .map_err(|_| FormatError::new(lineno, format!("bad category `{}`", category.trim())))?;
            let phrase: Vec<String> = phrase.split_whitespace().map(normalize).collect();
            if phrase.is_empty() {
                return Err(FormatError::new(lineno, "empty phrase"));
            }
            if lex.slots.contains_key(&phrase) {
                return Err(FormatError::new(lineno, format!("duplicate entry `{}`", phrase.join(" "))));
            }
            lex.push(phrase, category);
        }
        let warning = (lex.len() != EXPECTED_LEXICON_SIZE).then_some(LexiconSizeWarning {
            expected: EXPECTED_LEXICON_SIZE,
            actual: lex.len(),
        });
        Ok((lex, warning))
    }

    /// The shipped Russian seed list.
    pub fn seed() -> MarkerLexicon {
        let (lex, _) = MarkerLexicon::parse(include_str!("../../data/lexicon_ru.tsv")).expect("shipped lexicon parses");
        lex
    }

    pub fn from_entries<I, S>(entries: I) -> MarkerLexicon
    where
        I: IntoIterator<Item = (S, MarkerCategory)>,
        S: AsRef<str>,
    {
        let mut lex = MarkerLexicon::default();
        for (phrase, category) in entries {
            let phrase: Vec<String> = phrase.as_ref().split_whitespace().map(normalize).collect();
            if !phrase.is_empty() && !lex.slots.contains_key(&phrase) {
                lex.push(phrase, category);
            }
        }
        lex
    }

    fn push(&mut self, phrase: Vec<String>, category: MarkerCategory) {
        let slot = self.entries.len();
        let len = phrase.len();
        let longest = self.by_first.entry(phrase[0].clone()).or_insert(0);
        *longest = (*longest).max(len);
        self.slots.insert(phrase.clone(), slot);
        self.entries.push(LexiconEntry { phrase, category });
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn slot(&self, phrase: &str) -> Option<usize> {
        let key: Vec<String> = phrase.split_whitespace().map(normalize).collect();
        self.slots.get(&key).copied()
    }

    /// Vocabulary of all entries, used to keep marker words off the stop list.
    pub fn vocabulary(&self) -> HashSet<&str> {
        self.entries.iter().flat_map(|e| e.phrase.iter().map(String::as_str)).collect()
    }

    /// Greedy left-to-right longest match; matches never overlap.
    /// Returns `(slot, count)` pairs sorted by slot.
    pub fn count_matches<S: AsRef<str>>(&self, lemmas: &[S]) -> Vec<(usize, u32)> {
        let mut counts: HashMap<usize, u32> = HashMap::new();
        let mut i = 0;
        while i < lemmas.len() {
            let first = lemmas[i].as_ref();
            let longest = self.by_first.get(first).copied().unwrap_or(0).min(lemmas.len() - i);
            let mut matched = 0;
            for len in (1..=longest).rev() {
                let window: Vec<String> = lemmas[i..i + len].iter().map(|s| s.as_ref().to_string()).collect();
                if let Some(&slot) = self.slots.get(&window) {
                    *counts.entry(slot).or_default() += 1;
                    matched = len;
                    break;
                }
            }
            i += matched.max(1);
        }
        let mut out: Vec<(usize, u32)> = counts.into_iter().collect();
        out.sort_unstable();
        out
    }
}

pub fn load_lexicon(text: &str) -> Result<(MarkerLexicon, Option<LexiconSizeWarning>), FormatError> {
    MarkerLexicon::parse(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textprep::StopWords;

    #[test]
    fn shipped_seed_has_255_entries() {
        let (lex, warning) = load_lexicon(include_str!("../../data/lexicon_ru.tsv")).unwrap();
        assert_eq!(lex.len(), EXPECTED_LEXICON_SIZE);
        assert!(warning.is_none());
        assert!(lex.entries().iter().any(|e| e.category == MarkerCategory::Modal));
        assert!(lex.slot("не").is_some());
    }

    #[test]
    fn shipped_stop_list_spares_lexicon_words() {
        let lex = MarkerLexicon::seed();
        let stop = StopWords::seed();
        for word in lex.vocabulary() {
            assert!(!stop.contains(word), "stop list removes lexicon word `{word}`");
        }
    }

    #[test]
    fn empty_file_warns() {
        let (lex, warning) = load_lexicon("").unwrap();
        assert!(lex.is_empty());
        assert_eq!(warning, Some(LexiconSizeWarning { expected: 255, actual: 0 }));
    }

    #[test]
    fn duplicate_entry_is_an_error() {
        let err = load_lexicon("нужно\tmodal\nНужно\tmodal\n").unwrap_err();
        assert!(err.message.contains("duplicate entry"));
        assert_eq!(err.line, 2);
    }

    #[test]
    fn bad_category_is_an_error() {
        let err = load_lexicon("нужно\tverb\n").unwrap_err();
        assert!(err.message.contains("bad category"));
    }

    #[test]
    fn slots_follow_file_order() {
        let (lex, _) = load_lexicon("# comment\nнапример\tdiscourse_marker\n\nнужно\tmodal\nя думать\tdiscourse_marker\n").unwrap();
        assert_eq!(lex.slot("например"), Some(0));
        assert_eq!(lex.slot("нужно"), Some(1));
        assert_eq!(lex.slot("я  думать"), Some(2));
    }

    #[test]
    fn longest_match_does_not_double_count() {
        let lex = MarkerLexicon::from_entries([
            ("я", MarkerCategory::DiscourseMarker),
            ("думать", MarkerCategory::DiscourseMarker),
            ("я думать", MarkerCategory::DiscourseMarker),
            ("я думать что", MarkerCategory::DiscourseMarker),
        ]);
        // "я думать" at 0, nothing at "так", "я думать что" at 3, "думать" at 6.
        let lemmas = ["я", "думать", "так", "я", "думать", "что", "думать"];
        assert_eq!(lex.count_matches(&lemmas), vec![(1, 1), (2, 1), (3, 1)]);
        assert!(lex.count_matches::<&str>(&[]).is_empty());
    }
}
