//! Tokenization, tagged-token ingestion, stop words and the marker lexicon.

mod lexicon;
mod tagged;
mod tokenize;

use std::fmt;

pub use lexicon::{
    load_lexicon, LexiconEntry, LexiconSizeWarning, MarkerCategory, MarkerLexicon, EXPECTED_LEXICON_SIZE,
};
pub use tagged::{load_tagged, write_tagged, AnalyzedAdu, Mood, Pos, StopWords, Tense, Token, VerbFeats};
pub use tokenize::{is_punct_form, normalize, tokenize, Surface};

/// Malformed lexicon or tagged-token input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct FormatError {
    /// 1-based; 0 when the problem is not tied to a line.
    pub line: usize,
    pub message: String,
}

impl FormatError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        FormatError {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}
