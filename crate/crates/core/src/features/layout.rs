use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::textprep::{Mood, Pos, Tense, VerbFeats};

pub const PUNCT_MARKS: [char; 5] = [',', ':', ';', '?', '!'];
pub const PUNCT_DIM: usize = PUNCT_MARKS.len();
/// 5² + 5³ + 5⁴ POS n-gram slots.
pub const NGRAM_DIM: usize = 25 + 125 + 625;
/// tense ×3, mood ×2, person ×3.
pub const VERB_DIM: usize = 8;
pub const MORPHO_DIM: usize = NGRAM_DIM + VERB_DIM;
pub const NGRAM_ORDERS: [usize; 3] = [2, 3, 4];

const ALPHABET: usize = Pos::CONTENT.len();

/// Context position of a per-ADU block inside the full vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextBlock {
    Prev,
    Current,
    Next,
}

/// Slot arithmetic for `[prev | current | next]` vectors, each block being
/// `lexical | punctuation | morphosyntactic`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureLayout {
    pub lexical_dim: usize,
}

impl FeatureLayout {
    pub fn new(lexical_dim: usize) -> Self {
        FeatureLayout { lexical_dim }
    }

    pub fn punct_dim(&self) -> usize {
        PUNCT_DIM
    }

    pub fn morpho_dim(&self) -> usize {
        MORPHO_DIM
    }

    pub fn block_dim(&self) -> usize {
        self.lexical_dim + PUNCT_DIM + MORPHO_DIM
    }

    pub fn total_dim(&self) -> usize {
        3 * self.block_dim()
    }

    pub fn lexical_range(&self) -> Range<usize> {
        0..self.lexical_dim
    }

    pub fn punct_range(&self) -> Range<usize> {
        self.lexical_dim..self.lexical_dim + PUNCT_DIM
    }

    pub fn morpho_range(&self) -> Range<usize> {
        self.lexical_dim + PUNCT_DIM..self.block_dim()
    }

    pub fn block_offset(&self, block: ContextBlock) -> usize {
        match block {
            ContextBlock::Prev => 0,
            ContextBlock::Current => self.block_dim(),
            ContextBlock::Next => 2 * self.block_dim(),
        }
    }

    /// Offset of a slot within its own block.
    pub fn within_block(&self, slot: usize) -> usize {
        slot % self.block_dim()
    }
}

/// Index of a POS n-gram (2 ≤ n ≤ 4) within the morphosyntactic family.
/// Bigrams occupy [0, 25), trigrams [25, 150), 4-grams [150, 775).
pub fn ngram_slot(tags: &[Pos]) -> Option<usize> {
    let base = match tags.len() {
        2 => 0,
        3 => 25,
        4 => 150,
        _ => return None,
    };
    let mut code = 0;
    for t in tags {
        code = code * ALPHABET + t.content_index()?;
    }
    Some(base + code)
}

/// Slots (within the morphosyntactic family) set by a verb's grammar features.
pub fn verb_slots(feats: &VerbFeats) -> Vec<usize> {
    let mut out = Vec::with_capacity(3);
    if let Some(t) = feats.tense {
        out.push(
            NGRAM_DIM
                + match t {
                    Tense::Past => 0,
                    Tense::Present => 1,
                    Tense::Future => 2,
                },
        );
    }
    if let Some(m) = feats.mood {
        out.push(
            NGRAM_DIM
                + match m {
                    Mood::Indicative => 3,
                    Mood::Imperative => 4,
                },
        );
    }
    if let Some(p @ 1..=3) = feats.person {
        out.push(NGRAM_DIM + 4 + p as usize);
    }
    out
}

/// Feature-family subsets compared in the ablation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSet {
    LexicalOnly,
    AllWithoutMarkers,
    AllWithoutPrev,
    All,
}

impl FeatureSet {
    /// Column order of the ablation table.
    pub const ABLATION_ORDER: [FeatureSet; 4] = [
        FeatureSet::LexicalOnly,
        FeatureSet::AllWithoutMarkers,
        FeatureSet::AllWithoutPrev,
        FeatureSet::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureSet::LexicalOnly => "lexical_only",
            FeatureSet::AllWithoutMarkers => "all_without_markers",
            FeatureSet::AllWithoutPrev => "all_without_prev",
            FeatureSet::All => "all",
        }
    }

    pub fn keeps(self, slot: usize, layout: &FeatureLayout) -> bool {
        let inner = layout.within_block(slot);
        match self {
            FeatureSet::All => true,
            FeatureSet::LexicalOnly => layout.lexical_range().contains(&inner),
            FeatureSet::AllWithoutMarkers => !layout.lexical_range().contains(&inner),
            FeatureSet::AllWithoutPrev => slot >= layout.block_dim(),
        }
    }

    pub fn apply(self, slots: &[(usize, u32)], layout: &FeatureLayout) -> Vec<(usize, u32)> {
        slots.iter().copied().filter(|(s, _)| self.keeps(*s, layout)).collect()
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        FeatureSet::ABLATION_ORDER
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown feature set `{s}`"))
    }
}
