//! ArgMicro XML and PersEssays brat standoff → JAAS.

mod argmicro;
mod persessays;
mod templates;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use argmicro::{parse_argmicro, to_jaas_argmicro};
pub use persessays::{parse_persessays, to_jaas_persessays, PersEssaysConversion};
pub use templates::{
    apply_review, detect_example_candidates, read_review_file, write_review_file, ReviewDecision, ReviewRow,
    TemplateLexicon,
};

/// Malformed source annotation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, {element}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub element: String,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, element: impl Into<String>, message: impl Into<String>) -> Self {
        ParseError {
            line,
            element: element.into(),
            message: message.into(),
        }
    }
}

/// A parsed source graph that cannot be expressed in JAAS.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{doc_id}: {message}")]
pub struct ConversionError {
    pub doc_id: String,
    pub message: String,
}

impl ConversionError {
    pub fn new(doc_id: impl Into<String>, message: impl Into<String>) -> Self {
        ConversionError {
            doc_id: doc_id.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub seg_id: String,
    pub text: String,
    /// Character offsets into the source text, when known.
    pub span: Option<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitKind {
    Proponent,
    Opponent,
    MajorClaim,
    Claim,
    Premise,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stance {
    For,
    Against,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unit {
    pub unit_id: String,
    pub kind: UnitKind,
    pub stance: Option<Stance>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationLabel {
    Seg,
    Sup,
    Exa,
    Add,
    Reb,
    Und,
    Supports,
    Attacks,
}

impl RelationLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationLabel::Seg => "seg",
            RelationLabel::Sup => "sup",
            RelationLabel::Exa => "exa",
            RelationLabel::Add => "add",
            RelationLabel::Reb => "reb",
            RelationLabel::Und => "und",
            RelationLabel::Supports => "supports",
            RelationLabel::Attacks => "attacks",
        }
    }
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "seg" => RelationLabel::Seg,
            "sup" => RelationLabel::Sup,
            "exa" => RelationLabel::Exa,
            "add" => RelationLabel::Add,
            "reb" => RelationLabel::Reb,
            "und" => RelationLabel::Und,
            "supports" => RelationLabel::Supports,
            "attacks" => RelationLabel::Attacks,
            other => return Err(format!("unknown relation type `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub rel_id: String,
    pub source: String,
    pub target: String,
    pub label: RelationLabel,
}

/// Source-scheme graph before conversion. `seg` relations link a segment to
/// the unit whose text it forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceGraph {
    pub doc_id: String,
    pub topic: String,
    /// Full source text when segments carry spans into it.
    #[serde(default)]
    pub text: String,
    pub segments: Vec<Segment>,
    pub units: Vec<Unit>,
    pub relations: Vec<Relation>,
}

impl SourceGraph {
    pub fn unit(&self, id: &str) -> Option<&Unit> {
        self.units.iter().find(|u| u.unit_id == id)
    }

    /// Relation counts by label.
    pub fn census(&self) -> std::collections::BTreeMap<RelationLabel, usize> {
        let mut out = std::collections::BTreeMap::new();
        for r in &self.relations {
            *out.entry(r.label).or_default() += 1;
        }
        out
    }

    /// Unit text: its segments joined in segment order.
    pub fn unit_text(&self, unit_id: &str) -> String {
        let parts: Vec<&str> = self
            .segments
            .iter()
            .filter(|s| {
                self.relations
                    .iter()
                    .any(|r| r.label == RelationLabel::Seg && r.source == s.seg_id && r.target == unit_id)
            })
            .map(|s| s.text.trim())
            .collect();
        parts.join(" ")
    }
}
