use std::collections::{HashMap, HashSet};

use super::ConversionError;
use crate::jaas::{EdgeType, JaasDocument};
use crate::textprep::{normalize, tokenize, FormatError};

/// Exemplification phrases ("for example", "например", ...). Matching is on
/// normalized word tokens, so case, `ё`/`е` and punctuation do not matter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateLexicon {
    phrases: Vec<String>,
    token_seqs: Vec<Vec<String>>,
}

fn words(text: &str) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .filter(|t| !t.is_punct)
        .map(|t| normalize(&t.form))
        .collect()
}

impl TemplateLexicon {
    pub fn new<I, S>(phrases: I) -> Result<TemplateLexicon, FormatError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut lex = TemplateLexicon {
            phrases: Vec::new(),
            token_seqs: Vec::new(),
        };
        let mut seen = HashSet::new();
        for p in phrases {
            let seq = words(p.as_ref());
            if seq.is_empty() {
                return Err(FormatError::new(0, format!("empty template phrase `{}`", p.as_ref())));
            }
            if !seen.insert(seq.clone()) {
                return Err(FormatError::new(0, format!("duplicate template phrase `{}`", p.as_ref())));
            }
            lex.phrases.push(seq.join(" "));
            lex.token_seqs.push(seq);
        }
        if lex.phrases.is_empty() {
            return Err(FormatError::new(0, "template lexicon is empty"));
        }
        Ok(lex)
    }

    /// One phrase per line; `#` comments and blank lines skipped.
    pub fn parse(text: &str) -> Result<TemplateLexicon, FormatError> {
        TemplateLexicon::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn seed() -> TemplateLexicon {
        TemplateLexicon::parse(include_str!("../../data/templates_ru.txt")).expect("shipped templates parse")
    }

    pub fn phrases(&self) -> &[String] {
        &self.phrases
    }

    pub fn matches(&self, text: &str) -> bool {
        let toks = words(text);
        self.token_seqs
            .iter()
            .any(|seq| toks.windows(seq.len()).any(|w| w == seq.as_slice()))
    }
}

/// `sup`/`exa` edges whose source ADU text contains a template phrase.
pub fn detect_example_candidates(doc: &JaasDocument, templates: &TemplateLexicon) -> Vec<String> {
    doc.edges
        .iter()
        .filter(|e| matches!(e.edge_type, EdgeType::Sup | EdgeType::Exa))
        .filter(|e| doc.node(&e.source).is_some_and(|n| templates.matches(&n.text)))
        .map(|e| e.edge_id.clone())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReviewDecision {
    Exa,
    Sup,
}

/// One line of the manual-review file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReviewRow {
    pub edge_id: String,
    pub doc_id: String,
    pub source_text: String,
    /// Empty until a reviewer fills it in.
    pub decision: Option<ReviewDecision>,
}

const REVIEW_HEADER: &str = "edge_id\tdoc_id\tsource_text\tdecision";

pub fn write_review_file(rows: &[ReviewRow]) -> String {
    let clean = |s: &str| s.replace(['\t', '\n', '\r'], " ");
    let mut out = String::from(REVIEW_HEADER);
    out.push('\n');
    for r in rows {
        let decision = match r.decision {
            Some(ReviewDecision::Exa) => "exa",
            Some(ReviewDecision::Sup) => "sup",
            None => "",
        };
        out.push_str(&format!("{}\t{}\t{}\t{decision}\n", clean(&r.edge_id), clean(&r.doc_id), clean(&r.source_text)));
    }
    out
}

pub fn read_review_file(text: &str) -> Result<Vec<ReviewRow>, FormatError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end_matches('\r') == REVIEW_HEADER => {}
        _ => return Err(FormatError::new(1, format!("expected header `{REVIEW_HEADER}`"))),
    }
    let mut rows = Vec::new();
    for (i, raw) in lines {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(FormatError::new(i + 1, format!("expected 4 columns, found {}", cols.len())));
        }
        let decision = match cols[3].trim() {
            "exa" => Some(ReviewDecision::Exa),
            "sup" => Some(ReviewDecision::Sup),
            "" => None,
            other => return Err(FormatError::new(i + 1, format!("decision must be `exa` or `sup`, got `{other}`"))),
        };
        rows.push(ReviewRow {
            edge_id: cols[0].to_string(),
            doc_id: cols[1].to_string(),
            source_text: cols[2].to_string(),
            decision,
        });
    }
    Ok(rows)
}

/// Rewrite reviewed candidate edges. Every row must carry a decision and
/// point at an existing `sup`/`exa` edge. Returns the number of `exa` edges set.
pub fn apply_review(docs: &mut [JaasDocument], rows: &[ReviewRow]) -> Result<usize, ConversionError> {
    let index: HashMap<&str, usize> = docs.iter().enumerate().map(|(i, d)| (d.doc_id.as_str(), i)).collect();
    let mut plan = Vec::with_capacity(rows.len());
    for r in rows {
        let err = |m: String| ConversionError::new(&r.doc_id, m);
        let decision = r.decision.ok_or_else(|| err(format!("edge `{}` has no review decision", r.edge_id)))?;
        let &d = index.get(r.doc_id.as_str()).ok_or_else(|| err("unknown document".into()))?;
        let e = docs[d]
            .edges
            .iter()
            .position(|e| e.edge_id == r.edge_id)
            .ok_or_else(|| err(format!("unknown edge `{}`", r.edge_id)))?;
        if !matches!(docs[d].edges[e].edge_type, EdgeType::Sup | EdgeType::Exa) {
            return Err(err(format!("edge `{}` is {}, not a support", r.edge_id, docs[d].edges[e].edge_type)));
        }
        plan.push((d, e, decision));
    }
    let mut exa = 0;
    for (d, e, decision) in plan {
        docs[d].edges[e].edge_type = match decision {
            ReviewDecision::Exa => {
                exa += 1;
                EdgeType::Exa
            }
            ReviewDecision::Sup => EdgeType::Sup,
        };
    }
    Ok(exa)
}
