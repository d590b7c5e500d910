use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::tokenize::{is_punct_form, normalize, tokenize};
use super::FormatError;

/// Coarse part of speech. Only the first five enter POS n-grams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pos {
    Noun,
    Pron,
    Verb,
    Adj,
    Adv,
    Other,
}

impl Pos {
    pub const CONTENT: [Pos; 5] = [Pos::Noun, Pos::Pron, Pos::Verb, Pos::Adj, Pos::Adv];

    /// Accepts Universal Dependencies tags and the mystem grammeme names.
    pub fn from_tag(tag: &str) -> Pos {
        match tag {
            "NOUN" | "PROPN" | "S" => Pos::Noun,
            "PRON" | "SPRO" | "APRO" => Pos::Pron,
            "VERB" | "V" => Pos::Verb,
            "ADJ" | "A" => Pos::Adj,
            "ADV" | "ADVPRO" => Pos::Adv,
            _ => Pos::Other,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Pos::Noun => "NOUN",
            Pos::Pron => "PRON",
            Pos::Verb => "VERB",
            Pos::Adj => "ADJ",
            Pos::Adv => "ADV",
            Pos::Other => "X",
        }
    }

    /// Position in the n-gram alphabet, `None` for tags outside it.
    pub fn content_index(self) -> Option<usize> {
        Pos::CONTENT.iter().position(|p| *p == self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tense {
    Past,
    Present,
    Future,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mood {
    Indicative,
    Imperative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct VerbFeats {
    pub tense: Option<Tense>,
    pub mood: Option<Mood>,
    /// 1, 2 or 3.
    pub person: Option<u8>,
}

impl VerbFeats {
    fn is_empty(&self) -> bool {
        self.tense.is_none() && self.mood.is_none() && self.person.is_none()
    }

    fn parse(feats: &str) -> Option<VerbFeats> {
        let mut out = VerbFeats::default();
        for pair in feats.split('|') {
            let Some((key, value)) = pair.split_once('=') else { continue };
            match (key.trim().to_ascii_lowercase().as_str(), value.trim().to_ascii_lowercase().as_str()) {
                ("tense", "past") => out.tense = Some(Tense::Past),
                ("tense", "present" | "pres") => out.tense = Some(Tense::Present),
                ("tense", "future" | "fut") => out.tense = Some(Tense::Future),
                ("mood", "indicative" | "ind") => out.mood = Some(Mood::Indicative),
                ("mood", "imperative" | "imp") => out.mood = Some(Mood::Imperative),
                ("person", p @ ("1" | "2" | "3")) => out.person = p.parse().ok(),
                _ => {}
            }
        }
        (!out.is_empty()).then_some(out)
    }

    fn render(&self) -> String {
        let mut parts = Vec::new();
        if let Some(t) = self.tense {
            parts.push(format!(
                "Tense={}",
                match t {
                    Tense::Past => "past",
                    Tense::Present => "present",
                    Tense::Future => "future",
                }
            ));
        }
        if let Some(m) = self.mood {
            parts.push(format!(
                "Mood={}",
                match m {
                    Mood::Indicative => "indicative",
                    Mood::Imperative => "imperative",
                }
            ));
        }
        if let Some(p) = self.person {
            parts.push(format!("Person={p}"));
        }
        parts.join("|")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub form: String,
    pub lemma: String,
    pub pos: Pos,
    /// Present only on verbs.
    pub verb_feats: Option<VerbFeats>,
    pub is_stopword: bool,
    pub is_punct: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzedAdu {
    pub adu_id: String,
    pub tokens: Vec<Token>,
}

impl AnalyzedAdu {
    /// Analysis without a tagger: lowercased forms as lemmas, no POS.
    pub fn untagged(adu_id: impl Into<String>, text: &str, stopwords: &StopWords) -> Self {
        let tokens = tokenize(text)
            .into_iter()
            .map(|s| {
                let lemma = normalize(&s.form);
                Token {
                    is_stopword: !s.is_punct && stopwords.contains(&lemma),
                    is_punct: s.is_punct,
                    form: s.form,
                    lemma,
                    pos: Pos::Other,
                    verb_feats: None,
                }
            })
            .collect();
        AnalyzedAdu {
            adu_id: adu_id.into(),
            tokens,
        }
    }

    /// Lemmas of tokens that are neither punctuation nor stop words.
    pub fn content_lemmas(&self) -> Vec<String> {
        self.tokens
            .iter()
            .filter(|t| !t.is_punct && !t.is_stopword)
            .map(|t| normalize(&t.lemma))
            .collect()
    }
}

/// Normalized lemmas removed before lexical matching.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopWords(HashSet<String>);

impl StopWords {
    pub fn parse(text: &str) -> StopWords {
        StopWords(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(normalize)
                .collect(),
        )
    }

    pub fn seed() -> StopWords {
        StopWords::parse(include_str!("../../data/stopwords_ru.txt"))
    }

    pub fn contains(&self, lemma: &str) -> bool {
        self.0.contains(&normalize(lemma))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

const HEADER: &str = "adu_id";

fn header_value(line: &str) -> Option<&str> {
    let rest = line.strip_prefix('#')?.trim_start();
    let rest = rest.strip_prefix(HEADER)?.trim_start();
    Some(rest.strip_prefix('=')?.trim())
}

/// Read the tab-separated tagged-token format
/// (`FORM LEMMA POS FEATS`, `# adu_id = …` header, blank line between ADUs).
pub fn load_tagged(bytes: &[u8], stopwords: &StopWords) -> Result<BTreeMap<String, AnalyzedAdu>, FormatError> {
    let text = std::str::from_utf8(bytes).map_err(|e| FormatError::new(0, format!("not UTF-8: {e}")))?;
    let mut out: BTreeMap<String, AnalyzedAdu> = BTreeMap::new();
    let mut current: Option<AnalyzedAdu> = None;

    let mut finish = |adu: Option<AnalyzedAdu>, line: usize| -> Result<(), FormatError> {
        if let Some(adu) = adu {
            if out.contains_key(&adu.adu_id) {
                return Err(FormatError::new(line, format!("duplicate adu_id `{}`", adu.adu_id)));
            }
            out.insert(adu.adu_id.clone(), adu);
        }
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            finish(current.take(), lineno)?;
            continue;
        }
        if line.starts_with('#') {
            if let Some(id) = header_value(line) {
                finish(current.take(), lineno)?;
                if id.is_empty() {
                    return Err(FormatError::new(lineno, "empty adu_id header"));
                }
                current = Some(AnalyzedAdu {
                    adu_id: id.to_string(),
                    tokens: Vec::new(),
                });
            }
            continue;
        }
        let Some(adu) = current.as_mut() else {
            return Err(FormatError::new(lineno, "token line before any `# adu_id = …` header"));
        };
        let cols: Vec<&str> = line.split('\t').collect();
        if !(3..=4).contains(&cols.len()) {
            return Err(FormatError::new(
                lineno,
                format!("expected 4 tab-separated columns (FORM LEMMA POS FEATS), found {}", cols.len()),
            ));
        }
        let form = cols[0].to_string();
        let lemma = cols[1].to_string();
        let pos = Pos::from_tag(cols[2]);
        let verb_feats = match (pos, cols.get(3)) {
            (Pos::Verb, Some(f)) => VerbFeats::parse(f),
            _ => None,
        };
        let is_punct = is_punct_form(&form);
        adu.tokens.push(Token {
            is_stopword: !is_punct && stopwords.contains(&lemma),
            is_punct,
            form,
            lemma,
            pos,
            verb_feats,
        });
    }
    let end = text.lines().count() + 1;
    finish(current.take(), end)?;
    Ok(out)
}

pub fn write_tagged<'a, I>(adus: I) -> String
where
    I: IntoIterator<Item = &'a AnalyzedAdu>,
{
    let mut out = String::new();
    for adu in adus {
        let _ = writeln!(out, "# adu_id = {}", adu.adu_id);
        for t in &adu.tokens {
            let feats = t.verb_feats.map(|f| f.render()).unwrap_or_else(|| "_".into());
            let _ = writeln!(out, "{}\t{}\t{}\t{}", t.form, t.lemma, t.pos.tag(), feats);
        }
        out.push('\n');
    }
    out
}
