use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::layout::{ngram_slot, verb_slots, ContextBlock, FeatureLayout, NGRAM_ORDERS, PUNCT_MARKS};
use crate::jaas::{JaasCorpus, JaasDocument, JaasNode, Polarity};
use crate::textprep::{AnalyzedAdu, MarkerLexicon, Pos, StopWords};

/// Sparse `(slot, count)` pairs sorted by slot.
pub type SparseCounts = Vec<(usize, u32)>;

fn tally(slots: impl IntoIterator<Item = usize>) -> SparseCounts {
    let mut map: BTreeMap<usize, u32> = BTreeMap::new();
    for s in slots {
        *map.entry(s).or_default() += 1;
    }
    map.into_iter().collect()
}

pub fn lexical_features(adu: &AnalyzedAdu, lex: &MarkerLexicon) -> SparseCounts {
    lex.count_matches(&adu.content_lemmas())
}

pub fn punct_features(text: &str) -> SparseCounts {
    tally(text.chars().filter_map(|c| PUNCT_MARKS.iter().position(|m| *m == c)))
}

/// POS n-grams (N = 2, 3, 4) over the content-tag projection of the ADU, plus
/// verb tense/mood/person counts. Tokens outside the five-tag alphabet are
/// dropped before n-grams are formed.
pub fn morpho_features(adu: &AnalyzedAdu) -> SparseCounts {
    let tags: Vec<Pos> = adu
        .tokens
        .iter()
        .filter(|t| !t.is_punct && t.pos.content_index().is_some())
        .map(|t| t.pos)
        .collect();
    let mut slots = Vec::new();
    for n in NGRAM_ORDERS {
        for gram in tags.windows(n) {
            slots.extend(ngram_slot(gram));
        }
    }
    for t in &adu.tokens {
        if let (Pos::Verb, Some(f)) = (t.pos, &t.verb_feats) {
            slots.extend(verb_slots(f));
        }
    }
    tally(slots)
}

/// One ADU's own block: `lexical | punctuation | morphosyntactic`.
pub fn adu_block(adu: &AnalyzedAdu, text: &str, lex: &MarkerLexicon, layout: &FeatureLayout) -> SparseCounts {
    let mut out = lexical_features(adu, lex);
    let p0 = layout.punct_range().start;
    out.extend(punct_features(text).into_iter().map(|(s, c)| (p0 + s, c)));
    let m0 = layout.morpho_range().start;
    out.extend(morpho_features(adu).into_iter().map(|(s, c)| (m0 + s, c)));
    out
}

/// `[prev | current | next]`; a missing neighbour contributes a zero block.
pub fn context_vector(
    prev: Option<&[(usize, u32)]>,
    cur: &[(usize, u32)],
    next: Option<&[(usize, u32)]>,
    layout: &FeatureLayout,
) -> SparseCounts {
    let mut out = Vec::new();
    for (block, part) in [
        (ContextBlock::Prev, prev),
        (ContextBlock::Current, Some(cur)),
        (ContextBlock::Next, next),
    ] {
        let offset = layout.block_offset(block);
        if let Some(part) = part {
            out.extend(part.iter().map(|&(s, c)| (offset + s, c)));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub adu_id: String,
    pub doc_id: String,
    pub label: Option<Polarity>,
    pub slots: SparseCounts,
}

impl FeatureVector {
    /// Corpus-wide ADU key, `doc_id:adu_id`.
    pub fn key(&self) -> String {
        adu_key(&self.doc_id, &self.adu_id)
    }
}

pub fn adu_key(doc_id: &str, adu_id: &str) -> String {
    format!("{doc_id}:{adu_id}")
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FeatureError {
    #[error("no tagged analysis for ADU `{0}`")]
    MissingAnalysis(String),
    #[error("feature file line {line}: {message}")]
    BadLine { line: usize, message: String },
}

/// Where per-ADU token analyses come from.
pub enum Analyses<'a> {
    /// Pre-tagged file keyed by `doc_id:adu_id` (or bare `adu_id`).
    Tagged(&'a HashMap<String, AnalyzedAdu>),
    /// Tokenizer only: lowercased forms stand in for lemmas, no POS.
    Untagged(&'a StopWords),
}

impl Analyses<'_> {
    fn analyze(&self, doc: &JaasDocument, node: &JaasNode) -> Result<AnalyzedAdu, FeatureError> {
        match self {
            Analyses::Tagged(map) => {
                let key = adu_key(&doc.doc_id, &node.adu_id);
                map.get(&key)
                    .or_else(|| map.get(&node.adu_id))
                    .cloned()
                    .ok_or(FeatureError::MissingAnalysis(key))
            }
            Analyses::Untagged(stop) => Ok(AnalyzedAdu::untagged(node.adu_id.clone(), &node.text, stop)),
        }
    }
}

/// Vectors for every ADU of a document in reading order. Neighbours are taken
/// over all ADUs regardless of role; only pro/opp ADUs carry a label.
pub fn featurize_document(
    doc: &JaasDocument,
    analyses: &Analyses<'_>,
    lex: &MarkerLexicon,
    layout: &FeatureLayout,
) -> Result<Vec<FeatureVector>, FeatureError> {
    let nodes = doc.nodes_in_order();
    let blocks = nodes
        .iter()
        .map(|n| Ok(adu_block(&analyses.analyze(doc, n)?, &n.text, lex, layout)))
        .collect::<Result<Vec<_>, FeatureError>>()?;
    Ok(nodes
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let prev = i.checked_sub(1).map(|j| blocks[j].as_slice());
            let next = blocks.get(i + 1).map(Vec::as_slice);
            FeatureVector {
                adu_id: n.adu_id.clone(),
                doc_id: doc.doc_id.clone(),
                label: n.role.polarity(),
                slots: context_vector(prev, &blocks[i], next, layout),
            }
        })
        .collect())
}

pub fn featurize_corpus(
    corpus: &JaasCorpus,
    analyses: &Analyses<'_>,
    lex: &MarkerLexicon,
) -> Result<Vec<FeatureVector>, FeatureError> {
    let layout = FeatureLayout::new(lex.len());
    let per_doc = corpus
        .documents
        .par_iter()
        .map(|d| featurize_document(d, analyses, lex, &layout))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(per_doc.into_iter().flatten().collect())
}

pub fn write_feature_file(vectors: &[FeatureVector]) -> String {
    let mut out = String::new();
    for v in vectors {
        out.push_str(&serde_json::to_string(v).expect("feature vector serializes"));
        out.push('\n');
    }
    out
}

pub fn read_feature_file(text: &str) -> Result<Vec<FeatureVector>, FeatureError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| FeatureError::BadLine {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jaas::{Role, SourceCorpus};
    use crate::textprep::{load_tagged, MarkerCategory, Token, VerbFeats, Tense};

    fn tok(lemma: &str, pos: Pos) -> Token {
        Token {
            form: lemma.into(),
            lemma: lemma.into(),
            pos,
            verb_feats: None,
            is_stopword: false,
            is_punct: crate::textprep::is_punct_form(lemma),
        }
    }

    #[test]
    fn lexical_counts() {
        let lex = MarkerLexicon::from_entries([("например", MarkerCategory::DiscourseMarker), ("нужно", MarkerCategory::Modal)]);
        let adu = AnalyzedAdu {
            adu_id: "a".into(),
            tokens: vec![tok("нужно", Pos::Adv), tok("учиться", Pos::Verb), tok(",", Pos::Other), tok("например", Pos::Adv)],
        };
        assert_eq!(lexical_features(&adu, &lex), vec![(0, 1), (1, 1)]);
        let empty = AnalyzedAdu { adu_id: "e".into(), tokens: vec![] };
        assert!(lexical_features(&empty, &lex).is_empty());
    }

    #[test]
    fn multiword_marker_consumes_its_words() {
        let lex = MarkerLexicon::from_entries([
            ("я", MarkerCategory::DiscourseMarker),
            ("думать", MarkerCategory::DiscourseMarker),
            ("я думать", MarkerCategory::DiscourseMarker),
        ]);
        let adu = AnalyzedAdu {
            adu_id: "a".into(),
            tokens: vec![tok("я", Pos::Pron), tok("думать", Pos::Verb), tok("так", Pos::Adv)],
        };
        assert_eq!(lexical_features(&adu, &lex), vec![(2, 1)]);
    }

    #[test]
    fn punctuation_counts() {
        assert_eq!(punct_features("Зачем? Затем!"), vec![(3, 1), (4, 1)]);
        assert_eq!(punct_features("a, b; c: d"), vec![(0, 1), (1, 1), (2, 1)]);
        assert!(punct_features("просто текст.").is_empty());
    }

    #[test]
    fn pos_ngrams() {
        let adu = AnalyzedAdu {
            adu_id: "a".into(),
            tokens: vec![tok("дом", Pos::Noun), tok("стоять", Pos::Verb), tok("новый", Pos::Adj), tok("город", Pos::Noun)],
        };
        let m = morpho_features(&adu);
        let bigrams: u32 = m.iter().filter(|(s, _)| *s < 25).map(|(_, c)| c).sum();
        let trigrams: u32 = m.iter().filter(|(s, _)| (25..150).contains(s)).map(|(_, c)| c).sum();
        let fourgrams: u32 = m.iter().filter(|(s, _)| (150..775).contains(s)).map(|(_, c)| c).sum();
        assert_eq!((bigrams, trigrams, fourgrams), (3, 2, 1));
        assert!(m.contains(&(ngram_slot(&[Pos::Noun, Pos::Verb]).unwrap(), 1)));
        assert!(m.contains(&(ngram_slot(&[Pos::Verb, Pos::Adj]).unwrap(), 1)));
        assert!(m.contains(&(ngram_slot(&[Pos::Adj, Pos::Noun]).unwrap(), 1)));
    }

    #[test]
    fn other_tags_are_bridged() {
        let adu = AnalyzedAdu {
            adu_id: "a".into(),
            tokens: vec![tok("дом", Pos::Noun), tok("и", Pos::Other), tok(",", Pos::Other), tok("сад", Pos::Noun)],
        };
        assert_eq!(morpho_features(&adu), vec![(ngram_slot(&[Pos::Noun, Pos::Noun]).unwrap(), 1)]);
    }

    #[test]
    fn single_past_verb() {
        let mut v = tok("прийти", Pos::Verb);
        v.verb_feats = Some(VerbFeats { tense: Some(Tense::Past), mood: None, person: None });
        let adu = AnalyzedAdu { adu_id: "a".into(), tokens: vec![v] };
        assert_eq!(morpho_features(&adu), vec![(775, 1)]);
    }

    fn three_node_doc() -> JaasDocument {
        let mk = |id: &str, role, text: &str, order| JaasNode {
            adu_id: id.into(),
            role,
            text: text.into(),
            char_span: None,
            order_index: order,
        };
        JaasDocument {
            doc_id: "d".into(),
            source_corpus: SourceCorpus::Argmicro,
            topic_text: String::new(),
            // deliberately out of reading order
            nodes: vec![
                mk("a2", Role::Pro, "Во-вторых, нужно!", 1),
                mk("a1", Role::Mcl, "Я думаю, что да.", 0),
                mk("a3", Role::Opp, "Однако нет?", 2),
            ],
            edges: vec![],
        }
    }

    #[test]
    fn context_blocks_line_up() {
        let lex = MarkerLexicon::seed();
        let layout = FeatureLayout::new(lex.len());
        let stop = StopWords::seed();
        let doc = three_node_doc();
        let vecs = featurize_document(&doc, &Analyses::Untagged(&stop), &lex, &layout).unwrap();
        assert_eq!(vecs.iter().map(|v| v.adu_id.as_str()).collect::<Vec<_>>(), ["a1", "a2", "a3"]);
        assert_eq!(vecs[0].label, None);
        assert_eq!(vecs[1].label, Some(Polarity::Pro));
        let bd = layout.block_dim();
        let block = |v: &FeatureVector, b: usize| -> SparseCounts {
            v.slots.iter().filter(|(s, _)| (b * bd..(b + 1) * bd).contains(s)).map(|&(s, c)| (s - b * bd, c)).collect()
        };
        assert!(block(&vecs[0], 0).is_empty());
        assert!(block(&vecs[2], 2).is_empty());
        for i in 0..2 {
            assert_eq!(block(&vecs[i], 1), block(&vecs[i + 1], 0));
            assert_eq!(block(&vecs[i + 1], 1), block(&vecs[i], 2));
        }
        assert!(vecs.iter().all(|v| v.slots.iter().all(|(s, c)| *s < layout.total_dim() && *c > 0)));
        assert!(!block(&vecs[0], 1).is_empty());
    }

    #[test]
    fn single_adu_document_only_fills_current_block() {
        let lex = MarkerLexicon::seed();
        let layout = FeatureLayout::new(lex.len());
        let stop = StopWords::seed();
        let mut doc = three_node_doc();
        doc.nodes.truncate(1);
        let vecs = featurize_document(&doc, &Analyses::Untagged(&stop), &lex, &layout).unwrap();
        assert!(vecs[0].slots.iter().all(|(s, _)| (1043..2086).contains(s)));
        assert!(!vecs[0].slots.is_empty());
    }

    #[test]
    fn tagged_lookup_prefers_qualified_key() {
        let lex = MarkerLexicon::seed();
        let layout = FeatureLayout::new(lex.len());
        let tagged = "# adu_id = d:a1\nя\tя\tPRON\t_\nдумаю\tдумать\tVERB\tTense=present|Person=1\n\n\
                      # adu_id = a2\nнужно\tнужно\tADV\t_\n\n# adu_id = d:a3\nнет\tнет\tPART\t_\n";
        let map: HashMap<String, AnalyzedAdu> = load_tagged(tagged.as_bytes(), &StopWords::seed()).unwrap().into_iter().collect();
        let vecs = featurize_document(&three_node_doc(), &Analyses::Tagged(&map), &lex, &layout).unwrap();
        let slot = lex.slot("я думать").unwrap();
        assert!(vecs[0].slots.contains(&(layout.block_dim() + slot, 1)));

        let mut missing = map.clone();
        missing.remove("a2");
        let err = featurize_document(&three_node_doc(), &Analyses::Tagged(&missing), &lex, &layout).unwrap_err();
        assert_eq!(err, FeatureError::MissingAnalysis("d:a2".into()));
    }

    #[test]
    fn feature_file_round_trip() {
        let v = vec![FeatureVector { adu_id: "a".into(), doc_id: "d".into(), label: Some(Polarity::Opp), slots: vec![(3, 2), (1043, 1)] }];
        let text = write_feature_file(&v);
        assert_eq!(text, "{\"adu_id\":\"a\",\"doc_id\":\"d\",\"label\":\"opp\",\"slots\":[[3,2],[1043,1]]}\n");
        assert_eq!(read_feature_file(&text).unwrap(), v);
        assert!(read_feature_file("{oops").is_err());
    }
}
