use argmine_core::features::*;
use argmine_core::jaas::{JaasCorpus, JaasDocument, JaasNode, Polarity, Role, SourceCorpus};
use argmine_core::textprep::{MarkerLexicon, StopWords};
use proptest::prelude::*;

fn layout() -> FeatureLayout {
    FeatureLayout::new(MarkerLexicon::seed().len())
}

#[test]
fn dimensions() {
    let l = layout();
    assert_eq!(l.lexical_range(), 0..255);
    assert_eq!(l.punct_range(), 255..260);
    assert_eq!(l.morpho_range(), 260..1043);
    assert_eq!(l.block_dim(), 1043);
    assert_eq!(l.total_dim(), 3129);
    assert_eq!(l.block_offset(ContextBlock::Prev), 0);
    assert_eq!(l.block_offset(ContextBlock::Current), 1043);
    assert_eq!(l.block_offset(ContextBlock::Next), 2086);
}

#[test]
fn ablation_masks_zero_exactly_their_ranges() {
    let l = layout();
    let all: Vec<(usize, u32)> = (0..l.total_dim()).map(|s| (s, 1)).collect();
    let kept = |set: FeatureSet| -> Vec<usize> { set.apply(&all, &l).into_iter().map(|e| e.0).collect() };
    assert_eq!(kept(FeatureSet::All).len(), 3129);
    let lexical: Vec<usize> = (0..3).flat_map(|b| b * 1043..b * 1043 + 255).collect();
    assert_eq!(kept(FeatureSet::LexicalOnly), lexical);
    let no_markers: Vec<usize> = (0..3129).filter(|s| s % 1043 >= 255).collect();
    assert_eq!(kept(FeatureSet::AllWithoutMarkers), no_markers);
    assert_eq!(kept(FeatureSet::AllWithoutPrev), (1043..3129).collect::<Vec<_>>());
}

fn doc(texts: &[String]) -> JaasDocument {
    JaasDocument {
        doc_id: "d".into(),
        source_corpus: SourceCorpus::Argmicro,
        topic_text: String::new(),
        nodes: texts
            .iter()
            .enumerate()
            .map(|(i, t)| JaasNode {
                adu_id: format!("a{i}"),
                role: if i == 0 { Role::Mcl } else if i % 2 == 0 { Role::Opp } else { Role::Pro },
                text: t.clone(),
                char_span: None,
                order_index: i,
            })
            .collect(),
        edges: vec![],
    }
}

fn words() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop::sample::select(vec![
            "однако", "потому", "что", "например", "кроме", "того", "дети", "школа", "нужно", "но", ",", "?", "!",
            ":", ";", "важно", "конечно", "следовательно",
        ]),
        0..12,
    )
    .prop_map(|w| w.join(" "))
}

proptest! {
    #[test]
    fn context_vectors_are_shifted_copies_of_blocks(texts in prop::collection::vec(words(), 1..7)) {
        let l = layout();
        let lex = MarkerLexicon::seed();
        let stop = StopWords::seed();
        let d = doc(&texts);
        let vecs = featurize_document(&d, &Analyses::Untagged(&stop), &lex, &l).unwrap();
        prop_assert_eq!(vecs.len(), texts.len());
        let bd = l.block_dim();
        let block = |v: &FeatureVector, b: usize| -> Vec<(usize, u32)> {
            v.slots.iter().filter(|(s, _)| s / bd == b).map(|&(s, c)| (s % bd, c)).collect()
        };
        for (i, v) in vecs.iter().enumerate() {
            prop_assert!(v.slots.windows(2).all(|w| w[0].0 < w[1].0));
            prop_assert!(v.slots.iter().all(|&(s, c)| s < l.total_dim() && c > 0));
            // the current block is the ADU's own block
            let own = adu_block(&argmine_core::textprep::AnalyzedAdu::untagged(&v.adu_id, &texts[i], &stop), &texts[i], &lex, &l);
            prop_assert_eq!(block(v, 1), own);
            if i == 0 { prop_assert!(block(v, 0).is_empty()); } else { prop_assert_eq!(block(v, 0), block(&vecs[i - 1], 1)); }
            if i + 1 == vecs.len() { prop_assert!(block(v, 2).is_empty()); } else { prop_assert_eq!(block(v, 2), block(&vecs[i + 1], 1)); }
            // punctuation counts are plain character counts
            for (k, mark) in PUNCT_MARKS.iter().enumerate() {
                let n = texts[i].chars().filter(|c| c == mark).count() as u32;
                let got = block(v, 1).iter().find(|e| e.0 == 255 + k).map_or(0, |e| e.1);
                prop_assert_eq!(got, n);
            }
        }
        prop_assert_eq!(vecs[0].label, None);
        prop_assert!(vecs.iter().skip(1).all(|v| v.label.is_some()));
    }

    #[test]
    fn featurization_is_deterministic_and_round_trips(texts in prop::collection::vec(words(), 1..5)) {
        let lex = MarkerLexicon::seed();
        let stop = StopWords::seed();
        let mut corpus = JaasCorpus::new("argmicro");
        corpus.documents.push(doc(&texts));
        let a = featurize_corpus(&corpus, &Analyses::Untagged(&stop), &lex).unwrap();
        let b = featurize_corpus(&corpus, &Analyses::Untagged(&stop), &lex).unwrap();
        prop_assert_eq!(&a, &b);
        let text = write_feature_file(&a);
        prop_assert_eq!(read_feature_file(&text).unwrap(), a);
    }
}

#[test]
fn markers_land_in_lexicon_slots() {
    let lex = MarkerLexicon::seed();
    let stop = StopWords::seed();
    let l = layout();
    let d = doc(&["Дети нужны.".into(), "Однако это не так.".into()]);
    let vecs = featurize_document(&d, &Analyses::Untagged(&stop), &lex, &l).unwrap();
    let slot = lex.slot("однако").expect("seed lexicon contains однако");
    assert!(vecs[1].slots.contains(&(1043 + slot, 1)));
    assert!(vecs[0].slots.contains(&(2086 + slot, 1)));
    assert_eq!(vecs[1].label, Some(Polarity::Pro));
}
