use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::features::{adu_key, FeatureVector};
use crate::jaas::{JaasCorpus, Polarity};
use crate::seed::rng;

/// Fold index per item: each class is shuffled, then all items are dealt
/// round-robin (pro first, opp continuing where pro stopped), so every fold
/// holds ⌊n_c/k⌋ or ⌈n_c/k⌉ items of each class.
pub fn stratified_assignment(labels: &[Polarity], k: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng(seed);
    let mut out = vec![0; labels.len()];
    let mut next = 0;
    for class in Polarity::BOTH {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        for i in members {
            out[i] = next % k;
            next += 1;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FoldUnit {
    Adu,
    Document,
}

/// A labeled ADU as seen by the fold planner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledItem {
    pub key: String,
    pub doc_id: String,
    pub label: Polarity,
}

pub fn labeled_items_from_vectors<'a>(vectors: impl IntoIterator<Item = &'a FeatureVector>) -> Vec<LabeledItem> {
    vectors
        .into_iter()
        .filter_map(|v| {
            v.label.map(|label| LabeledItem {
                key: v.key(),
                doc_id: v.doc_id.clone(),
                label,
            })
        })
        .collect()
}

pub fn labeled_items_from_corpus(corpus: &JaasCorpus) -> Vec<LabeledItem> {
    corpus
        .documents
        .iter()
        .flat_map(|d| {
            d.nodes_in_order().into_iter().filter_map(move |n| {
                n.role.polarity().map(|label| LabeledItem {
                    key: adu_key(&d.doc_id, &n.adu_id),
                    doc_id: d.doc_id.clone(),
                    label,
                })
            })
        })
        .collect()
}

/// Persisted outer-fold partition of the labeled ADUs of one corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub unit: FoldUnit,
    /// Qualified ADU keys (`doc_id:adu_id`) per fold, sorted.
    pub folds: Vec<Vec<String>>,
}

impl FoldPlan {
    pub fn fold_of(&self) -> HashMap<&str, usize> {
        self.folds
            .iter()
            .enumerate()
            .flat_map(|(f, keys)| keys.iter().map(move |k| (k.as_str(), f)))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.folds.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("fold plan serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<FoldPlan, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Seeded stratified k-fold plan. At the ADU level each class is spread
/// evenly over the folds; at the document level whole documents are placed
/// greedily to balance the opp count first and the fold size second.
pub fn make_folds(items: &[LabeledItem], k: usize, seed: u64, unit: FoldUnit) -> Result<FoldPlan, EvalError> {
    if k < 2 {
        return Err(EvalError::Config(format!("k must be at least 2, got {k}")));
    }
    // Both classes must be present and no fold may be empty; a class with
    // fewer than k members simply leaves some folds without it.
    let opp = items.iter().filter(|i| i.label.is_opp()).count();
    let counts = [(Polarity::Pro, items.len() - opp), (Polarity::Opp, opp)];
    for (class, found) in counts {
        if found == 0 {
            return Err(EvalError::TooFewInstances { class, found, needed: 1 });
        }
    }
    if items.len() < k {
        let (class, found) = if opp <= items.len() - opp { counts[1] } else { counts[0] };
        let needed = k - (items.len() - found);
        return Err(EvalError::TooFewInstances { class, found, needed });
    }
    let mut folds: Vec<Vec<String>> = vec![Vec::new(); k];
    match unit {
        FoldUnit::Adu => {
            let labels: Vec<Polarity> = items.iter().map(|i| i.label).collect();
            for (item, f) in items.iter().zip(stratified_assignment(&labels, k, seed)) {
                folds[f].push(item.key.clone());
            }
        }
        FoldUnit::Document => {
            let mut docs: BTreeMap<&str, (usize, Vec<&str>)> = BTreeMap::new();
            for item in items {
                let e = docs.entry(&item.doc_id).or_default();
                e.0 += item.label.is_opp() as usize;
                e.1.push(&item.key);
            }
            let mut order: Vec<(&str, (usize, Vec<&str>))> = docs.into_iter().collect();
            order.shuffle(&mut rng(seed));
            order.sort_by(|a, b| b.1 .0.cmp(&a.1 .0).then(b.1 .1.len().cmp(&a.1 .1.len())));
            let mut load = vec![(0usize, 0usize); k];
            for (_, (opp, keys)) in order {
                let f = (0..k).min_by_key(|&f| (load[f].0, load[f].1, f)).expect("k > 0");
                load[f].0 += opp;
                load[f].1 += keys.len();
                folds[f].extend(keys.into_iter().map(str::to_string));
            }
        }
    }
    for f in &mut folds {
        f.sort();
    }
    Ok(FoldPlan { k, seed, unit, folds })
}
