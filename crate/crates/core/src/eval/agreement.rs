use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::predictions::{PredictionRecord, PredictionSet};
use super::EvalError;
use crate::jaas::Polarity;

/// Correctness cross-tabulation of two classifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Cells {
    pub both_true: usize,
    pub a_true_b_false: usize,
    pub a_false_b_true: usize,
    pub both_false: usize,
}

impl Cells {
    pub fn total(&self) -> usize {
        self.both_true + self.a_true_b_false + self.a_false_b_true + self.both_false
    }

    fn add(&mut self, a_ok: bool, b_ok: bool) {
        match (a_ok, b_ok) {
            (true, true) => self.both_true += 1,
            (true, false) => self.a_true_b_false += 1,
            (false, true) => self.a_false_b_true += 1,
            (false, false) => self.both_false += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementTable {
    pub overall: Cells,
    /// Keyed by gold class.
    pub per_class: BTreeMap<Polarity, Cells>,
}

impl AgreementTable {
    pub fn render(&self, name_a: &str, name_b: &str) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:<10}{:>12}{:>12}{:>12}{:>12}",
            "class",
            "both ok",
            format!("{name_a} only"),
            format!("{name_b} only"),
            "both wrong"
        )
        .unwrap();
        let mut row = |name: &str, c: &Cells| {
            writeln!(
                out,
                "{name:<10}{:>12}{:>12}{:>12}{:>12}",
                c.both_true, c.a_true_b_false, c.a_false_b_true, c.both_false
            )
            .unwrap()
        };
        for (class, c) in &self.per_class {
            row(class.as_str(), c);
        }
        row("all", &self.overall);
        out
    }
}

/// Pair up records by (run, ADU id); both sets must cover the same ADUs in
/// the same runs with the same gold labels.
fn align<'a>(
    a: &'a PredictionSet,
    b: &'a PredictionSet,
) -> Result<Vec<(&'a PredictionRecord, &'a PredictionRecord)>, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::Misaligned(format!("{} vs {} predictions", a.len(), b.len())));
    }
    let b_map: HashMap<(usize, &str), &PredictionRecord> =
        b.records.iter().map(|r| ((r.run, r.adu_id.as_str()), r)).collect();
    a.records
        .iter()
        .map(|ra| {
            let rb = b_map.get(&(ra.run, ra.adu_id.as_str())).ok_or_else(|| {
                EvalError::Misaligned(format!("`{}` (run {}) missing from second set", ra.adu_id, ra.run))
            })?;
            if ra.gold != rb.gold {
                return Err(EvalError::Misaligned(format!("gold labels differ for `{}`", ra.adu_id)));
            }
            Ok((ra, *rb))
        })
        .collect()
}

pub fn agreement_table(a: &PredictionSet, b: &PredictionSet) -> Result<AgreementTable, EvalError> {
    let mut overall = Cells::default();
    let mut per_class: BTreeMap<Polarity, Cells> = Polarity::BOTH.into_iter().map(|p| (p, Cells::default())).collect();
    for (ra, rb) in align(a, b)? {
        let (a_ok, b_ok) = (ra.pred == ra.gold, rb.pred == rb.gold);
        overall.add(a_ok, b_ok);
        per_class.get_mut(&ra.gold).unwrap().add(a_ok, b_ok);
    }
    Ok(AgreementTable { overall, per_class })
}

/// Predict the minority class whenever either parent does. The score is the
/// fraction of parents voting for it; the model field names both parents.
pub fn or_rule_ensemble(a: &PredictionSet, b: &PredictionSet, minority: Polarity) -> Result<PredictionSet, EvalError> {
    let records = align(a, b)?
        .into_iter()
        .map(|(ra, rb)| {
            let votes = (ra.pred == minority) as usize + (rb.pred == minority) as usize;
            PredictionRecord {
                adu_id: ra.adu_id.clone(),
                gold: ra.gold,
                pred: if votes > 0 { minority } else { minority.flip() },
                score: votes as f64 / 2.0,
                model: format!("or({},{})", ra.model, rb.model),
                fold: ra.fold,
                run: ra.run,
            }
        })
        .collect();
    PredictionSet::new(records)
}
