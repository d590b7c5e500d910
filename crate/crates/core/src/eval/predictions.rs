use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::jaas::Polarity;

/// One line of a prediction file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub adu_id: String,
    pub gold: Polarity,
    pub pred: Polarity,
    pub score: f64,
    pub model: String,
    pub fold: usize,
    pub run: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PredictionSet {
    pub records: Vec<PredictionRecord>,
}

impl PredictionSet {
    pub fn new(records: Vec<PredictionRecord>) -> Result<PredictionSet, EvalError> {
        let mut seen = HashSet::new();
        for r in &records {
            if !seen.insert((r.run, r.adu_id.as_str())) {
                return Err(EvalError::DuplicateAdu(r.adu_id.clone()));
            }
        }
        Ok(PredictionSet { records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records of a single run.
    pub fn run(&self, run: usize) -> PredictionSet {
        PredictionSet {
            records: self.records.iter().filter(|r| r.run == run).cloned().collect(),
        }
    }

    pub fn runs(&self) -> Vec<usize> {
        let mut runs: Vec<usize> = self.records.iter().map(|r| r.run).collect();
        runs.sort_unstable();
        runs.dedup();
        runs
    }

    pub fn by_adu(&self) -> HashMap<&str, &PredictionRecord> {
        self.records.iter().map(|r| (r.adu_id.as_str(), r)).collect()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<PredictionSet, EvalError> {
        let records = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|e| EvalError::BadLine {
                    line: i + 1,
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        PredictionSet::new(records)
    }
}
