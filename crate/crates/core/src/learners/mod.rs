//! Linear SVM, bagged CART trees and Newton-boosted trees, written from
//! scratch over sparse rows, plus nested grid search.
//!
//! Labels are binary with opp as the positive class. Every decision rule
//! breaks a tie at its threshold towards pro.

mod bagging;
mod gbt;
mod grid;
mod svm;
pub mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bagging::{train_bagging, train_cart, BaggingModel};
pub use gbt::{grad_hess, logistic_loss, sigmoid, train_gbt, train_gbt_with, GbtModel};
pub use grid::{default_grid, grid_search, GridReport};
pub use svm::{svm_objective, train_svm, SvmModel};

use crate::features::{FeatureLayout, FeatureSet, FeatureVector};
use crate::jaas::Polarity;

pub type SparseRow = Vec<(usize, f64)>;

/// Value of feature `f` in a row sorted by feature index.
pub fn value_at(row: &[(usize, f64)], f: usize) -> f64 {
    match row.binary_search_by_key(&f, |e| e.0) {
        Ok(i) => row[i].1,
        Err(_) => 0.0,
    }
}

/// Labeled sparse design matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub dim: usize,
    pub ids: Vec<String>,
    pub rows: Vec<SparseRow>,
    pub labels: Vec<Polarity>,
}

impl Dataset {
    pub fn new(dim: usize) -> Dataset {
        Dataset {
            dim,
            ..Dataset::default()
        }
    }

    /// Adds a row; entries are sorted and zero values dropped.
    pub fn push(&mut self, id: impl Into<String>, mut row: SparseRow, label: Polarity) {
        row.retain(|e| e.1 != 0.0);
        row.sort_by_key(|e| e.0);
        assert!(row.last().is_none_or(|e| e.0 < self.dim), "feature index out of range");
        self.ids.push(id.into());
        self.rows.push(row);
        self.labels.push(label);
    }

    /// Labeled vectors only, restricted to `set`; ids are `doc_id:adu_id`.
    pub fn from_vectors<'a>(
        vectors: impl IntoIterator<Item = &'a FeatureVector>,
        layout: &FeatureLayout,
        set: FeatureSet,
    ) -> Dataset {
        let mut d = Dataset::new(layout.total_dim());
        for v in vectors {
            if let Some(label) = v.label {
                let row = set.apply(&v.slots, layout).into_iter().map(|(s, c)| (s, c as f64)).collect();
                d.push(v.key(), row, label);
            }
        }
        d
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            dim: self.dim,
            ids: idx.iter().map(|&i| self.ids[i].clone()).collect(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// `(pro, opp)` counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let opp = self.labels.iter().filter(|l| l.is_opp()).count();
        (self.len() - opp, opp)
    }

    fn check_trainable(&self) -> Result<(), LearnError> {
        match self.class_counts() {
            (0, 0) => Err(LearnError::DegenerateData("no training examples".into())),
            (0, _) => Err(LearnError::DegenerateData("no pro examples".into())),
            (_, 0) => Err(LearnError::DegenerateData("no opp examples".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LearnError {
    #[error("degenerate training data: {0}")]
    DegenerateData(String),
    #[error("dimension mismatch: model expects {expected} features, input has {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty hyperparameter grid")]
    EmptyGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LearnerKind {
    Svm,
    Bagging,
    Gbt,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 3] = [LearnerKind::Svm, LearnerKind::Bagging, LearnerKind::Gbt];

    pub fn as_str(self) -> &'static str {
        match self {
            LearnerKind::Svm => "svm",
            LearnerKind::Bagging => "bagging",
            LearnerKind::Gbt => "gbt",
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LearnerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        LearnerKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown model kind `{s}` (expected svm, bagging or gbt)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmParams {
    pub c: f64,
    pub max_epochs: usize,
    /// Relative objective change that ends training.
    pub tol: f64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            max_epochs: 200,
            tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaggingParams {
    pub n_trees: usize,
    /// `None` grows trees until leaves are pure or unsplittable.
    pub max_depth: Option<usize>,
    pub bootstrap: bool,
}

impl Default for BaggingParams {
    fn default() -> Self {
        BaggingParams {
            n_trees: 100,
            max_depth: None,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbtParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub l2_lambda: f64,
}

impl Default for GbtParams {
    fn default() -> Self {
        GbtParams {
            n_trees: 150,
            max_depth: 8,
            learning_rate: 0.3,
            l2_lambda: 1.0,
        }
    }
}

/// One concrete learner configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Params {
    Svm(SvmParams),
    Bagging(BaggingParams),
    Gbt(GbtParams),
}

impl Params {
    pub fn kind(&self) -> LearnerKind {
        match self {
            Params::Svm(_) => LearnerKind::Svm,
            Params::Bagging(_) => LearnerKind::Bagging,
            Params::Gbt(_) => LearnerKind::Gbt,
        }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Params::Svm(p) => write!(f, "svm(C={})", p.c),
            Params::Bagging(p) => match p.max_depth {
                Some(d) => write!(f, "bagging(n_trees={}, max_depth={d})", p.n_trees),
                None => write!(f, "bagging(n_trees={})", p.n_trees),
            },
            Params::Gbt(p) => write!(
                f,
                "gbt(n_trees={}, max_depth={}, lr={}, lambda={})",
                p.n_trees, p.max_depth, p.learning_rate, p.l2_lambda
            ),
        }
    }
}

/// Base settings for all three learners plus the run seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperParams {
    pub svm: SvmParams,
    pub bagging: BaggingParams,
    pub gbt: GbtParams,
    pub seed: u64,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            svm: SvmParams::default(),
            bagging: BaggingParams::default(),
            gbt: GbtParams::default(),
            seed: 42,
        }
    }
}

impl HyperParams {
    pub fn params(&self, kind: LearnerKind) -> Params {
        match kind {
            LearnerKind::Svm => Params::Svm(self.svm),
            LearnerKind::Bagging => Params::Bagging(self.bagging),
            LearnerKind::Gbt => Params::Gbt(self.gbt),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelBody {
    Svm(SvmModel),
    Bagging(BaggingModel),
    Gbt(GbtModel),
}

/// A trained classifier with the settings that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub dim: usize,
    pub params: Params,
    pub seed: u64,
    pub model: ModelBody,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Polarity,
    /// Signed margin (svm), opp vote fraction (bagging) or opp probability (gbt).
    pub score: f64,
}

impl TrainedModel {
    pub fn kind(&self) -> LearnerKind {
        self.params.kind()
    }

    pub fn score(&self, row: &[(usize, f64)]) -> Result<f64, LearnError> {
        if let Some(&(f, _)) = row.iter().find(|e| e.0 >= self.dim) {
            return Err(LearnError::DimensionMismatch {
                expected: self.dim,
                found: f + 1,
            });
        }
        Ok(match &self.model {
            ModelBody::Svm(m) => m.margin(row),
            ModelBody::Bagging(m) => m.vote_fraction(row),
            ModelBody::Gbt(m) => m.probability(row),
        })
    }

    /// Score above the threshold (0 for svm, ½ otherwise) → opp.
    pub fn threshold(&self) -> f64 {
        match self.model {
            ModelBody::Svm(_) => 0.0,
            _ => 0.5,
        }
    }

    pub fn predict_row(&self, row: &[(usize, f64)]) -> Result<Prediction, LearnError> {
        let score = self.score(row)?;
        let label = if score > self.threshold() { Polarity::Opp } else { Polarity::Pro };
        Ok(Prediction { label, score })
    }

    pub fn predict(&self, data: &Dataset) -> Result<Vec<Prediction>, LearnError> {
        if data.dim != self.dim {
            return Err(LearnError::DimensionMismatch {
                expected: self.dim,
                found: data.dim,
            });
        }
        data.rows.iter().map(|r| self.predict_row(r)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<TrainedModel, serde_json::Error> {
        serde_json::from_str(text)
    }
}

pub fn train(data: &Dataset, params: &Params, seed: u64) -> Result<TrainedModel, LearnError> {
    data.check_trainable()?;
    let model = match params {
        Params::Svm(p) => ModelBody::Svm(train_svm(data, p, seed)),
        Params::Bagging(p) => ModelBody::Bagging(train_bagging(data, p, seed)),
        Params::Gbt(p) => ModelBody::Gbt(train_gbt(data, p)),
    };
    Ok(TrainedModel {
        dim: data.dim,
        params: *params,
        seed,
        model,
    })
}
