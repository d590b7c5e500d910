use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::folds::FoldPlan;
use super::metrics::{compute_metrics, mean_std, MetricsReport};
use super::predictions::{PredictionRecord, PredictionSet};
use super::EvalError;
use crate::features::{FeatureLayout, FeatureSet, FeatureVector};
use crate::jaas::{Polarity, SourceCorpus};
use crate::learners::{
    default_grid, grid_search, train, Dataset, HyperParams, LearnError, LearnerKind, Params, Prediction, SparseRow,
    TrainedModel,
};
use crate::seed::derive_seed;

/// Train/test corpus combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "am-am")]
    AmAm,
    #[serde(rename = "pe-pe")]
    PePe,
    #[serde(rename = "ampe-am")]
    AmPeAm,
    #[serde(rename = "ampe-pe")]
    AmPePe,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::AmAm, Variant::PePe, Variant::AmPeAm, Variant::AmPePe];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::AmAm => "am-am",
            Variant::PePe => "pe-pe",
            Variant::AmPeAm => "ampe-am",
            Variant::AmPePe => "ampe-pe",
        }
    }

    pub fn test_corpus(self) -> SourceCorpus {
        match self {
            Variant::AmAm | Variant::AmPeAm => SourceCorpus::Argmicro,
            Variant::PePe | Variant::AmPePe => SourceCorpus::Persessays,
        }
    }

    pub fn train_corpora(self) -> &'static [SourceCorpus] {
        match self {
            Variant::AmAm => &[SourceCorpus::Argmicro],
            Variant::PePe => &[SourceCorpus::Persessays],
            Variant::AmPeAm | Variant::AmPePe => &[SourceCorpus::Argmicro, SourceCorpus::Persessays],
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown variant `{s}` (expected am-am, pe-pe, ampe-am or ampe-pe)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub variant: Variant,
    pub model: LearnerKind,
    #[serde(default = "default_feature_set")]
    pub feature_set: FeatureSet,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_inner_k")]
    pub inner_k: usize,
    #[serde(default)]
    pub hyper: HyperParams,
    /// Replaces the default grid for `model` when set.
    #[serde(default)]
    pub grid: Option<Vec<Params>>,
}

fn default_feature_set() -> FeatureSet {
    FeatureSet::All
}
fn default_seed() -> u64 {
    42
}
fn default_runs() -> usize {
    1
}
fn default_inner_k() -> usize {
    3
}

impl ExperimentConfig {
    pub fn new(variant: Variant, model: LearnerKind) -> Self {
        ExperimentConfig {
            variant,
            model,
            feature_set: FeatureSet::All,
            seed: default_seed(),
            runs: 1,
            inner_k: 3,
            hyper: HyperParams::default(),
            grid: None,
        }
    }

    pub fn grid(&self) -> Vec<Params> {
        self.grid.clone().unwrap_or_else(|| default_grid(self.model, &self.hyper))
    }

    pub fn model_name(&self) -> String {
        format!("{}:{}", self.model, self.feature_set)
    }
}

/// Feature vectors per corpus plus their layout.
#[derive(Debug, Clone, Copy)]
pub struct ExperimentData<'a> {
    pub argmicro: Option<&'a [FeatureVector]>,
    pub persessays: Option<&'a [FeatureVector]>,
    pub layout: FeatureLayout,
}

impl<'a> ExperimentData<'a> {
    fn corpus(&self, c: SourceCorpus) -> Result<&'a [FeatureVector], EvalError> {
        match c {
            SourceCorpus::Argmicro => self.argmicro,
            SourceCorpus::Persessays => self.persessays,
        }
        .ok_or_else(|| EvalError::Config(format!("{} features are required", c.as_str())))
    }
}

/// Read access to gold labels by qualified ADU key.
pub trait LabelSource: Sync {
    fn label(&self, key: &str) -> Option<Polarity>;
}

impl LabelSource for HashMap<String, Polarity> {
    fn label(&self, key: &str) -> Option<Polarity> {
        self.get(key).copied()
    }
}

pub trait Predictor: Send + Sync {
    fn predict(&self, rows: &[SparseRow]) -> Result<Vec<Prediction>, LearnError>;
}

impl Predictor for TrainedModel {
    fn predict(&self, rows: &[SparseRow]) -> Result<Vec<Prediction>, LearnError> {
        rows.iter().map(|r| self.predict_row(r)).collect()
    }
}

pub struct Fitted {
    pub predictor: Box<dyn Predictor>,
    pub description: String,
}

pub trait Learner: Sync {
    fn fit(&self, train: &Dataset, seed: u64) -> Result<Fitted, LearnError>;
}

/// Nested grid search followed by a refit on the whole training split.
pub struct GridLearner {
    pub grid: Vec<Params>,
    pub inner_k: usize,
}

impl Learner for GridLearner {
    fn fit(&self, data: &Dataset, seed: u64) -> Result<Fitted, LearnError> {
        let report = grid_search(data, &self.grid, self.inner_k, seed)?;
        let model = train(data, &report.best, seed)?;
        Ok(Fitted {
            predictor: Box::new(model),
            description: report.best.to_string(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentEvent {
    FoldStart { run: usize, fold: usize },
    TestPredicted { run: usize, fold: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub run: usize,
    pub fold: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub selected: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub report: MetricsReport,
    pub predictions: PredictionSet,
    pub folds: Vec<FoldRecord>,
}

struct PoolEntry {
    corpus: SourceCorpus,
    row: SparseRow,
    labeled: bool,
}

/// Seed of run `run`.
pub fn run_seed(seed: u64, run: usize) -> u64 {
    derive_seed(seed, run as u64)
}

pub fn run_experiment(config: &ExperimentConfig, data: &ExperimentData<'_>, plan: &FoldPlan) -> Result<ExperimentResult, EvalError> {
    let mut labels = HashMap::new();
    for c in config.variant.train_corpora() {
        for v in data.corpus(*c)? {
            if let Some(l) = v.label {
                labels.insert(v.key(), l);
            }
        }
    }
    let learner = GridLearner {
        grid: config.grid(),
        inner_k: config.inner_k,
    };
    run_experiment_with(config, data, plan, &labels, &learner, &|_| {})
}

/// The outer cross-validation loop. Labels are only read through `labels`:
/// training labels before fitting, test labels after the test fold has been
/// predicted.
pub fn run_experiment_with(
    config: &ExperimentConfig,
    data: &ExperimentData<'_>,
    plan: &FoldPlan,
    labels: &dyn LabelSource,
    learner: &dyn Learner,
    observer: &(dyn Fn(ExperimentEvent) + Sync),
) -> Result<ExperimentResult, EvalError> {
    let test_corpus = config.variant.test_corpus();
    let mut pool: HashMap<String, PoolEntry> = HashMap::new();
    let mut order: Vec<String> = Vec::new();
    for &c in config.variant.train_corpora() {
        for v in data.corpus(c)? {
            let row = config
                .feature_set
                .apply(&v.slots, &data.layout)
                .into_iter()
                .map(|(s, n)| (s, n as f64))
                .collect();
            let key = v.key();
            if pool.contains_key(&key) {
                return Err(EvalError::DuplicateAdu(key));
            }
            order.push(key.clone());
            pool.insert(
                key,
                PoolEntry {
                    corpus: c,
                    row,
                    labeled: v.label.is_some(),
                },
            );
        }
    }

    let fold_of = plan.fold_of();
    for key in fold_of.keys() {
        match pool.get(*key) {
            Some(e) if e.corpus == test_corpus && e.labeled => {}
            _ => {
                return Err(EvalError::PlanMismatch(format!(
                    "plan key `{key}` is not a labeled {} ADU",
                    test_corpus.as_str()
                )))
            }
        }
    }
    let uncovered = order
        .iter()
        .filter(|k| {
            let e = &pool[k.as_str()];
            e.corpus == test_corpus && e.labeled && !fold_of.contains_key(k.as_str())
        })
        .count();
    if uncovered > 0 {
        return Err(EvalError::PlanMismatch(format!(
            "{uncovered} labeled {} ADUs are not in the fold plan",
            test_corpus.as_str()
        )));
    }

    let dim = data.layout.total_dim();
    let model_name = config.model_name();
    let mut records = Vec::new();
    let mut folds = Vec::new();
    for run in 0..config.runs {
        let seed = run_seed(config.seed, run);
        for (fold, test_keys) in plan.folds.iter().enumerate() {
            observer(ExperimentEvent::FoldStart { run, fold });
            let test_set: HashSet<&str> = test_keys.iter().map(String::as_str).collect();
            let mut train_set = Dataset::new(dim);
            for key in &order {
                let e = &pool[key.as_str()];
                if !e.labeled || test_set.contains(key.as_str()) || (e.corpus == test_corpus && !fold_of.contains_key(key.as_str())) {
                    continue;
                }
                let label = labels
                    .label(key)
                    .ok_or_else(|| EvalError::PlanMismatch(format!("no label for training ADU `{key}`")))?;
                train_set.push(key.clone(), e.row.clone(), label);
            }
            let fitted = learner
                .fit(&train_set, derive_seed(seed, fold as u64))
                .map_err(|source| EvalError::Learn { run, fold, source })?;
            let rows: Vec<SparseRow> = test_keys.iter().map(|k| pool[k.as_str()].row.clone()).collect();
            let preds = fitted
                .predictor
                .predict(&rows)
                .map_err(|source| EvalError::Learn { run, fold, source })?;
            observer(ExperimentEvent::TestPredicted { run, fold });

            for (key, p) in test_keys.iter().zip(preds) {
                let gold = labels
                    .label(key)
                    .ok_or_else(|| EvalError::PlanMismatch(format!("no label for test ADU `{key}`")))?;
                records.push(PredictionRecord {
                    adu_id: key.clone(),
                    gold,
                    pred: p.label,
                    score: p.score,
                    model: model_name.clone(),
                    fold,
                    run,
                });
            }
            folds.push(FoldRecord {
                run,
                fold,
                train_size: train_set.len(),
                test_size: test_keys.len(),
                selected: fitted.description,
            });
        }
    }
    let predictions = PredictionSet::new(records)?;
    Ok(ExperimentResult {
        config: config.clone(),
        report: compute_metrics(&predictions)?,
        predictions,
        folds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationColumn {
    pub feature_set: FeatureSet,
    pub macro_f1_mean: f64,
    pub macro_f1_std: f64,
    pub macro_f1_pooled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub variant: Variant,
    pub model: LearnerKind,
    pub columns: Vec<AblationColumn>,
}

impl AblationReport {
    pub fn column(&self, set: FeatureSet) -> Option<&AblationColumn> {
        self.columns.iter().find(|c| c.feature_set == set)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        write!(out, "{:<10}", "variant").unwrap();
        for c in &self.columns {
            write!(out, "{:>22}", c.feature_set.name()).unwrap();
        }
        out.push('\n');
        write!(out, "{:<10}", self.variant.as_str()).unwrap();
        for c in &self.columns {
            write!(out, "{:>22}", format!("{:.4}±{:.4}", c.macro_f1_mean, c.macro_f1_std)).unwrap();
        }
        out.push('\n');
        out
    }
}

/// Macro-F1 of `base` under each ablation feature set, on the same plan.
pub fn run_ablation(base: &ExperimentConfig, data: &ExperimentData<'_>, plan: &FoldPlan) -> Result<AblationReport, EvalError> {
    let mut columns = Vec::new();
    for set in FeatureSet::ABLATION_ORDER {
        let config = ExperimentConfig {
            feature_set: set,
            ..base.clone()
        };
        let result = run_experiment(&config, data, plan)?;
        let f1s: Vec<f64> = result.report.per_fold.iter().map(|f| f.metrics.macro_f1).collect();
        let (mean, std) = mean_std(&f1s);
        columns.push(AblationColumn {
            feature_set: set,
            macro_f1_mean: mean,
            macro_f1_std: std,
            macro_f1_pooled: result.report.pooled.macro_f1,
        });
    }
    Ok(AblationReport {
        variant: base.variant,
        model: base.model,
        columns,
    })
}
