//! Fold planning, metrics, agreement tables, the OR-rule ensemble and the
//! cross-validated experiment loop.

mod agreement;
mod experiment;
mod folds;
mod metrics;
mod predictions;

pub use agreement::{agreement_table, or_rule_ensemble, AgreementTable, Cells};
pub use experiment::{
    run_ablation, run_experiment, run_experiment_with, run_seed, AblationColumn, AblationReport, ExperimentConfig,
    ExperimentData, ExperimentEvent, ExperimentResult, Fitted, FoldRecord, GridLearner, LabelSource, Learner,
    Predictor, Variant,
};
pub use folds::{
    labeled_items_from_corpus, labeled_items_from_vectors, make_folds, stratified_assignment, FoldPlan, FoldUnit,
    LabeledItem,
};
pub use metrics::{
    compute_metrics, macro_f1, mean_std, metrics, ClassMetrics, FoldMetrics, Metrics, MetricsReport, Summary,
};
pub use predictions::{PredictionRecord, PredictionSet};

use crate::jaas::Polarity;
use crate::learners::LearnError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("too few {class} instances for {needed} folds: found {found}")]
    TooFewInstances { class: Polarity, found: usize, needed: usize },
    #[error("empty prediction set")]
    EmptyPredictionSet,
    #[error("misaligned prediction sets: {0}")]
    Misaligned(String),
    #[error("fold plan does not match the data: {0}")]
    PlanMismatch(String),
    #[error("duplicate ADU `{0}`")]
    DuplicateAdu(String),
    #[error("prediction file line {line}: {message}")]
    BadLine { line: usize, message: String },
    #[error("run {run}, fold {fold}: {source}")]
    Learn {
        run: usize,
        fold: usize,
        #[source]
        source: LearnError,
    },
    #[error("{0}")]
    Config(String),
}

impl EvalError {
    /// Violations of the evaluation protocol, as opposed to bad input files.
    pub fn is_protocol_violation(&self) -> bool {
        matches!(
            self,
            EvalError::Misaligned(_) | EvalError::PlanMismatch(_) | EvalError::DuplicateAdu(_)
        )
    }
}
