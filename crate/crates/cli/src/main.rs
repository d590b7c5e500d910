mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use argmine_core::eval::{EvalError, FoldUnit, Variant};
use argmine_core::features::FeatureSet;
use argmine_core::jaas::Polarity;
use argmine_core::learners::LearnerKind;
use clap::{Args, Parser, Subcommand};

/// Argumentative discourse unit stance classification: corpus conversion,
/// feature extraction, cross-validated learners and evaluation.
#[derive(Debug, Parser)]
#[command(name = "argmine", version)]
pub struct Cli {
    /// Worker threads (defaults to the number of cores). Results do not depend on it.
    #[arg(long, short = 'j', global = true)]
    jobs: Option<usize>,
    /// Log progress to stderr.
    #[arg(long, short = 'v', global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert ArgMicro XML or PersEssays brat files into a JAAS corpus.
    Convert(ConvertArgs),
    /// Print text, ADU and edge counts of one or more JAAS corpora.
    Stats(StatsArgs),
    /// Turn a JAAS corpus into context feature vectors (JSONL).
    Featurize(FeaturizeArgs),
    /// Write a stratified, seeded outer-fold plan.
    Folds(FoldsArgs),
    /// Fit one model on every labeled vector of a feature file.
    Train(TrainArgs),
    /// Apply a trained model to a feature file, writing a prediction file.
    Predict(PredictArgs),
    /// Run a cross-validated experiment, or score existing prediction files.
    Eval(EvalArgs),
    /// Run an experiment once per feature-set ablation.
    Ablate(ExperimentArgs),
    /// Combine two prediction files with the minority-class OR rule.
    Ensemble(EnsembleArgs),
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// Directory of ArgMicro `*.xml` files.
    #[arg(long, conflicts_with = "persessays", required_unless_present = "persessays")]
    pub argmicro: Option<PathBuf>,
    /// Directory of PersEssays `*.txt` + `*.ann` pairs.
    #[arg(long)]
    pub persessays: Option<PathBuf>,
    /// Example-template phrases, one per line (defaults to the shipped list).
    #[arg(long)]
    pub templates: Option<PathBuf>,
    /// Reviewed candidate file; every row's decision is applied.
    #[arg(long, conflicts_with = "skip_exa")]
    pub review: Option<PathBuf>,
    /// Where to write the candidate file for review (default: `<output>.review.tsv`).
    #[arg(long)]
    pub review_out: Option<PathBuf>,
    /// Skip example detection; candidate edges stay `sup`.
    #[arg(long)]
    pub skip_exa: bool,
    /// Run manifest supplying `paths.templates`.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file.
    #[arg(long, short = 'o')]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// JAAS corpus files; with several, a combined row is added.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Print the table as JSON instead.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct FeaturizeArgs {
    /// JAAS corpus file.
    #[arg(long)]
    pub jaas: PathBuf,
    /// Tagged token file (CoNLL-style TSV). Without it only lexical and
    /// punctuation features are produced.
    #[arg(long)]
    pub tagged: Option<PathBuf>,
    /// Marker lexicon (`phrase<TAB>category`); defaults to the shipped one.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Stop-word list, one lemma per line; defaults to the shipped one.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Run manifest supplying lexicon, stop-word and tagged paths.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file.
    #[arg(long, short = 'o')]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct FoldsArgs {
    /// Feature file whose labeled vectors are partitioned.
    #[arg(long, conflicts_with = "jaas", required_unless_present = "jaas")]
    pub features: Option<PathBuf>,
    /// JAAS corpus whose pro/opp ADUs are partitioned.
    #[arg(long)]
    pub jaas: Option<PathBuf>,
    /// Number of folds.
    #[arg(long, short = 'k', default_value_t = 5)]
    pub k: usize,
    /// Shuffling seed.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// `adu` or `document`.
    #[arg(long, default_value = "adu", value_parser = parse_unit)]
    pub unit: FoldUnit,
    /// Output file.
    #[arg(long, short = 'o')]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Feature file; only labeled vectors are used.
    #[arg(long)]
    pub features: PathBuf,
    /// svm, bagging or gbt (overrides the manifest).
    #[arg(long)]
    pub model: Option<LearnerKind>,
    /// Feature set (overrides the manifest).
    #[arg(long)]
    pub feature_set: Option<FeatureSet>,
    /// Training seed (overrides the manifest).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Select hyperparameters by inner cross-validation over the grid.
    #[arg(long)]
    pub grid: bool,
    /// Marker lexicon the features were built with (sets the dimension).
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Run manifest supplying hyperparameters.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file.
    #[arg(long, short = 'o')]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model file written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// Feature file; unlabeled vectors are skipped.
    #[arg(long)]
    pub features: PathBuf,
    /// Output file.
    #[arg(long, short = 'o')]
    pub output: PathBuf,
}

#[derive(Debug, Args, Clone)]
pub struct ExperimentArgs {
    /// Run manifest (TOML); flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// am-am, pe-pe, ampe-am or ampe-pe.
    #[arg(long)]
    pub variant: Option<Variant>,
    /// svm, bagging or gbt.
    #[arg(long)]
    pub model: Option<LearnerKind>,
    /// lexical_only, all_without_markers, all_without_prev or all.
    #[arg(long)]
    pub feature_set: Option<FeatureSet>,
    /// Base seed; run r uses a seed derived from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Repetitions of the whole cross-validation.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Inner folds for hyperparameter selection.
    #[arg(long)]
    pub inner_k: Option<usize>,
    /// ArgMicro feature file.
    #[arg(long)]
    pub argmicro_features: Option<PathBuf>,
    /// PersEssays feature file.
    #[arg(long)]
    pub persessays_features: Option<PathBuf>,
    /// Fold plan over the test corpus.
    #[arg(long)]
    pub plan: Option<PathBuf>,
    /// Marker lexicon the features were built with (sets the dimension).
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Directory for predictions and reports (created if absent).
    #[arg(long, short = 'o')]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Score these prediction files (concatenated) instead of running an experiment.
    #[arg(long, num_args = 1.., conflicts_with_all = ["config", "variant", "model", "plan"])]
    pub predictions: Vec<PathBuf>,
    /// Write the metrics report as JSON here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub experiment: ExperimentArgs,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    /// First prediction file.
    pub a: PathBuf,
    /// Second prediction file covering the same ADUs and runs.
    pub b: PathBuf,
    /// Class predicted whenever either parent predicts it.
    #[arg(long, default_value = "opp")]
    pub minority: Polarity,
    /// Output file.
    #[arg(long, short = 'o')]
    pub output: PathBuf,
}

fn parse_unit(s: &str) -> Result<FoldUnit, String> {
    match s {
        "adu" => Ok(FoldUnit::Adu),
        "document" | "doc" => Ok(FoldUnit::Document),
        _ => Err(format!("unknown fold unit `{s}` (expected adu or document)")),
    }
}

/// 3 for evaluation-protocol violations, 2 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    let protocol = err
        .chain()
        .any(|e| e.downcast_ref::<EvalError>().is_some_and(EvalError::is_protocol_violation));
    if protocol {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn })
        .parse_env("RUST_LOG")
        .format_timestamp(None)
        .init();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} workers: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
