use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use argmine_core::convert::{
    apply_review, parse_argmicro, parse_persessays, read_review_file, to_jaas_argmicro, to_jaas_persessays,
    write_review_file, ReviewRow, TemplateLexicon,
};
use argmine_core::eval::{
    agreement_table, compute_metrics, labeled_items_from_corpus, labeled_items_from_vectors, make_folds,
    or_rule_ensemble, run_ablation, run_experiment, ExperimentConfig, ExperimentData, FoldPlan, MetricsReport,
    PredictionRecord, PredictionSet,
};
use argmine_core::features::{featurize_corpus, read_feature_file, Analyses, FeatureLayout, FeatureSet, FeatureVector};
use argmine_core::jaas::{corpus_stats, validate_graph, CorpusStats, EdgeType, JaasCorpus, Role};
use argmine_core::learners::{default_grid, grid_search, train, Dataset, TrainedModel};
use argmine_core::textprep::{load_lexicon, load_tagged, MarkerLexicon, StopWords};
use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::{
    Command, ConvertArgs, EnsembleArgs, EvalArgs, ExperimentArgs, FeaturizeArgs, FoldsArgs, PredictArgs, StatsArgs,
    TrainArgs,
};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Convert(a) => convert(a),
        Command::Stats(a) => stats(a),
        Command::Featurize(a) => featurize(a),
        Command::Folds(a) => folds(a),
        Command::Train(a) => train_cmd(a),
        Command::Predict(a) => predict(a),
        Command::Eval(a) => eval(a),
        Command::Ablate(a) => ablate(a),
        Command::Ensemble(a) => ensemble(a),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Files in `dir` with extension `ext`, sorted by name.
fn files_with_ext(dir: &Path, ext: &str) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        bail!("input directory {} does not exist", dir.display());
    }
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    out.sort();
    Ok(out)
}

fn load_corpus(path: &Path) -> Result<JaasCorpus> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    JaasCorpus::from_json(&bytes).with_context(|| format!("{}: not a JAAS corpus", path.display()))
}

fn lexicon(path: Option<&Path>) -> Result<MarkerLexicon> {
    match path {
        None => Ok(MarkerLexicon::seed()),
        Some(p) => {
            let (lex, warning) = load_lexicon(&read(p)?).with_context(|| format!("{}", p.display()))?;
            if let Some(w) = warning {
                warn!("{}: {w}", p.display());
            }
            Ok(lex)
        }
    }
}

fn load_features(path: &Path, layout: &FeatureLayout) -> Result<Vec<FeatureVector>> {
    let vectors = read_feature_file(&read(path)?).with_context(|| format!("{}", path.display()))?;
    let dim = layout.total_dim();
    if let Some(v) = vectors.iter().find(|v| v.slots.iter().any(|s| s.0 >= dim)) {
        bail!(
            "{}: vector {} has a slot beyond dimension {dim}; was it built with a different lexicon?",
            path.display(),
            v.key()
        );
    }
    Ok(vectors)
}

// ---------------------------------------------------------------- convert

fn convert(a: ConvertArgs) -> Result<()> {
    let cfg = RunConfig::load_opt(a.config.as_deref())?;
    let mut corpus;
    let mut candidates: Vec<ReviewRow> = Vec::new();
    if let Some(dir) = &a.argmicro {
        corpus = JaasCorpus::new("argmicro");
        for f in files_with_ext(dir, "xml")? {
            let bytes = fs::read(&f).with_context(|| format!("reading {}", f.display()))?;
            let graph = parse_argmicro(&bytes).with_context(|| format!("{}", f.display()))?;
            corpus.documents.push(to_jaas_argmicro(&graph).with_context(|| format!("{}", f.display()))?);
        }
    } else {
        let dir = a.persessays.as_deref().expect("clap enforces one input");
        let templates = match a.templates.as_ref().or(cfg.paths.templates.as_ref()) {
            Some(p) => TemplateLexicon::parse(&read(p)?).with_context(|| format!("{}", p.display()))?,
            None => TemplateLexicon::seed(),
        };
        corpus = JaasCorpus::new("persessays");
        for ann in files_with_ext(dir, "ann")? {
            let txt = ann.with_extension("txt");
            let doc_id = ann.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let txt_bytes = fs::read(&txt).with_context(|| format!("reading {}", txt.display()))?;
            let ann_bytes = fs::read(&ann).with_context(|| format!("reading {}", ann.display()))?;
            let graph = parse_persessays(&doc_id, &txt_bytes, &ann_bytes).with_context(|| format!("{}", ann.display()))?;
            let out = to_jaas_persessays(&graph, &templates).with_context(|| format!("{}", ann.display()))?;
            if !out.unreachable.is_empty() {
                info!("{doc_id}: {} ADUs unreachable from the major claim, set to neut", out.unreachable.len());
            }
            for edge_id in out.flagged_exa {
                let source = out.document.edge(&edge_id).map(|e| e.source.clone()).unwrap_or_default();
                candidates.push(ReviewRow {
                    edge_id,
                    doc_id: doc_id.clone(),
                    source_text: out.document.node(&source).map(|n| n.text.clone()).unwrap_or_default(),
                    decision: None,
                });
            }
            corpus.documents.push(out.document);
        }
    }

    if let Some(review) = &a.review {
        let rows = read_review_file(&read(review)?).with_context(|| format!("{}", review.display()))?;
        let exa = apply_review(&mut corpus.documents, &rows).with_context(|| format!("{}", review.display()))?;
        info!("review applied: {exa} exa, {} sup", rows.len() - exa);
    } else if !a.skip_exa && !candidates.is_empty() {
        let path = a.review_out.clone().unwrap_or_else(|| {
            let mut p = a.output.clone().into_os_string();
            p.push(".review.tsv");
            p.into()
        });
        write(&path, &write_review_file(&candidates))?;
        warn!(
            "{} example candidates left as sup; fill in {} and rerun with --review",
            candidates.len(),
            path.display()
        );
    }

    let mut problems = String::new();
    for doc in &corpus.documents {
        for v in validate_graph(doc).violations {
            writeln!(problems, "  {}: {v}", doc.doc_id).unwrap();
        }
    }
    if !problems.is_empty() {
        bail!("converted graphs failed validation:\n{}", problems.trim_end());
    }
    write(&a.output, &corpus.to_json())?;
    info!("{} documents written to {}", corpus.documents.len(), a.output.display());
    Ok(())
}

// ---------------------------------------------------------------- stats

fn thousands(n: usize) -> String {
    let s = n.to_string();
    let mut out = String::new();
    for (i, c) in s.chars().enumerate() {
        if i > 0 && (s.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

#[derive(Serialize)]
struct StatsRow<'a> {
    corpus: String,
    #[serde(flatten)]
    stats: &'a CorpusStats,
}

const STATS_ROLES: [Role; 4] = [Role::Pro, Role::Opp, Role::Mcl, Role::Neut];

fn stats_row(out: &mut String, name: &str, s: &CorpusStats) {
    write!(out, "{name:<24}{:>7}", thousands(s.texts)).unwrap();
    for r in STATS_ROLES {
        let c = s.role(r);
        write!(out, "{:>17}", format!("{} ({:.1}%)", thousands(c.count), c.percent)).unwrap();
    }
    let all = if s.adus_total == 0 { 0.0 } else { 100.0 };
    writeln!(out, "{:>17}", format!("{} ({all:.0}%)", thousands(s.adus_total))).unwrap();
}

fn stats(a: StatsArgs) -> Result<()> {
    let corpora = a.files.iter().map(|f| load_corpus(f)).collect::<Result<Vec<_>>>()?;
    let mut problems = 0;
    for c in &corpora {
        for d in &c.documents {
            let report = validate_graph(d);
            for v in &report.violations {
                eprintln!("{}: {v}", d.doc_id);
            }
            problems += report.violations.len();
        }
    }
    if problems > 0 {
        bail!("{problems} schema violations");
    }
    let mut rows: Vec<(String, CorpusStats)> =
        corpora.iter().map(|c| (c.corpus.clone(), corpus_stats(&c.documents))).collect();
    if corpora.len() > 1 {
        let name = corpora.iter().map(|c| c.corpus.as_str()).collect::<Vec<_>>().join(" + ");
        rows.push((name, corpus_stats(corpora.iter().flat_map(|c| &c.documents))));
    }
    if a.json {
        let json: Vec<StatsRow> = rows.iter().map(|(n, s)| StatsRow { corpus: n.clone(), stats: s }).collect();
        println!("{}", serde_json::to_string_pretty(&json)?);
        return Ok(());
    }
    let mut out = String::new();
    write!(out, "{:<24}{:>7}", "corpus", "texts").unwrap();
    for r in STATS_ROLES {
        write!(out, "{:>17}", r.as_str()).unwrap();
    }
    writeln!(out, "{:>17}", "all").unwrap();
    for (name, s) in &rows {
        stats_row(&mut out, name, s);
    }
    out.push('\n');
    for (name, s) in &rows {
        let edges: Vec<String> = EdgeType::ALL.iter().map(|t| format!("{t} {}", thousands(s.edges(*t)))).collect();
        writeln!(out, "{name}: edges {}; seg {}; dual-mcl texts {}", edges.join(", "), thousands(s.adus_total), s.dual_mcl_texts)
            .unwrap();
    }
    print!("{out}");
    Ok(())
}

// ---------------------------------------------------------------- featurize / folds

fn featurize(a: FeaturizeArgs) -> Result<()> {
    let cfg = RunConfig::load_opt(a.config.as_deref())?;
    let corpus = load_corpus(&a.jaas)?;
    let lex = lexicon(a.lexicon.as_deref().or(cfg.paths.lexicon.as_deref()))?;
    let stop = match a.stopwords.as_ref().or(cfg.paths.stopwords.as_ref()) {
        Some(p) => StopWords::parse(&read(p)?),
        None => StopWords::seed(),
    };
    let vectors = match a.tagged.as_ref().or(cfg.paths.tagged.as_ref()) {
        Some(p) => {
            let bytes = fs::read(p).with_context(|| format!("reading {}", p.display()))?;
            let tagged: HashMap<_, _> =
                load_tagged(&bytes, &stop).with_context(|| format!("{}", p.display()))?.into_iter().collect();
            featurize_corpus(&corpus, &Analyses::Tagged(&tagged), &lex)?
        }
        None => {
            warn!("no tagged file: morphosyntactic features will be empty");
            featurize_corpus(&corpus, &Analyses::Untagged(&stop), &lex)?
        }
    };
    write(&a.output, &argmine_core::features::write_feature_file(&vectors))?;
    info!("{} vectors ({} labeled) written", vectors.len(), vectors.iter().filter(|v| v.label.is_some()).count());
    Ok(())
}

fn folds(a: FoldsArgs) -> Result<()> {
    let items = match (&a.features, &a.jaas) {
        (Some(f), _) => {
            let v = read_feature_file(&read(f)?).with_context(|| format!("{}", f.display()))?;
            labeled_items_from_vectors(&v)
        }
        (None, Some(j)) => labeled_items_from_corpus(&load_corpus(j)?),
        (None, None) => unreachable!("clap enforces one input"),
    };
    let plan = make_folds(&items, a.k, a.seed, a.unit)?;
    write(&a.output, &plan.to_json())?;
    info!("{} ADUs in {} folds", plan.len(), plan.k);
    Ok(())
}

// ---------------------------------------------------------------- train / predict

/// A model together with what is needed to feed it.
#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    feature_set: FeatureSet,
    lexical_dim: usize,
    model: TrainedModel,
}

fn train_cmd(a: TrainArgs) -> Result<()> {
    let cfg = RunConfig::load_opt(a.config.as_deref())?;
    let exp = cfg.experiment.as_ref();
    let kind = a
        .model
        .or(exp.map(|e| e.model))
        .ok_or_else(|| anyhow!("--model is required without a manifest"))?;
    let set = a.feature_set.or(exp.map(|e| e.feature_set)).unwrap_or(FeatureSet::All);
    let hyper = exp.map(|e| e.hyper).unwrap_or_default();
    let seed = a.seed.or(exp.map(|e| e.seed)).unwrap_or(hyper.seed);
    let layout = FeatureLayout::new(lexicon(a.lexicon.as_deref().or(cfg.paths.lexicon.as_deref()))?.len());
    let vectors = load_features(&a.features, &layout)?;
    let data = Dataset::from_vectors(&vectors, &layout, set);
    let params = if a.grid {
        let grid = exp.and_then(|e| e.grid.clone()).unwrap_or_else(|| default_grid(kind, &hyper));
        let inner_k = exp.map_or(3, |e| e.inner_k);
        let report = grid_search(&data, &grid, inner_k, seed)?;
        info!("selected {} (inner macro-F1 {:.4})", report.best, report.scores[report.best_index]);
        report.best
    } else {
        hyper.params(kind)
    };
    let model = train(&data, &params, seed)?;
    let file = ModelFile {
        feature_set: set,
        lexical_dim: layout.lexical_dim,
        model,
    };
    write(&a.output, &(serde_json::to_string(&file)? + "\n"))?;
    info!("trained {params} on {} examples", data.len());
    Ok(())
}

fn predict(a: PredictArgs) -> Result<()> {
    let file: ModelFile =
        serde_json::from_str(&read(&a.model)?).with_context(|| format!("{}: not a model file", a.model.display()))?;
    let layout = FeatureLayout::new(file.lexical_dim);
    let vectors = load_features(&a.features, &layout)?;
    let data = Dataset::from_vectors(&vectors, &layout, file.feature_set);
    let skipped = vectors.len() - data.len();
    if skipped > 0 {
        info!("{skipped} unlabeled vectors skipped");
    }
    let preds = file.model.predict(&data)?;
    let name = format!("{}:{}", file.model.kind(), file.feature_set);
    let records = data
        .ids
        .iter()
        .zip(&data.labels)
        .zip(preds)
        .map(|((id, gold), p)| PredictionRecord {
            adu_id: id.clone(),
            gold: *gold,
            pred: p.label,
            score: p.score,
            model: name.clone(),
            fold: 0,
            run: 0,
        })
        .collect();
    write(&a.output, &PredictionSet::new(records)?.to_jsonl())
}

// ---------------------------------------------------------------- experiments

struct Resolved {
    config: ExperimentConfig,
    argmicro: Option<Vec<FeatureVector>>,
    persessays: Option<Vec<FeatureVector>>,
    layout: FeatureLayout,
    plan: FoldPlan,
    output_dir: Option<PathBuf>,
}

impl Resolved {
    fn data(&self) -> ExperimentData<'_> {
        ExperimentData {
            argmicro: self.argmicro.as_deref(),
            persessays: self.persessays.as_deref(),
            layout: self.layout,
        }
    }
}

fn resolve(a: &ExperimentArgs) -> Result<Resolved> {
    let cfg = RunConfig::load_opt(a.config.as_deref())?;
    let mut config = match (cfg.experiment, a.variant, a.model) {
        (Some(mut c), v, m) => {
            c.variant = v.unwrap_or(c.variant);
            c.model = m.unwrap_or(c.model);
            c
        }
        (None, Some(v), Some(m)) => ExperimentConfig::new(v, m),
        (None, _, _) => bail!("--variant and --model are required without a manifest"),
    };
    if let Some(s) = a.feature_set {
        config.feature_set = s;
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    if let Some(r) = a.runs {
        config.runs = r;
    }
    if let Some(k) = a.inner_k {
        config.inner_k = k;
    }
    if config.runs == 0 {
        bail!("runs must be at least 1");
    }
    let layout = FeatureLayout::new(lexicon(a.lexicon.as_deref().or(cfg.paths.lexicon.as_deref()))?.len());
    let load = |flag: &Option<PathBuf>, conf: &Option<PathBuf>| -> Result<Option<Vec<FeatureVector>>> {
        flag.as_ref().or(conf.as_ref()).map(|p| load_features(p, &layout)).transpose()
    };
    let argmicro = load(&a.argmicro_features, &cfg.paths.argmicro_features)?;
    let persessays = load(&a.persessays_features, &cfg.paths.persessays_features)?;
    let plan_path = a
        .plan
        .as_ref()
        .or(cfg.paths.plan.as_ref())
        .ok_or_else(|| anyhow!("a fold plan is required (--plan or paths.plan)"))?;
    let plan = FoldPlan::from_json(&read(plan_path)?).with_context(|| format!("{}: not a fold plan", plan_path.display()))?;
    let output_dir = a.output_dir.clone().or(cfg.paths.output_dir);
    if let Some(d) = &output_dir {
        fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    Ok(Resolved {
        config,
        argmicro,
        persessays,
        layout,
        plan,
        output_dir,
    })
}

fn summary_line(report: &MetricsReport) -> String {
    let p = &report.pooled;
    format!(
        "macro-F1 {:.4}  macro-P {:.4}  macro-R {:.4}  accuracy {:.4}  (n = {})",
        p.macro_f1, p.macro_precision, p.macro_recall, p.accuracy, p.n
    )
}

fn eval(a: EvalArgs) -> Result<()> {
    if !a.predictions.is_empty() {
        let mut text = String::new();
        for p in &a.predictions {
            text.push_str(&read(p)?);
            if !text.ends_with('\n') {
                text.push('\n');
            }
        }
        let set = PredictionSet::from_jsonl(&text)?;
        let report = compute_metrics(&set)?;
        let mut models: Vec<&str> = set.records.iter().map(|r| r.model.as_str()).collect();
        models.sort_unstable();
        models.dedup();
        println!("model: {}", models.join(", "));
        print!("{}", report.render());
        println!("{}", summary_line(&report));
        if let Some(p) = &a.report {
            write(p, &report.to_json())?;
        }
        return Ok(());
    }
    let r = resolve(&a.experiment)?;
    let result = run_experiment(&r.config, &r.data(), &r.plan)?;
    println!("variant: {}  model: {}", r.config.variant, r.config.model_name());
    print!("{}", result.report.render());
    println!("{}", summary_line(&result.report));
    if let Some(dir) = &r.output_dir {
        write(&dir.join("predictions.jsonl"), &result.predictions.to_jsonl())?;
        write(&dir.join("report.json"), &result.report.to_json())?;
        write(&dir.join("folds.json"), &(serde_json::to_string_pretty(&result.folds)? + "\n"))?;
    }
    if let Some(p) = &a.report {
        write(p, &result.report.to_json())?;
    }
    Ok(())
}

fn ablate(a: ExperimentArgs) -> Result<()> {
    let r = resolve(&a)?;
    let report = run_ablation(&r.config, &r.data(), &r.plan)?;
    println!("model: {}", r.config.model);
    print!("{}", report.render());
    if let Some(dir) = &r.output_dir {
        write(&dir.join("ablation.json"), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    }
    Ok(())
}

fn ensemble(a: EnsembleArgs) -> Result<()> {
    let load = |p: &Path| -> Result<PredictionSet> {
        PredictionSet::from_jsonl(&read(p)?).with_context(|| format!("{}", p.display()))
    };
    let (sa, sb) = (load(&a.a)?, load(&a.b)?);
    let name = |s: &PredictionSet, fallback: &str| s.records.first().map_or(fallback.to_string(), |r| r.model.clone());
    let table = agreement_table(&sa, &sb)?;
    let merged = or_rule_ensemble(&sa, &sb, a.minority)?;
    let report = compute_metrics(&merged)?;
    print!("{}", table.render(&name(&sa, "a"), &name(&sb, "b")));
    println!();
    print!("{}", report.render());
    println!("{}", summary_line(&report));
    println!("labels changed relative to {}: {}", name(&sa, "a"), count_changed(&sa, &merged));
    write(&a.output, &merged.to_jsonl())
}

fn count_changed(a: &PredictionSet, merged: &PredictionSet) -> usize {
    let m: HashMap<(usize, &str), &PredictionRecord> =
        merged.records.iter().map(|r| ((r.run, r.adu_id.as_str()), r)).collect();
    a.records.iter().filter(|r| m[&(r.run, r.adu_id.as_str())].pred != r.pred).count()
}
