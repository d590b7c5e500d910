use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::predictions::PredictionSet;
use super::EvalError;
use crate::jaas::Polarity;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub per_class: BTreeMap<Polarity, ClassMetrics>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub accuracy: f64,
    pub n: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-class P/R/F1 with empty denominators counted as 0, their unweighted
/// means, and accuracy.
pub fn metrics(gold: &[Polarity], pred: &[Polarity]) -> Metrics {
    assert_eq!(gold.len(), pred.len(), "gold/pred length mismatch");
    let mut per_class = BTreeMap::new();
    for class in Polarity::BOTH {
        let tp = gold.iter().zip(pred).filter(|(g, p)| **g == class && **p == class).count();
        let predicted = pred.iter().filter(|p| **p == class).count();
        let support = gold.iter().filter(|g| **g == class).count();
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, support);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        per_class.insert(
            class,
            ClassMetrics {
                precision,
                recall,
                f1,
                support,
            },
        );
    }
    let mean = |f: fn(&ClassMetrics) -> f64| per_class.values().map(f).sum::<f64>() / 2.0;
    let correct = gold.iter().zip(pred).filter(|(g, p)| g == p).count();
    Metrics {
        macro_precision: mean(|c| c.precision),
        macro_recall: mean(|c| c.recall),
        macro_f1: mean(|c| c.f1),
        accuracy: ratio(correct, gold.len()),
        n: gold.len(),
        per_class,
    }
}

pub fn macro_f1(gold: &[Polarity], pred: &[Polarity]) -> f64 {
    metrics(gold, pred).macro_f1
}

/// Headline numbers summarized across folds.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub pro_f1: f64,
    pub opp_f1: f64,
}

impl Summary {
    fn of(m: &Metrics) -> Summary {
        Summary {
            accuracy: m.accuracy,
            macro_precision: m.macro_precision,
            macro_recall: m.macro_recall,
            macro_f1: m.macro_f1,
            pro_f1: m.per_class[&Polarity::Pro].f1,
            opp_f1: m.per_class[&Polarity::Opp].f1,
        }
    }

    fn fields(&self) -> [f64; 6] {
        [
            self.accuracy,
            self.macro_precision,
            self.macro_recall,
            self.macro_f1,
            self.pro_f1,
            self.opp_f1,
        ]
    }

    fn from_fields(v: [f64; 6]) -> Summary {
        Summary {
            accuracy: v[0],
            macro_precision: v[1],
            macro_recall: v[2],
            macro_f1: v[3],
            pro_f1: v[4],
            opp_f1: v[5],
        }
    }
}

/// Population mean and standard deviation (ddof = 0).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub run: usize,
    pub fold: usize,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// All predictions pooled into one confusion matrix.
    pub pooled: Metrics,
    pub per_fold: Vec<FoldMetrics>,
    pub fold_mean: Summary,
    pub fold_std: Summary,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Aligned console table.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let m = &self.fold_mean;
        let s = &self.fold_std;
        let p = &self.pooled;
        writeln!(out, "{:<16}{:>18}{:>10}", "metric", "fold mean ± std", "pooled").unwrap();
        let rows = [
            ("macro F1", m.macro_f1, s.macro_f1, p.macro_f1),
            ("macro P", m.macro_precision, s.macro_precision, p.macro_precision),
            ("macro R", m.macro_recall, s.macro_recall, p.macro_recall),
            ("accuracy", m.accuracy, s.accuracy, p.accuracy),
            ("F1 pro", m.pro_f1, s.pro_f1, p.per_class[&Polarity::Pro].f1),
            ("F1 opp", m.opp_f1, s.opp_f1, p.per_class[&Polarity::Opp].f1),
        ];
        for (name, mean, std, pooled) in rows {
            writeln!(out, "{name:<16}{:>18}{pooled:>10.4}", format!("{mean:.4} ± {std:.4}")).unwrap();
        }
        for class in Polarity::BOTH {
            let c = &p.per_class[&class];
            writeln!(
                out,
                "{:<16}P {:.4}  R {:.4}  F1 {:.4}  n {}",
                format!("pooled {class}"),
                c.precision,
                c.recall,
                c.f1,
                c.support
            )
            .unwrap();
        }
        out
    }
}

/// Pooled metrics plus per-(run, fold) metrics and their mean ± std.
pub fn compute_metrics(preds: &PredictionSet) -> Result<MetricsReport, EvalError> {
    if preds.records.is_empty() {
        return Err(EvalError::EmptyPredictionSet);
    }
    let gold: Vec<Polarity> = preds.records.iter().map(|r| r.gold).collect();
    let pred: Vec<Polarity> = preds.records.iter().map(|r| r.pred).collect();
    let pooled = metrics(&gold, &pred);

    let mut groups: BTreeMap<(usize, usize), (Vec<Polarity>, Vec<Polarity>)> = BTreeMap::new();
    for r in &preds.records {
        let g = groups.entry((r.run, r.fold)).or_default();
        g.0.push(r.gold);
        g.1.push(r.pred);
    }
    let per_fold: Vec<FoldMetrics> = groups
        .into_iter()
        .map(|((run, fold), (g, p))| FoldMetrics {
            run,
            fold,
            metrics: metrics(&g, &p),
        })
        .collect();
    let mut mean = [0.0; 6];
    let mut std = [0.0; 6];
    for i in 0..6 {
        let vals: Vec<f64> = per_fold.iter().map(|f| Summary::of(&f.metrics).fields()[i]).collect();
        (mean[i], std[i]) = mean_std(&vals);
    }
    Ok(MetricsReport {
        pooled,
        per_fold,
        fold_mean: Summary::from_fields(mean),
        fold_std: Summary::from_fields(std),
    })
}
