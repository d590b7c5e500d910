use rayon::prelude::*;
use serde::Serialize;

use super::{train, BaggingParams, Dataset, GbtParams, HyperParams, LearnError, LearnerKind, Params};
use crate::eval::{macro_f1, stratified_assignment};
use crate::jaas::Polarity;
use crate::seed::derive_seed;

/// Bagging sizes and boosting depths searched by default; the SVM uses a
/// single point.
pub fn default_grid(kind: LearnerKind, base: &HyperParams) -> Vec<Params> {
    match kind {
        LearnerKind::Svm => vec![Params::Svm(base.svm)],
        LearnerKind::Bagging => [50, 100, 200, 500]
            .into_iter()
            .map(|n_trees| Params::Bagging(BaggingParams { n_trees, ..base.bagging }))
            .collect(),
        LearnerKind::Gbt => [2, 8, 20, 30]
            .into_iter()
            .map(|max_depth| Params::Gbt(GbtParams { max_depth, ..base.gbt }))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridReport {
    pub best: Params,
    pub best_index: usize,
    /// Mean inner macro-F1 per grid point; empty when the grid has one point.
    pub scores: Vec<f64>,
    /// Ids of each inner validation fold.
    pub inner_folds: Vec<Vec<String>>,
}

/// Pick the grid point with the best mean macro-F1 under stratified
/// `inner_k`-fold cross-validation on `data`; ties go to the earlier point.
pub fn grid_search(data: &Dataset, grid: &[Params], inner_k: usize, seed: u64) -> Result<GridReport, LearnError> {
    if grid.is_empty() {
        return Err(LearnError::EmptyGrid);
    }
    let assignment = stratified_assignment(&data.labels, inner_k, derive_seed(seed, u64::MAX));
    let folds: Vec<Vec<usize>> = (0..inner_k)
        .map(|f| (0..data.len()).filter(|&i| assignment[i] == f).collect())
        .collect();
    let inner_folds = folds
        .iter()
        .map(|f| f.iter().map(|&i| data.ids[i].clone()).collect())
        .collect();
    if grid.len() == 1 {
        return Ok(GridReport {
            best: grid[0],
            best_index: 0,
            scores: Vec::new(),
            inner_folds,
        });
    }

    let jobs: Vec<(usize, usize)> = (0..grid.len()).flat_map(|g| (0..inner_k).map(move |f| (g, f))).collect();
    let results = jobs
        .par_iter()
        .map(|&(g, f)| {
            let test = &folds[f];
            let train_idx: Vec<usize> = (0..data.len()).filter(|&i| assignment[i] != f).collect();
            let train_set = data.subset(&train_idx);
            let test_set = data.subset(test);
            let pred: Vec<Polarity> = match train(&train_set, &grid[g], seed) {
                Ok(m) => m.predict(&test_set)?.into_iter().map(|p| p.label).collect(),
                // one class missing from this inner training split: constant predictor
                Err(LearnError::DegenerateData(_)) => {
                    let only = if train_set.class_counts().1 > 0 { Polarity::Opp } else { Polarity::Pro };
                    vec![only; test.len()]
                }
                Err(e) => return Err(e),
            };
            Ok(macro_f1(&test_set.labels, &pred))
        })
        .collect::<Result<Vec<f64>, LearnError>>()?;

    let scores: Vec<f64> = (0..grid.len())
        .map(|g| results[g * inner_k..(g + 1) * inner_k].iter().sum::<f64>() / inner_k as f64)
        .collect();
    let mut best_index = 0;
    for (g, &s) in scores.iter().enumerate() {
        if s > scores[best_index] {
            best_index = g;
        }
    }
    Ok(GridReport {
        best: grid[best_index],
        best_index,
        scores,
        inner_folds,
    })
}
