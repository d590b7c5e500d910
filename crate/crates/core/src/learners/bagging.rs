use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{Binned, Gini, Grower, Tree};
use super::{BaggingParams, Dataset};
use crate::seed::sub_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaggingModel {
    /// Leaves hold the voted class: 0 = pro, 1 = opp.
    pub trees: Vec<Tree>,
}

impl BaggingModel {
    /// Fraction of trees voting opp.
    pub fn vote_fraction(&self, row: &[(usize, f64)]) -> f64 {
        let opp = self.trees.iter().filter(|t| t.eval(row) > 0.5).count();
        opp as f64 / self.trees.len() as f64
    }
}

/// Class-weight statistics for a CART tree: `(w_pro, w_opp)` per row.
pub(crate) fn class_stats(data: &Dataset, weights: &[f64]) -> Vec<[f64; 2]> {
    data.labels
        .iter()
        .zip(weights)
        .map(|(y, &w)| if y.is_opp() { [0.0, w] } else { [w, 0.0] })
        .collect()
}

pub fn train_cart(data: &Dataset, binned: &Binned, weights: &[f64], max_depth: Option<usize>) -> Tree {
    let rows: Vec<usize> = (0..data.len()).filter(|&i| weights[i] > 0.0).collect();
    let grower = Grower {
        data,
        binned,
        objective: Gini,
        max_depth,
    };
    grower.grow(rows, &class_stats(data, weights))
}

/// Tree `i` sees a bootstrap sample drawn from its own generator
/// `(seed, i)`, so the ensemble does not depend on thread scheduling.
pub fn train_bagging(data: &Dataset, params: &BaggingParams, seed: u64) -> BaggingModel {
    let binned = Binned::new(data);
    let n = data.len();
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|i| {
            let mut weights = vec![0.0; n];
            if params.bootstrap {
                let mut rng = sub_rng(seed, i as u64);
                for _ in 0..n {
                    weights[rng.gen_range(0..n)] += 1.0;
                }
            } else {
                weights.fill(1.0);
            }
            train_cart(data, &binned, &weights, params.max_depth)
        })
        .collect();
    BaggingModel { trees }
}
