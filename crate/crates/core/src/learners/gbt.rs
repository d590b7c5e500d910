use serde::{Deserialize, Serialize};

use super::tree::{Binned, Grower, Newton, Tree};
use super::{Dataset, GbtParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    /// Initial margin (0 ⇔ base probability 0.5).
    pub base_margin: f64,
    /// Leaf values already include the learning rate.
    pub trees: Vec<Tree>,
}

impl GbtModel {
    pub fn margin(&self, row: &[(usize, f64)]) -> f64 {
        self.base_margin + self.trees.iter().map(|t| t.eval(row)).sum::<f64>()
    }

    pub fn probability(&self, row: &[(usize, f64)]) -> f64 {
        sigmoid(self.margin(row))
    }
}

pub fn sigmoid(m: f64) -> f64 {
    if m >= 0.0 {
        1.0 / (1.0 + (-m).exp())
    } else {
        let e = m.exp();
        e / (1.0 + e)
    }
}

/// Logistic loss `−[y ln p + (1−y) ln(1−p)]` at margin `m`, computed stably.
pub fn logistic_loss(y: f64, m: f64) -> f64 {
    let softplus = |z: f64| if z > 0.0 { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() };
    y * softplus(-m) + (1.0 - y) * softplus(m)
}

/// First and second derivative of the logistic loss w.r.t. the margin.
pub fn grad_hess(y: f64, m: f64) -> (f64, f64) {
    let p = sigmoid(m);
    (p - y, p * (1.0 - p))
}

/// Newton boosting. `on_round` sees the training margins after each tree.
pub fn train_gbt_with(data: &Dataset, params: &GbtParams, mut on_round: impl FnMut(&[f64])) -> GbtModel {
    let binned = Binned::new(data);
    let y: Vec<f64> = data.labels.iter().map(|l| if l.is_opp() { 1.0 } else { 0.0 }).collect();
    let mut margins = vec![0.0; data.len()];
    let grower = Grower {
        data,
        binned: &binned,
        objective: Newton {
            lambda: params.l2_lambda,
            learning_rate: params.learning_rate,
        },
        max_depth: Some(params.max_depth),
    };
    let mut trees = Vec::with_capacity(params.n_trees);
    for _ in 0..params.n_trees {
        let stats: Vec<[f64; 2]> = y
            .iter()
            .zip(&margins)
            .map(|(&y, &m)| {
                let (g, h) = grad_hess(y, m);
                [g, h]
            })
            .collect();
        let tree = grower.grow((0..data.len()).collect(), &stats);
        for (m, row) in margins.iter_mut().zip(&data.rows) {
            *m += tree.eval(row);
        }
        trees.push(tree);
        on_round(&margins);
    }
    GbtModel {
        base_margin: 0.0,
        trees,
    }
}

pub fn train_gbt(data: &Dataset, params: &GbtParams) -> GbtModel {
    train_gbt_with(data, params, |_| {})
}
