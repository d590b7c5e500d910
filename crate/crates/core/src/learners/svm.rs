//! Linear SVM trained by averaged stochastic subgradient descent on
//! `½‖w‖² + C Σ max(0, 1 − yᵢ(w·xᵢ + b))`.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{Dataset, SvmParams};
use crate::seed::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Primal objective of the returned `(w, b)` on the training data.
    pub objective: f64,
    pub epochs: usize,
}

impl SvmModel {
    pub fn margin(&self, row: &[(usize, f64)]) -> f64 {
        dot(&self.weights, row) + self.bias
    }
}

fn dot(w: &[f64], row: &[(usize, f64)]) -> f64 {
    row.iter().map(|&(f, v)| w[f] * v).sum()
}

fn sign(y: bool) -> f64 {
    if y {
        1.0
    } else {
        -1.0
    }
}

/// Primal objective with labels `+1` for opp.
pub fn svm_objective(data: &Dataset, weights: &[f64], bias: f64, c: f64) -> f64 {
    let reg = 0.5 * weights.iter().map(|w| w * w).sum::<f64>();
    let loss: f64 = data
        .rows
        .iter()
        .zip(&data.labels)
        .map(|(row, y)| (1.0 - sign(y.is_opp()) * (dot(weights, row) + bias)).max(0.0))
        .sum();
    reg + c * loss
}

/// Lazily scaled, lazily averaged iterate: `w = α·v`, `Σ_t w_t = u + β·v`.
struct Averaged {
    v: Vec<f64>,
    alpha: f64,
    u: Vec<f64>,
    beta: f64,
    b: f64,
    b_sum: f64,
    steps: f64,
}

impl Averaged {
    fn new(dim: usize) -> Self {
        Averaged {
            v: vec![0.0; dim],
            alpha: 1.0,
            u: vec![0.0; dim],
            beta: 0.0,
            b: 0.0,
            b_sum: 0.0,
            steps: 0.0,
        }
    }

    fn step(&mut self, row: &[(usize, f64)], y: f64, eta: f64, lambda: f64) {
        let violated = y * (self.alpha * dot(&self.v, row) + self.b) < 1.0;
        self.alpha *= 1.0 - eta * lambda;
        if violated {
            let scale = eta * y / self.alpha;
            for &(f, x) in row {
                let d = scale * x;
                self.v[f] += d;
                self.u[f] -= self.beta * d;
            }
            self.b += eta * y;
        }
        self.beta += self.alpha;
        self.b_sum += self.b;
        self.steps += 1.0;
        if self.alpha < 1e-6 {
            self.renormalize();
        }
    }

    /// Fold the scale into `v` and the running sum into `u`.
    fn renormalize(&mut self) {
        for (u, v) in self.u.iter_mut().zip(self.v.iter_mut()) {
            *u += self.beta * *v;
            *v *= self.alpha;
        }
        self.alpha = 1.0;
        self.beta = 0.0;
    }

    fn average(&self) -> (Vec<f64>, f64) {
        if self.steps == 0.0 {
            return (vec![0.0; self.v.len()], 0.0);
        }
        let w = self.u.iter().zip(&self.v).map(|(u, v)| (u + self.beta * v) / self.steps).collect();
        (w, self.b_sum / self.steps)
    }
}

/// Epochs over a seeded shuffle with step `1/(λ(t + t₀))`, `λ = 1/(C·n)`.
/// Stops when the averaged iterate's objective changes by less than `tol`
/// (relative) between epochs; returns the best objective seen, never worse
/// than `w = 0, b = 0`.
pub fn train_svm(data: &Dataset, params: &SvmParams, seed: u64) -> SvmModel {
    let n = data.len();
    let lambda = 1.0 / (params.c * n as f64);
    let t0 = (1.0 / lambda).max(2.0);
    let mut it = Averaged::new(data.dim);
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = rng(seed);

    let zero = vec![0.0; data.dim];
    let mut best = SvmModel {
        objective: svm_objective(data, &zero, 0.0, params.c),
        weights: zero,
        bias: 0.0,
        epochs: 0,
    };
    let mut prev = best.objective;
    let mut t = 0usize;
    for epoch in 1..=params.max_epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let eta = 1.0 / (lambda * (t as f64 + t0));
            it.step(&data.rows[i], sign(data.labels[i].is_opp()), eta, lambda);
            t += 1;
        }
        it.renormalize();
        let (w, b) = it.average();
        let obj = svm_objective(data, &w, b, params.c);
        if obj < best.objective {
            best = SvmModel {
                weights: w,
                bias: b,
                objective: obj,
                epochs: epoch,
            };
        }
        if (prev - obj).abs() <= params.tol * prev.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        prev = obj;
    }
    best
}
