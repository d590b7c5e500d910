//! Exact-split decision trees over sparse rows.
//!
//! Every nonzero value of a feature is its own bin; the implicit zero bucket
//! is whatever remains of the node totals. A split sends `x[f] <= threshold`
//! left, with the threshold halfway between adjacent observed values.

use serde::{Deserialize, Serialize};

use super::{value_at, Dataset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn eval(&self, row: &[(usize, f64)]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if value_at(row, feature) <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            match t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(t, left).max(go(t, right)),
            }
        }
        go(self, 0)
    }

    pub fn max_feature(&self) -> Option<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split { feature, .. } => Some(*feature),
                Node::Leaf { .. } => None,
            })
            .max()
    }
}

/// Two additive per-row statistics: `(w_pro, w_opp)` for classification,
/// `(gradient, hessian)` for boosting.
pub type Stat = [f64; 2];

fn add(a: &mut Stat, b: Stat) {
    a[0] += b[0];
    a[1] += b[1];
}

fn sub(a: Stat, b: Stat) -> Stat {
    [a[0] - b[0], a[1] - b[1]]
}

/// Split criterion and leaf rule.
pub trait Objective {
    /// Improvement of splitting `total` into `left`/`right`; `None` forbids the split.
    fn gain(&self, left: Stat, right: Stat, total: Stat) -> f64;
    fn leaf(&self, total: Stat) -> f64;
    /// Nothing left to improve (e.g. a pure node).
    fn is_terminal(&self, _total: Stat) -> bool {
        false
    }
}

/// Per-feature sorted distinct nonzero values and each row's bin ids.
pub struct Binned {
    values: Vec<Vec<f64>>,
    offset: Vec<usize>,
    /// Number of negative distinct values (zero sorts after them).
    zero_pos: Vec<usize>,
    rows: Vec<Vec<(usize, usize)>>,
    n_bins: usize,
}

impl Binned {
    pub fn new(data: &Dataset) -> Binned {
        let mut values: Vec<Vec<f64>> = vec![Vec::new(); data.dim];
        for row in &data.rows {
            for &(f, v) in row {
                if v != 0.0 {
                    values[f].push(v);
                }
            }
        }
        let mut offset = Vec::with_capacity(data.dim);
        let mut zero_pos = Vec::with_capacity(data.dim);
        let mut n_bins = 0;
        for vs in &mut values {
            vs.sort_by(f64::total_cmp);
            vs.dedup();
            offset.push(n_bins);
            zero_pos.push(vs.partition_point(|&v| v < 0.0));
            n_bins += vs.len();
        }
        let rows = data
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .filter(|(_, v)| *v != 0.0)
                    .map(|&(f, v)| {
                        let b = values[f].binary_search_by(|x| x.total_cmp(&v)).expect("value was binned");
                        (f, offset[f] + b)
                    })
                    .collect()
            })
            .collect();
        Binned {
            values,
            offset,
            zero_pos,
            rows,
            n_bins,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Split {
    feature: usize,
    threshold: f64,
}

/// Scratch histogram reused across nodes of one tree.
struct Hist {
    bins: Vec<(Stat, usize)>,
    touched: Vec<bool>,
    features: Vec<usize>,
}

pub struct Grower<'a, O: Objective> {
    pub data: &'a Dataset,
    pub binned: &'a Binned,
    pub objective: O,
    pub max_depth: Option<usize>,
}

impl<O: Objective> Grower<'_, O> {
    /// Grow a tree over `rows` (indices into the dataset; repeats allowed)
    /// with per-row statistics `stats[row]`.
    pub fn grow(&self, rows: Vec<usize>, stats: &[Stat]) -> Tree {
        let mut hist = Hist {
            bins: vec![([0.0; 2], 0); self.binned.n_bins],
            touched: vec![false; self.data.dim],
            features: Vec::new(),
        };
        let mut nodes = Vec::new();
        self.grow_node(rows, 0, stats, &mut hist, &mut nodes);
        Tree { nodes }
    }

    fn grow_node(&self, rows: Vec<usize>, depth: usize, stats: &[Stat], hist: &mut Hist, nodes: &mut Vec<Node>) -> usize {
        let mut total = [0.0; 2];
        for &r in &rows {
            add(&mut total, stats[r]);
        }
        let id = nodes.len();
        nodes.push(Node::Leaf {
            value: self.objective.leaf(total),
        });
        let can_split = rows.len() > 1
            && self.max_depth.is_none_or(|d| depth < d)
            && !self.objective.is_terminal(total);
        if !can_split {
            return id;
        }
        let Some(split) = self.best_split(&rows, stats, total, hist) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&i| value_at(&self.data.rows[i], split.feature) <= split.threshold);
        let left = self.grow_node(l, depth + 1, stats, hist, nodes);
        let right = self.grow_node(r, depth + 1, stats, hist, nodes);
        nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }

    fn best_split(&self, rows: &[usize], stats: &[Stat], total: Stat, hist: &mut Hist) -> Option<Split> {
        let b = self.binned;
        for &r in rows {
            for &(f, bin) in &b.rows[r] {
                let e = &mut hist.bins[bin];
                add(&mut e.0, stats[r]);
                e.1 += 1;
                if !hist.touched[f] {
                    hist.touched[f] = true;
                    hist.features.push(f);
                }
            }
        }
        hist.features.sort_unstable();

        let mut best: Option<(f64, Split)> = None;
        let mut seq: Vec<(f64, Stat, usize)> = Vec::new();
        for &f in &hist.features {
            let range = b.offset[f]..b.offset[f] + b.values[f].len();
            let mut nonzero = [0.0; 2];
            let mut nz_count = 0;
            for bin in range.clone() {
                add(&mut nonzero, hist.bins[bin].0);
                nz_count += hist.bins[bin].1;
            }
            seq.clear();
            for (k, bin) in range.clone().enumerate() {
                if k == b.zero_pos[f] && nz_count < rows.len() {
                    seq.push((0.0, sub(total, nonzero), rows.len() - nz_count));
                }
                let (s, c) = hist.bins[bin];
                if c > 0 {
                    seq.push((b.values[f][k], s, c));
                }
            }
            if b.zero_pos[f] == b.values[f].len() && nz_count < rows.len() {
                seq.push((0.0, sub(total, nonzero), rows.len() - nz_count));
            }
            let mut left = [0.0; 2];
            for w in 0..seq.len().saturating_sub(1) {
                add(&mut left, seq[w].1);
                let gain = self.objective.gain(left, sub(total, left), total);
                if gain >= 0.0 && best.is_none_or(|(g, _)| gain > g) {
                    best = Some((
                        gain,
                        Split {
                            feature: f,
                            threshold: midpoint(seq[w].0, seq[w + 1].0),
                        },
                    ));
                }
            }
        }

        for &f in &hist.features {
            hist.touched[f] = false;
            for bin in b.offset[f]..b.offset[f] + b.values[f].len() {
                hist.bins[bin] = ([0.0; 2], 0);
            }
        }
        hist.features.clear();
        best.map(|(_, s)| s)
    }
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    // guard against rounding up to `b` for adjacent floats
    if m < b {
        m
    } else {
        a
    }
}

/// Weighted Gini impurity decrease; leaves vote for the heavier class
/// (`0.0` = pro, `1.0` = opp; ties go to pro).
pub struct Gini;

/// `n · gini(c)` = n − Σ c_k² / n.
pub fn weighted_impurity(c: Stat) -> f64 {
    let n = c[0] + c[1];
    if n <= 0.0 {
        0.0
    } else {
        n - (c[0] * c[0] + c[1] * c[1]) / n
    }
}

impl Objective for Gini {
    fn gain(&self, left: Stat, right: Stat, total: Stat) -> f64 {
        weighted_impurity(total) - weighted_impurity(left) - weighted_impurity(right)
    }

    fn leaf(&self, total: Stat) -> f64 {
        if total[1] > total[0] {
            1.0
        } else {
            0.0
        }
    }

    fn is_terminal(&self, total: Stat) -> bool {
        total[0] == 0.0 || total[1] == 0.0
    }
}

/// Second-order logistic boosting: stats are `(Σg, Σh)`.
pub struct Newton {
    pub lambda: f64,
    pub learning_rate: f64,
}

fn score_term(g: f64, h: f64, lambda: f64) -> f64 {
    let d = h + lambda;
    if d > 0.0 {
        g * g / d
    } else {
        0.0
    }
}

impl Objective for Newton {
    fn gain(&self, left: Stat, right: Stat, total: Stat) -> f64 {
        0.5 * (score_term(left[0], left[1], self.lambda) + score_term(right[0], right[1], self.lambda)
            - score_term(total[0], total[1], self.lambda))
    }

    fn leaf(&self, total: Stat) -> f64 {
        let d = total[1] + self.lambda;
        if d > 0.0 && d.is_finite() {
            -total[0] / d * self.learning_rate
        } else {
            0.0
        }
    }
}
