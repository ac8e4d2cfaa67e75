//! Second-order gradient boosting of regression trees on the logistic loss.
//!
//! Each round fits one tree to the gradients `g = p − y` and hessians `h = p(1 − p)` of
//! the log loss at the current margins. A split's gain is
//! `½ [G_L²/(H_L+λ) + G_R²/(H_R+λ) − G²/(H+λ)] − γ` and a leaf's weight is
//! `−G/(H+λ)`, shrunk by the learning rate.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::tree::GAIN_EPS;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::math;
use crate::model::{ParamValue, Params, ScoredModel};
use crate::numkit::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XgbParams {
    pub learning_rate: f64,
    pub max_depth: usize,
    pub n_rounds: usize,
    pub lambda: f64,
    pub gamma: f64,
    /// Minimum hessian sum per child.
    pub min_child_weight: f64,
}

impl Default for XgbParams {
    fn default() -> Self {
        XgbParams {
            learning_rate: 0.4,
            max_depth: 4,
            n_rounds: 100,
            lambda: 1.0,
            gamma: 0.0,
            min_child_weight: 1.0,
        }
    }
}

impl XgbParams {
    pub(crate) fn set(&mut self, key: &str, value: &ParamValue) -> Result<()> {
        match key {
            "learning_rate" | "eta" => self.learning_rate = value.positive_f64(key)?,
            "max_depth" => self.max_depth = value.as_usize(key)?,
            "n_rounds" | "n_estimators" => self.n_rounds = value.as_usize(key)?,
            "lambda" | "reg_lambda" => self.lambda = value.non_negative_f64(key)?,
            "gamma" => self.gamma = value.non_negative_f64(key)?,
            "min_child_weight" => self.min_child_weight = value.non_negative_f64(key)?,
            _ => {
                return Err(Error::UnknownParameter {
                    model: "xgb",
                    name: key.into(),
                })
            }
        }
        Ok(())
    }

    pub(crate) fn to_params(&self) -> Params {
        let mut p = Params::new();
        p.insert("learning_rate".into(), ParamValue::Float(self.learning_rate));
        p.insert("max_depth".into(), ParamValue::Int(self.max_depth as i64));
        p.insert("n_rounds".into(), ParamValue::Int(self.n_rounds as i64));
        p.insert("lambda".into(), ParamValue::Float(self.lambda));
        p.insert("gamma".into(), ParamValue::Float(self.gamma));
        p.insert("min_child_weight".into(), ParamValue::Float(self.min_child_weight));
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegressionNode {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// Leaf weight, already multiplied by the learning rate.
    Leaf { weight: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<RegressionNode>,
}

impl RegressionTree {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                RegressionNode::Leaf { weight } => return *weight,
                RegressionNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => id = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, RegressionNode::Leaf { .. }))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedModel {
    pub trees: Vec<RegressionTree>,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub lambda: f64,
    pub gamma: f64,
    /// Probability-scale base score; the base margin is its log-odds.
    pub base_score: f64,
    pub n_features: usize,
    /// Mean training log loss before round 1 and after every round.
    pub train_log_loss: Vec<f64>,
}

impl BoostedModel {
    pub fn base_margin(&self) -> f64 {
        math::ln(self.base_score / (1.0 - self.base_score))
    }

    pub fn margin(&self, row: &[f64]) -> f64 {
        self.base_margin() + self.trees.iter().map(|t| t.predict(row)).sum::<f64>()
    }
}

impl ScoredModel for BoostedModel {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn score_row(&self, row: &[f64]) -> f64 {
        math::sigmoid(self.margin(row))
    }
}

struct TreeBuilder<'a> {
    x: &'a Matrix,
    grad: &'a [f64],
    hess: &'a [f64],
    params: &'a XgbParams,
    nodes: Vec<RegressionNode>,
}

impl TreeBuilder<'_> {
    fn leaf_weight(&self, g: f64, h: f64) -> f64 {
        let denom = h + self.params.lambda;
        if denom <= 0.0 {
            0.0
        } else {
            -g / denom * self.params.learning_rate
        }
    }

    fn score(&self, g: f64, h: f64) -> f64 {
        let denom = h + self.params.lambda;
        if denom <= 0.0 {
            0.0
        } else {
            g * g / denom
        }
    }

    fn build(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let g: f64 = rows.iter().map(|&r| self.grad[r]).sum();
        let h: f64 = rows.iter().map(|&r| self.hess[r]).sum();
        let id = self.nodes.len();
        self.nodes.push(RegressionNode::Leaf {
            weight: self.leaf_weight(g, h),
        });
        if depth >= self.params.max_depth || rows.len() < 2 {
            return id;
        }

        let parent = self.score(g, h);
        let mut best: Option<(usize, f64, f64)> = None;
        let mut order: Vec<(f64, usize)> = Vec::with_capacity(rows.len());
        for f in 0..self.x.cols() {
            order.clear();
            order.extend(rows.iter().map(|&r| (self.x.get(r, f), r)));
            order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            let (mut gl, mut hl) = (0.0, 0.0);
            for i in 0..order.len() - 1 {
                let r = order[i].1;
                gl += self.grad[r];
                hl += self.hess[r];
                if order[i].0 == order[i + 1].0 {
                    continue;
                }
                let (gr, hr) = (g - gl, h - hl);
                if hl < self.params.min_child_weight || hr < self.params.min_child_weight {
                    continue;
                }
                let gain = 0.5 * (self.score(gl, hl) + self.score(gr, hr) - parent) - self.params.gamma;
                if best.map_or(true, |b| gain > b.2 + GAIN_EPS) {
                    let (lo, hi) = (order[i].0, order[i + 1].0);
                    let mid = lo + (hi - lo) / 2.0;
                    let threshold = if mid >= hi { lo } else { mid };
                    best = Some((f, threshold, gain));
                }
            }
        }
        let (feature, threshold) = match best {
            Some((f, t, gain)) if gain > GAIN_EPS => (f, t),
            _ => return id,
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&row| self.x.get(row, feature) <= threshold);
        let left = self.build(l, depth + 1);
        let right = self.build(r, depth + 1);
        self.nodes[id] = RegressionNode::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

fn mean_log_loss(margins: &[f64], y: &[u8]) -> f64 {
    let total: f64 = margins
        .iter()
        .zip(y)
        .map(|(&m, &yi)| math::softplus(m) - yi as f64 * m)
        .sum();
    total / margins.len().max(1) as f64
}

pub fn xgb_fit(train: &Dataset, params: &XgbParams) -> Result<BoostedModel> {
    if train.n_rows() == 0 {
        return Err(Error::InvalidData("empty training set".into()));
    }
    if !(params.learning_rate > 0.0) {
        return Err(Error::param("learning_rate", "must be positive"));
    }
    let x = train.features();
    let y = train.labels();
    let n = train.n_rows();
    let base_score = 0.5;
    let mut margins = vec![0.0; n];
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];
    let mut trees = Vec::with_capacity(params.n_rounds);
    let mut losses = Vec::with_capacity(params.n_rounds + 1);
    losses.push(mean_log_loss(&margins, y));
    for _ in 0..params.n_rounds {
        for i in 0..n {
            let p = math::sigmoid(margins[i]);
            grad[i] = p - y[i] as f64;
            hess[i] = p * (1.0 - p);
        }
        let mut builder = TreeBuilder {
            x,
            grad: &grad,
            hess: &hess,
            params,
            nodes: Vec::new(),
        };
        builder.build((0..n).collect(), 0);
        let tree = RegressionTree {
            nodes: builder.nodes,
        };
        for (i, m) in margins.iter_mut().enumerate() {
            *m += tree.predict(x.row(i));
        }
        losses.push(mean_log_loss(&margins, y));
        trees.push(tree);
    }
    Ok(BoostedModel {
        trees,
        learning_rate: params.learning_rate,
        max_depth: params.max_depth,
        lambda: params.lambda,
        gamma: params.gamma,
        base_score,
        n_features: x.cols(),
        train_log_loss: losses,
    })
}
