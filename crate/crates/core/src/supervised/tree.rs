//! Binary classification tree grown greedily on information gain (entropy, bits).

use alloc::vec::Vec;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::math;
use crate::model::{ParamValue, Params, ScoredModel};
use crate::numkit::Matrix;
use crate::rng::SeededRng;

/// Gains closer than this are treated as equal; the earlier candidate wins.
pub const GAIN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DtParams {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
}

impl Default for DtParams {
    fn default() -> Self {
        DtParams {
            max_depth: 3,
            min_samples_leaf: 6,
        }
    }
}

impl DtParams {
    pub(crate) fn set(&mut self, key: &str, value: &ParamValue) -> Result<()> {
        match key {
            "criterion" => value.expect_text(key, &["entropy"])?,
            "max_depth" => self.max_depth = value.positive_usize(key)?,
            "min_samples_leaf" => self.min_samples_leaf = value.positive_usize(key)?,
            _ => {
                return Err(Error::UnknownParameter {
                    model: "dt",
                    name: key.into(),
                })
            }
        }
        Ok(())
    }

    pub(crate) fn to_params(&self) -> Params {
        let mut p = Params::new();
        p.insert("criterion".into(), ParamValue::Text("entropy".into()));
        p.insert("max_depth".into(), ParamValue::Int(self.max_depth as i64));
        p.insert("min_samples_leaf".into(), ParamValue::Int(self.min_samples_leaf as i64));
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// `[normal, fraud]` training rows that reached the leaf.
    Leaf { counts: [usize; 2] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub nodes: Vec<TreeNode>,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub n_features: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

/// Growth limits shared by the single tree and the forest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeConfig {
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Features drawn (without replacement) per split; `None` uses all of them.
    pub max_features: Option<usize>,
}

pub fn entropy(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * math::log2(p)
        })
        .sum()
}

fn class_counts(y: &[u8], rows: &[usize]) -> [usize; 2] {
    let fraud = rows.iter().filter(|&&r| y[r] == 1).count();
    [rows.len() - fraud, fraud]
}

/// Midpoint between consecutive distinct values, nudged so `lo <= t < hi` holds exactly.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo + (hi - lo) / 2.0;
    if m >= hi {
        lo
    } else {
        m
    }
}

/// Best information-gain split of `rows` over `features` (scanned in the given order,
/// thresholds ascending). Both children must hold at least `min_leaf` rows.
pub fn best_split(
    x: &Matrix,
    y: &[u8],
    rows: &[usize],
    features: &[usize],
    min_leaf: usize,
) -> Option<SplitCandidate> {
    let total = class_counts(y, rows);
    let n = rows.len();
    let parent = entropy(total);
    let mut best: Option<SplitCandidate> = None;
    let mut pairs: Vec<(f64, u8)> = Vec::with_capacity(n);
    for &f in features {
        pairs.clear();
        pairs.extend(rows.iter().map(|&r| (x.get(r, f), y[r])));
        pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let mut left = [0usize; 2];
        for i in 0..n.saturating_sub(1) {
            left[pairs[i].1 as usize] += 1;
            if pairs[i].0 == pairs[i + 1].0 {
                continue;
            }
            let n_left = i + 1;
            let n_right = n - n_left;
            if n_left < min_leaf || n_right < min_leaf {
                continue;
            }
            let right = [total[0] - left[0], total[1] - left[1]];
            let gain = parent
                - (n_left as f64 / n as f64) * entropy(left)
                - (n_right as f64 / n as f64) * entropy(right);
            if best.map_or(true, |b| gain > b.gain + GAIN_EPS) {
                best = Some(SplitCandidate {
                    feature: f,
                    threshold: midpoint(pairs[i].0, pairs[i + 1].0),
                    gain,
                });
            }
        }
    }
    best
}

struct Grower<'a> {
    x: &'a Matrix,
    y: &'a [u8],
    config: TreeConfig,
    rng: Option<&'a mut SeededRng>,
    nodes: Vec<TreeNode>,
}

impl Grower<'_> {
    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let counts = class_counts(self.y, &rows);
        let id = self.nodes.len();
        self.nodes.push(TreeNode::Leaf { counts });
        let depth_ok = self.config.max_depth.map_or(true, |d| depth < d);
        let pure = counts[0] == 0 || counts[1] == 0;
        if !depth_ok || pure || rows.len() < 2 * self.config.min_samples_leaf {
            return id;
        }
        let p = self.x.cols();
        let features: Vec<usize> = match (self.config.max_features, self.rng.as_deref_mut()) {
            (Some(m), Some(rng)) if m < p => {
                let mut f: Vec<usize> = index::sample(rng, p, m).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..p).collect(),
        };
        // impure nodes split even at zero gain (XOR-style interactions need it)
        let split = match best_split(self.x, self.y, &rows, &features, self.config.min_samples_leaf) {
            Some(s) => s,
            None => return id,
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&row| self.x.get(row, split.feature) <= split.threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }
}

/// Grows a tree on `rows` (repeats allowed, as in a bootstrap sample).
pub fn grow_tree(
    x: &Matrix,
    y: &[u8],
    rows: Vec<usize>,
    config: TreeConfig,
    rng: Option<&mut SeededRng>,
) -> TreeModel {
    let mut g = Grower {
        x,
        y,
        config,
        rng,
        nodes: Vec::new(),
    };
    g.grow(rows, 0);
    TreeModel {
        nodes: g.nodes,
        max_depth: config.max_depth,
        min_samples_leaf: config.min_samples_leaf,
        n_features: x.cols(),
    }
}

pub fn dt_fit(train: &Dataset, params: &DtParams) -> Result<TreeModel> {
    if params.max_depth == 0 {
        return Err(Error::param("max_depth", "must be at least 1"));
    }
    if train.n_rows() == 0 {
        return Err(Error::InvalidData("empty training set".into()));
    }
    Ok(grow_tree(
        train.features(),
        train.labels(),
        (0..train.n_rows()).collect(),
        TreeConfig {
            max_depth: Some(params.max_depth),
            min_samples_leaf: params.min_samples_leaf.max(1),
            max_features: None,
        },
        None,
    ))
}

impl TreeModel {
    pub fn leaf_counts(&self, row: &[f64]) -> [usize; 2] {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                TreeNode::Leaf { counts } => return *counts,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    id = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Deepest root-to-leaf path length in edges.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], id: usize) -> usize {
            match &nodes[id] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = [usize; 2]> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            TreeNode::Leaf { counts } => Some(*counts),
            TreeNode::Split { .. } => None,
        })
    }

    pub fn root_split(&self) -> Option<(usize, f64)> {
        match self.nodes.first() {
            Some(TreeNode::Split {
                feature, threshold, ..
            }) => Some((*feature, *threshold)),
            _ => None,
        }
    }

    /// Hard class vote of the reached leaf (fraud fraction above ½).
    pub fn vote(&self, row: &[f64]) -> u8 {
        (self.score_row(row) > 0.5) as u8
    }
}

impl ScoredModel for TreeModel {
    fn n_features(&self) -> usize {
        self.n_features
    }

    /// Fraud fraction of the reached leaf.
    fn score_row(&self, row: &[f64]) -> f64 {
        let [n0, n1] = self.leaf_counts(row);
        if n0 + n1 == 0 {
            0.0
        } else {
            n1 as f64 / (n0 + n1) as f64
        }
    }
}
