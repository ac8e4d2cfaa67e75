use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tree::{grow_tree, TreeConfig, TreeModel};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::math;
use crate::model::{ParamValue, Params, ScoredModel};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    /// `max(1, ⌊√p⌋)` features per split.
    Sqrt,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
    pub oob_score: bool,
}

impl Default for RfParams {
    fn default() -> Self {
        RfParams {
            n_trees: 30,
            max_depth: None,
            min_samples_leaf: 1,
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
            oob_score: true,
        }
    }
}

impl RfParams {
    pub(crate) fn set(&mut self, key: &str, value: &ParamValue) -> Result<()> {
        match key {
            "n_estimators" => self.n_trees = value.positive_usize(key)?,
            "oob_score" => self.oob_score = value.as_bool(key)?,
            "bootstrap" => self.bootstrap = value.as_bool(key)?,
            "max_depth" => {
                let d = value.as_usize(key)?;
                self.max_depth = (d > 0).then_some(d);
            }
            "min_samples_leaf" => self.min_samples_leaf = value.positive_usize(key)?,
            "max_features" => {
                self.max_features = match value.as_text(key)? {
                    "sqrt" => MaxFeatures::Sqrt,
                    "all" => MaxFeatures::All,
                    other => {
                        return Err(Error::param(key, alloc::format!("`{other}` is not sqrt or all")))
                    }
                }
            }
            _ => {
                return Err(Error::UnknownParameter {
                    model: "rf",
                    name: key.into(),
                })
            }
        }
        Ok(())
    }

    pub(crate) fn to_params(&self) -> Params {
        let mut p = Params::new();
        p.insert("n_estimators".into(), ParamValue::Int(self.n_trees as i64));
        p.insert("oob_score".into(), ParamValue::Bool(self.oob_score));
        p.insert("bootstrap".into(), ParamValue::Bool(self.bootstrap));
        // 0 = unlimited
        p.insert("max_depth".into(), ParamValue::Int(self.max_depth.unwrap_or(0) as i64));
        p.insert("min_samples_leaf".into(), ParamValue::Int(self.min_samples_leaf as i64));
        let mf = match self.max_features {
            MaxFeatures::Sqrt => "sqrt",
            MaxFeatures::All => "all",
        };
        p.insert("max_features".into(), ParamValue::Text(mf.into()));
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<TreeModel>,
    pub tree_seeds: Vec<u64>,
    /// Out-of-bag majority-vote accuracy; `None` when disabled or no row was ever out of bag.
    pub oob_score: Option<f64>,
}

pub fn rf_fit(train: &Dataset, params: &RfParams, seed: u64) -> Result<ForestModel> {
    if params.n_trees == 0 {
        return Err(Error::param("n_estimators", "must be at least 1"));
    }
    let n = train.n_rows();
    if n == 0 {
        return Err(Error::InvalidData("empty training set".into()));
    }
    let p = train.n_cols();
    let max_features = match params.max_features {
        MaxFeatures::Sqrt => Some((math::floor(math::sqrt(p as f64)) as usize).max(1)),
        MaxFeatures::All => None,
    };
    let config = TreeConfig {
        max_depth: params.max_depth,
        min_samples_leaf: params.min_samples_leaf.max(1),
        max_features,
    };

    let mut trees = Vec::with_capacity(params.n_trees);
    let mut tree_seeds = Vec::with_capacity(params.n_trees);
    // oob_votes[i] = (fraud votes, trees voting)
    let mut oob_votes = vec![(0usize, 0usize); n];
    for t in 0..params.n_trees {
        let tree_seed = rng::derive_seed(seed, t as u64);
        let mut tree_rng = rng::seeded(tree_seed);
        let (rows, in_bag) = if params.bootstrap {
            let mut in_bag = vec![false; n];
            let rows: Vec<usize> = (0..n)
                .map(|_| {
                    let r = tree_rng.random_range(0..n);
                    in_bag[r] = true;
                    r
                })
                .collect();
            (rows, in_bag)
        } else {
            ((0..n).collect(), vec![true; n])
        };
        let tree = grow_tree(train.features(), train.labels(), rows, config, Some(&mut tree_rng));
        if params.oob_score {
            for i in (0..n).filter(|&i| !in_bag[i]) {
                let v = &mut oob_votes[i];
                v.0 += tree.vote(train.row(i)) as usize;
                v.1 += 1;
            }
        }
        trees.push(tree);
        tree_seeds.push(tree_seed);
    }

    let oob_score = if params.oob_score {
        let mut correct = 0usize;
        let mut counted = 0usize;
        for (i, &(fraud, total)) in oob_votes.iter().enumerate() {
            if total == 0 {
                continue;
            }
            let predicted = (fraud as f64 / total as f64 > 0.5) as u8;
            correct += (predicted == train.labels()[i]) as usize;
            counted += 1;
        }
        (counted > 0).then(|| correct as f64 / counted as f64)
    } else {
        None
    };
    Ok(ForestModel {
        trees,
        tree_seeds,
        oob_score,
    })
}

impl ForestModel {
    /// Majority vote over the trees' hard votes: 1 iff more than half vote fraud.
    pub fn predict_class(&self, row: &[f64]) -> u8 {
        let votes: usize = self.trees.iter().map(|t| t.vote(row) as usize).sum();
        (votes as f64 / self.trees.len() as f64 > 0.5) as u8
    }
}

impl ScoredModel for ForestModel {
    fn n_features(&self) -> usize {
        self.trees.first().map_or(0, |t| t.n_features)
    }

    /// Mean of the trees' leaf fraud fractions.
    fn score_row(&self, row: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.score_row(row)).sum::<f64>() / self.trees.len() as f64
    }
}
