use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::math;
use crate::model::{ParamValue, Params, ScoredModel};
use crate::numkit::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub n_neighbors: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { n_neighbors: 4 }
    }
}

impl KnnParams {
    pub(crate) fn set(&mut self, key: &str, value: &ParamValue) -> Result<()> {
        match key {
            "n_neighbors" => self.n_neighbors = value.positive_usize(key)?,
            // index structure only; results do not depend on it
            "algorithm" => value.expect_text(key, &["auto", "brute"])?,
            _ => {
                return Err(Error::UnknownParameter {
                    model: "knn",
                    name: key.into(),
                })
            }
        }
        Ok(())
    }

    pub(crate) fn to_params(&self) -> Params {
        let mut p = Params::new();
        p.insert("n_neighbors".into(), ParamValue::Int(self.n_neighbors as i64));
        p.insert("algorithm".into(), ParamValue::Text("brute".into()));
        p
    }
}

/// Brute-force Euclidean k-nearest-neighbour classifier over the stored training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub features: Matrix,
    pub labels: Vec<u8>,
}

pub fn knn_fit(train: &Dataset, params: &KnnParams) -> Result<KnnModel> {
    if params.n_neighbors == 0 {
        return Err(Error::param("n_neighbors", "must be positive"));
    }
    if params.n_neighbors > train.n_rows() {
        return Err(Error::param(
            "n_neighbors",
            alloc::format!("{} exceeds {} training rows", params.n_neighbors, train.n_rows()),
        ));
    }
    Ok(KnnModel {
        k: params.n_neighbors,
        features: train.features().clone(),
        labels: train.labels().to_vec(),
    })
}

impl KnnModel {
    /// Training indices of the `k` nearest rows; equal distances go to the lower index.
    pub fn neighbors(&self, row: &[f64]) -> Vec<usize> {
        let mut dist: Vec<(f64, usize)> = self
            .features
            .iter_rows()
            .enumerate()
            .map(|(i, t)| (math::squared_distance(t, row), i))
            .collect();
        let by_dist_then_index =
            |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < dist.len() {
            dist.select_nth_unstable_by(self.k - 1, by_dist_then_index);
            dist.truncate(self.k);
        }
        dist.sort_unstable_by(by_dist_then_index);
        dist.into_iter().map(|(_, i)| i).collect()
    }
}

impl ScoredModel for KnnModel {
    fn n_features(&self) -> usize {
        self.features.cols()
    }

    /// Fraction of fraud labels among the `k` nearest training rows.
    fn score_row(&self, row: &[f64]) -> f64 {
        let hits = self
            .neighbors(row)
            .iter()
            .filter(|&&i| self.labels[i] == 1)
            .count();
        hits as f64 / self.k as f64
    }
}
