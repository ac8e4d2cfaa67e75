use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::{kaggle_feature_names, Dataset};
use crate::error::{Error, Result};
use crate::numkit::Matrix;
use crate::rng;

/// Desk-scale stand-in for the transaction table.
///
/// Normal rows are standard spherical Gaussian. Fraud rows are shifted by `separation`
/// along every axis and, when `separation > 0`, have twice the variance; at separation 0
/// both classes share one distribution. With `dims == 30` the columns carry the
/// transaction-table names (`Time`, `V1..V28`, `Amount`), otherwise `V1..V{dims}`.
pub fn synth_generate(
    n_normal: usize,
    n_fraud: usize,
    separation: f64,
    dims: usize,
    seed: u64,
) -> Result<Dataset> {
    if dims == 0 {
        return Err(Error::param("dims", "must be at least 1"));
    }
    if !(separation >= 0.0 && separation.is_finite()) {
        return Err(Error::param("separation", "must be finite and non-negative"));
    }
    let mut rng = rng::seeded(seed);
    let fraud_std = if separation > 0.0 {
        core::f64::consts::SQRT_2
    } else {
        1.0
    };
    let n = n_normal + n_fraud;
    let mut rows: Vec<(Vec<f64>, u8)> = Vec::with_capacity(n);
    for i in 0..n {
        let fraud = i >= n_normal;
        let row = (0..dims)
            .map(|_| {
                let z = rng::standard_normal(&mut rng);
                if fraud {
                    separation + fraud_std * z
                } else {
                    z
                }
            })
            .collect();
        rows.push((row, fraud as u8));
    }
    rows.shuffle(&mut rng);

    let mut data = Vec::with_capacity(n * dims);
    let mut labels = Vec::with_capacity(n);
    for (row, label) in rows {
        data.extend(row);
        labels.push(label);
    }
    let names: Vec<String> = if dims == 30 {
        kaggle_feature_names()
    } else {
        (1..=dims).map(|i| format!("V{i}")).collect()
    };
    Dataset::new(Matrix::from_vec(n, dims, data)?, labels, names)
}
