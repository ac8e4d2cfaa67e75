use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

/// Median / inter-quartile range per scaled column, fitted on training rows and reused
/// unchanged on test rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub columns: Vec<usize>,
    pub median: Vec<f64>,
    pub iqr: Vec<f64>,
}

/// Quantile of already-sorted values by linear interpolation at index `(n − 1)·q`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty column");
    let pos = (sorted.len() - 1) as f64 * q;
    let lo = crate::math::floor(pos) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

impl ScalerParams {
    /// Identity scaler (no columns touched).
    pub fn identity() -> Self {
        ScalerParams {
            columns: Vec::new(),
            median: Vec::new(),
            iqr: Vec::new(),
        }
    }

    pub fn fit(data: &Dataset, columns: &[usize]) -> Result<Self> {
        if data.n_rows() == 0 && !columns.is_empty() {
            return Err(Error::InvalidData("cannot fit a scaler on zero rows".into()));
        }
        let mut median = Vec::with_capacity(columns.len());
        let mut iqr = Vec::with_capacity(columns.len());
        for &c in columns {
            if c >= data.n_cols() {
                return Err(Error::param("columns", alloc::format!("index {c} out of range")));
            }
            let mut col = data.features().column(c);
            col.sort_unstable_by(f64::total_cmp);
            median.push(quantile_sorted(&col, 0.5));
            iqr.push(quantile_sorted(&col, 0.75) - quantile_sorted(&col, 0.25));
        }
        Ok(ScalerParams {
            columns: columns.to_vec(),
            median,
            iqr,
        })
    }

    /// `(x − median) / iqr` on the scaled columns; a zero-iqr column maps to 0.
    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        if let Some(&c) = self.columns.iter().find(|&&c| c >= data.n_cols()) {
            return Err(Error::param("columns", alloc::format!("index {c} out of range")));
        }
        let mut features = data.features().clone();
        for r in 0..features.rows() {
            let row = features.row_mut(r);
            for ((&c, &m), &q) in self.columns.iter().zip(&self.median).zip(&self.iqr) {
                row[c] = if q > 0.0 { (row[c] - m) / q } else { 0.0 };
            }
        }
        data.with_features(features)
    }
}

/// Fits robust scaling on `columns` of `data` and returns the scaled data with the params.
pub fn robust_scale(data: &Dataset, columns: &[usize]) -> Result<(Dataset, ScalerParams)> {
    let params = ScalerParams::fit(data, columns)?;
    let scaled = params.apply(data)?;
    Ok((scaled, params))
}
