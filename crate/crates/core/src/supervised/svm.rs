//! Soft-margin linear SVM trained on its dual by SMO.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::math;
use crate::model::{ParamValue, Params, ScoredModel};
use crate::numkit::smo::{self, QMatrix, SmoConfig};
use crate::numkit::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 0.5,
            tolerance: 1e-3,
            max_iterations: 10_000_000,
        }
    }
}

impl SvmParams {
    pub(crate) fn set(&mut self, key: &str, value: &ParamValue) -> Result<()> {
        match key {
            "C" => self.c = value.positive_f64(key)?,
            "kernel" => value.expect_text(key, &["linear"])?,
            "tol" => self.tolerance = value.positive_f64(key)?,
            "max_iter" => self.max_iterations = value.as_usize(key)?,
            _ => {
                return Err(Error::UnknownParameter {
                    model: "svm",
                    name: key.into(),
                })
            }
        }
        Ok(())
    }

    pub(crate) fn to_params(&self) -> Params {
        let mut p = Params::new();
        p.insert("C".into(), ParamValue::Float(self.c));
        p.insert("kernel".into(), ParamValue::Text("linear".into()));
        p.insert("tol".into(), ParamValue::Float(self.tolerance));
        p.insert("max_iter".into(), ParamValue::Int(self.max_iterations as i64));
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvmModel {
    pub w: Vec<f64>,
    pub b: f64,
    pub c: f64,
    pub support_indices: Vec<usize>,
    /// Dual coefficient α_i of each support vector, aligned with `support_indices`.
    pub dual_coef: Vec<f64>,
    pub iterations: usize,
    /// Final KKT violating-pair gap.
    pub kkt_gap: f64,
    pub converged: bool,
}

impl LinearSvmModel {
    pub fn decision(&self, row: &[f64]) -> f64 {
        math::dot(&self.w, row) + self.b
    }
}

impl ScoredModel for LinearSvmModel {
    fn n_features(&self) -> usize {
        self.w.len()
    }

    /// Signed margin `wᵀx + b`; uncalibrated but rank-preserving.
    fn score_row(&self, row: &[f64]) -> f64 {
        self.decision(row)
    }
}

struct LinearQ<'a> {
    x: &'a Matrix,
    y: &'a [f64],
}

impl QMatrix for LinearQ<'_> {
    fn size(&self) -> usize {
        self.y.len()
    }

    fn diag(&self, i: usize) -> f64 {
        let r = self.x.row(i);
        math::dot(r, r)
    }

    fn compute_row(&self, i: usize, out: &mut [f64]) {
        let ri = self.x.row(i);
        let yi = self.y[i];
        for (j, o) in out.iter_mut().enumerate() {
            *o = yi * self.y[j] * math::dot(ri, self.x.row(j));
        }
    }
}

/// Labels mapped to ±1 (fraud = +1).
pub fn signed_labels(labels: &[u8]) -> Vec<f64> {
    labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect()
}

pub fn svm_fit(train: &Dataset, params: &SvmParams) -> Result<LinearSvmModel> {
    let [n0, n1] = train.class_counts();
    if n0 == 0 || n1 == 0 {
        return Err(Error::SingleClass {
            present: (n0 == 0) as u8,
        });
    }
    if !(params.c > 0.0) {
        return Err(Error::param("C", "must be positive"));
    }
    let x = train.features();
    let y = signed_labels(train.labels());
    let n = y.len();
    let q = LinearQ { x, y: &y };
    let config = SmoConfig {
        tolerance: params.tolerance,
        max_iterations: params.max_iterations,
        ..SmoConfig::default()
    };
    let sol = smo::solve(&q, &vec![-1.0; n], &y, params.c, vec![0.0; n], &config);

    let mut w = vec![0.0; x.cols()];
    let mut support_indices = Vec::new();
    let mut dual_coef = Vec::new();
    for (i, &a) in sol.alpha.iter().enumerate() {
        if a > 0.0 {
            support_indices.push(i);
            dual_coef.push(a);
            for (wj, xj) in w.iter_mut().zip(x.row(i)) {
                *wj += a * y[i] * xj;
            }
        }
    }
    Ok(LinearSvmModel {
        w,
        b: -sol.rho,
        c: params.c,
        support_indices,
        dual_coef,
        iterations: sol.iterations,
        kkt_gap: sol.gap,
        converged: sol.converged,
    })
}
