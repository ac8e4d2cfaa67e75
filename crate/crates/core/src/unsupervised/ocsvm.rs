//! ν one-class SVM with an RBF kernel, dual solved by SMO:
//! `min ½ αᵀKα  s.t.  Σα = 1,  0 ≤ α_i ≤ 1/(νn)`.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{cap_rows, require_normals};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::math;
use crate::model::{ParamValue, Params, ScoredModel};
use crate::numkit::smo::{self, QMatrix, SmoConfig};
use crate::numkit::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcsvmParams {
    pub nu: f64,
    pub gamma: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Training normals are uniformly subsampled to at most this many rows.
    pub max_train_rows: usize,
}

impl Default for OcsvmParams {
    fn default() -> Self {
        OcsvmParams {
            nu: 0.1,
            gamma: 0.001,
            tolerance: 1e-3,
            max_iterations: 10_000_000,
            max_train_rows: 20_000,
        }
    }
}

impl OcsvmParams {
    pub(crate) fn set(&mut self, key: &str, value: &ParamValue) -> Result<()> {
        match key {
            "nu" => {
                let nu = value.positive_f64(key)?;
                if nu > 1.0 {
                    return Err(Error::param(key, "must be in (0, 1]"));
                }
                self.nu = nu;
            }
            "gamma" => self.gamma = value.positive_f64(key)?,
            "kernel" => value.expect_text(key, &["rbf"])?,
            "tol" => self.tolerance = value.positive_f64(key)?,
            "max_iter" => self.max_iterations = value.as_usize(key)?,
            "max_train_rows" => self.max_train_rows = value.positive_usize(key)?,
            _ => {
                return Err(Error::UnknownParameter {
                    model: "ocsvm",
                    name: key.into(),
                })
            }
        }
        Ok(())
    }

    pub(crate) fn to_params(&self) -> Params {
        let mut p = Params::new();
        p.insert("nu".into(), ParamValue::Float(self.nu));
        p.insert("gamma".into(), ParamValue::Float(self.gamma));
        p.insert("kernel".into(), ParamValue::Text("rbf".into()));
        p.insert("tol".into(), ParamValue::Float(self.tolerance));
        p.insert("max_iter".into(), ParamValue::Int(self.max_iterations as i64));
        p.insert("max_train_rows".into(), ParamValue::Int(self.max_train_rows as i64));
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcsvmModel {
    pub support_vectors: Matrix,
    /// Dual coefficients of the support vectors (all > 0, summing to 1).
    pub alpha: Vec<f64>,
    pub rho: f64,
    pub gamma: f64,
    pub nu: f64,
    /// Rows the dual was solved over (after subsampling).
    pub n_train: usize,
    pub iterations: usize,
    pub kkt_gap: f64,
    pub converged: bool,
}

pub fn rbf(gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    math::exp(-gamma * math::squared_distance(a, b))
}

struct RbfQ<'a> {
    x: &'a Matrix,
    gamma: f64,
}

impl QMatrix for RbfQ<'_> {
    fn size(&self) -> usize {
        self.x.rows()
    }

    fn diag(&self, _i: usize) -> f64 {
        1.0
    }

    fn compute_row(&self, i: usize, out: &mut [f64]) {
        let ri = self.x.row(i);
        for (j, o) in out.iter_mut().enumerate() {
            *o = rbf(self.gamma, ri, self.x.row(j));
        }
    }
}

/// Feasible start: the first ⌊νn⌋ coefficients at the upper bound, the remainder on the
/// next one.
fn initial_alpha(n: usize, upper: f64) -> Vec<f64> {
    let mut alpha = vec![0.0; n];
    let mut remaining = 1.0;
    for a in alpha.iter_mut() {
        if remaining <= 0.0 {
            break;
        }
        let v = upper.min(remaining);
        *a = v;
        remaining -= v;
    }
    alpha
}

/// Dual solution over all rows of `x`, before support-vector extraction.
pub fn ocsvm_solve(x: &Matrix, nu: f64, gamma: f64, config: &SmoConfig) -> smo::SmoSolution {
    let n = x.rows();
    let upper = 1.0 / (nu * n as f64);
    let q = RbfQ { x, gamma };
    smo::solve(&q, &vec![0.0; n], &vec![1.0; n], upper, initial_alpha(n, upper), config)
}

pub fn ocsvm_fit(normals: &Dataset, params: &OcsvmParams, seed: u64) -> Result<OcsvmModel> {
    require_normals(normals)?;
    if !(params.nu > 0.0 && params.nu <= 1.0) {
        return Err(Error::param("nu", "must be in (0, 1]"));
    }
    if !(params.gamma > 0.0) {
        return Err(Error::param("gamma", "must be positive"));
    }
    let train = cap_rows(normals, params.max_train_rows, seed);
    let x = train.features();
    let config = SmoConfig {
        tolerance: params.tolerance,
        max_iterations: params.max_iterations,
        ..SmoConfig::default()
    };
    let sol = ocsvm_solve(x, params.nu, params.gamma, &config);
    let sv: Vec<usize> = (0..x.rows()).filter(|&i| sol.alpha[i] > 0.0).collect();
    Ok(OcsvmModel {
        support_vectors: x.select_rows(&sv),
        alpha: sv.iter().map(|&i| sol.alpha[i]).collect(),
        rho: sol.rho,
        gamma: params.gamma,
        nu: params.nu,
        n_train: x.rows(),
        iterations: sol.iterations,
        kkt_gap: sol.gap,
        converged: sol.converged,
    })
}

impl OcsvmModel {
    /// `Σ α_i k(x_i, x) − ρ`: positive inside the learned region.
    pub fn decision(&self, row: &[f64]) -> f64 {
        let s: f64 = self
            .support_vectors
            .iter_rows()
            .zip(&self.alpha)
            .map(|(sv, a)| a * rbf(self.gamma, sv, row))
            .sum();
        s - self.rho
    }
}

impl ScoredModel for OcsvmModel {
    fn n_features(&self) -> usize {
        self.support_vectors.cols()
    }

    /// `ρ − Σ α_i k(x_i, x)`; positive means outside the boundary (anomalous).
    fn score_row(&self, row: &[f64]) -> f64 {
        -self.decision(row)
    }
}
