//! Gaussian–Bernoulli restricted Boltzmann machine trained by CD-1 and scored by free
//! energy.
//!
//! Energy with unit-variance visibles:
//! `E(x, h) = ½‖x − b‖² − cᵀh − xᵀWh`, so marginalizing the binary hiddens gives
//! `F(x) = ½‖x − b‖² − Σ_j softplus(c_j + Σ_i w_ij x_i)`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{cap_rows, require_normals};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::math;
use crate::model::{ParamValue, Params, ScoredModel};
use crate::numkit::{minibatches, Matrix, BATCH_SIZE};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbmParams {
    pub learning_rate: f64,
    pub n_hidden: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub max_train_rows: usize,
}

impl Default for RbmParams {
    fn default() -> Self {
        RbmParams {
            learning_rate: 0.0005,
            n_hidden: 10,
            epochs: 50,
            batch_size: BATCH_SIZE,
            max_train_rows: 50_000,
        }
    }
}

impl RbmParams {
    pub(crate) fn set(&mut self, key: &str, value: &ParamValue) -> Result<()> {
        match key {
            "learning_rate" => self.learning_rate = value.positive_f64(key)?,
            "num_hidden" | "n_hidden" => self.n_hidden = value.positive_usize(key)?,
            "epochs" => self.epochs = value.as_usize(key)?,
            "batch_size" => self.batch_size = value.positive_usize(key)?,
            "max_train_rows" => self.max_train_rows = value.positive_usize(key)?,
            _ => {
                return Err(Error::UnknownParameter {
                    model: "rbm",
                    name: key.into(),
                })
            }
        }
        Ok(())
    }

    pub(crate) fn to_params(&self) -> Params {
        let mut p = Params::new();
        p.insert("learning_rate".into(), ParamValue::Float(self.learning_rate));
        p.insert("num_hidden".into(), ParamValue::Int(self.n_hidden as i64));
        p.insert("epochs".into(), ParamValue::Int(self.epochs as i64));
        p.insert("batch_size".into(), ParamValue::Int(self.batch_size as i64));
        p.insert("max_train_rows".into(), ParamValue::Int(self.max_train_rows as i64));
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbmModel {
    /// `n_visible x n_hidden`
    pub weights: Matrix,
    pub visible_bias: Vec<f64>,
    pub hidden_bias: Vec<f64>,
    /// Mean squared mean-field reconstruction error after each epoch.
    pub reconstruction_error: Vec<f64>,
}

impl RbmModel {
    /// Untrained model with the given parameters (used by tests and degenerate fits).
    pub fn from_parts(weights: Matrix, visible_bias: Vec<f64>, hidden_bias: Vec<f64>) -> Self {
        RbmModel {
            weights,
            visible_bias,
            hidden_bias,
            reconstruction_error: Vec::new(),
        }
    }

    pub fn n_visible(&self) -> usize {
        self.weights.rows()
    }

    pub fn n_hidden(&self) -> usize {
        self.weights.cols()
    }

    /// Pre-activation `c_j + Σ_i w_ij x_i` of each hidden unit.
    fn hidden_input(&self, x: &[f64]) -> Vec<f64> {
        let mut act = self.hidden_bias.clone();
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (a, w) in act.iter_mut().zip(self.weights.row(i)) {
                *a += xi * w;
            }
        }
        act
    }

    /// `p(h_j = 1 | x) = σ(c_j + Σ_i w_ij x_i)`, independently per unit.
    pub fn hidden_probs(&self, x: &[f64]) -> Vec<f64> {
        let mut a = self.hidden_input(x);
        for v in &mut a {
            *v = math::sigmoid(*v);
        }
        a
    }

    /// Mean of the Gaussian visibles given hidden states: `b + W h`.
    pub fn visible_mean(&self, h: &[f64]) -> Vec<f64> {
        (0..self.n_visible())
            .map(|i| self.visible_bias[i] + math::dot(self.weights.row(i), h))
            .collect()
    }

    pub fn free_energy(&self, x: &[f64]) -> f64 {
        let quad: f64 = 0.5
            * x.iter()
                .zip(&self.visible_bias)
                .map(|(xi, bi)| (xi - bi) * (xi - bi))
                .sum::<f64>();
        quad - self.hidden_input(x).into_iter().map(math::softplus).sum::<f64>()
    }

    /// Energy of a joint configuration.
    pub fn energy(&self, x: &[f64], h: &[f64]) -> f64 {
        let quad: f64 = 0.5
            * x.iter()
                .zip(&self.visible_bias)
                .map(|(xi, bi)| (xi - bi) * (xi - bi))
                .sum::<f64>();
        let hidden: f64 = math::dot(&self.hidden_bias, h);
        let inter: f64 = (0..self.n_visible())
            .map(|i| x[i] * math::dot(self.weights.row(i), h))
            .sum();
        quad - hidden - inter
    }

    /// Mean over rows of `‖x − (b + W p(h|x))‖²`.
    pub fn reconstruction_error(&self, x: &Matrix) -> f64 {
        let total: f64 = x
            .iter_rows()
            .map(|row| {
                let recon = self.visible_mean(&self.hidden_probs(row));
                crate::math::squared_distance(row, &recon)
            })
            .sum();
        total / x.rows().max(1) as f64
    }

    fn is_finite(&self) -> bool {
        self.weights.is_finite()
            && self.visible_bias.iter().all(|v| v.is_finite())
            && self.hidden_bias.iter().all(|v| v.is_finite())
    }
}

impl ScoredModel for RbmModel {
    fn n_features(&self) -> usize {
        self.n_visible()
    }

    /// Free energy; higher is more anomalous.
    fn score_row(&self, row: &[f64]) -> f64 {
        self.free_energy(row)
    }
}

pub fn rbm_fit(normals: &Dataset, params: &RbmParams, seed: u64) -> Result<RbmModel> {
    require_normals(normals)?;
    if !(params.learning_rate > 0.0) {
        return Err(Error::param("learning_rate", "must be positive"));
    }
    if params.n_hidden == 0 {
        return Err(Error::param("num_hidden", "must be positive"));
    }
    let train = cap_rows(normals, params.max_train_rows, rng::derive_seed(seed, 0));
    let x = train.features();
    let (nv, nh) = (x.cols(), params.n_hidden);

    let mut init_rng = rng::seeded(rng::derive_seed(seed, 1));
    let mut weights = Matrix::zeros(nv, nh);
    for w in weights.as_mut_slice() {
        *w = 0.01 * rng::standard_normal(&mut init_rng);
    }
    let mut model = RbmModel::from_parts(weights, vec![0.0; nv], vec![0.0; nh]);

    let mut rng = rng::seeded(rng::derive_seed(seed, 2));
    let mut d_w = vec![0.0; nv * nh];
    let mut d_b = vec![0.0; nv];
    let mut d_c = vec![0.0; nh];
    let mut h_sample = vec![0.0; nh];
    for epoch in 0..params.epochs {
        for batch in minibatches(x.rows(), params.batch_size, &mut rng) {
            d_w.iter_mut().for_each(|v| *v = 0.0);
            d_b.iter_mut().for_each(|v| *v = 0.0);
            d_c.iter_mut().for_each(|v| *v = 0.0);
            for &r in &batch {
                let v0 = x.row(r);
                let ph0 = model.hidden_probs(v0);
                for (h, &p) in h_sample.iter_mut().zip(&ph0) {
                    *h = if rng.random::<f64>() < p { 1.0 } else { 0.0 };
                }
                let v1 = model.visible_mean(&h_sample);
                let ph1 = model.hidden_probs(&v1);
                for i in 0..nv {
                    let row = &mut d_w[i * nh..(i + 1) * nh];
                    for j in 0..nh {
                        row[j] += v0[i] * ph0[j] - v1[i] * ph1[j];
                    }
                    d_b[i] += v0[i] - v1[i];
                }
                for j in 0..nh {
                    d_c[j] += ph0[j] - ph1[j];
                }
            }
            let scale = params.learning_rate / batch.len() as f64;
            for (w, d) in model.weights.as_mut_slice().iter_mut().zip(&d_w) {
                *w += scale * d;
            }
            for (b, d) in model.visible_bias.iter_mut().zip(&d_b) {
                *b += scale * d;
            }
            for (c, d) in model.hidden_bias.iter_mut().zip(&d_c) {
                *c += scale * d;
            }
        }
        if !model.is_finite() {
            return Err(Error::Diverged {
                model: "rbm",
                epoch: epoch + 1,
            });
        }
        let err = model.reconstruction_error(x);
        model.reconstruction_error.push(err);
    }
    Ok(model)
}
