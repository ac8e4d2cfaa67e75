//! Dense auto-encoder scored by reconstruction 2-norm.
//!
//! Encoder: 16 ReLU, 32 ReLU, then a linear bottleneck. Decoder: 32 ReLU, 16 ReLU, then a
//! linear layer back to the input width.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{cap_rows, require_normals};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::math;
use crate::model::{ParamValue, Params, ScoredModel};
use crate::numkit::{minibatches, Activation, DenseNet, Gradients, LayerSpec, Matrix, Optimizer, BATCH_SIZE};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AeParams {
    pub epochs: usize,
    pub learning_rate: f64,
    pub bottleneck: usize,
    pub batch_size: usize,
    pub max_train_rows: usize,
}

impl Default for AeParams {
    fn default() -> Self {
        AeParams {
            epochs: 50,
            learning_rate: 1e-3,
            bottleneck: 12,
            batch_size: BATCH_SIZE,
            max_train_rows: 50_000,
        }
    }
}

impl AeParams {
    pub(crate) fn set(&mut self, key: &str, value: &ParamValue) -> Result<()> {
        match key {
            "epochs" => self.epochs = value.as_usize(key)?,
            "learning_rate" => self.learning_rate = value.positive_f64(key)?,
            "bottleneck" => self.bottleneck = value.positive_usize(key)?,
            "batch_size" => self.batch_size = value.positive_usize(key)?,
            "max_train_rows" => self.max_train_rows = value.positive_usize(key)?,
            _ => {
                return Err(Error::UnknownParameter {
                    model: "ae",
                    name: key.into(),
                })
            }
        }
        Ok(())
    }

    pub(crate) fn to_params(&self) -> Params {
        let mut p = Params::new();
        p.insert("epochs".into(), ParamValue::Int(self.epochs as i64));
        p.insert("learning_rate".into(), ParamValue::Float(self.learning_rate));
        p.insert("bottleneck".into(), ParamValue::Int(self.bottleneck as i64));
        p.insert("batch_size".into(), ParamValue::Int(self.batch_size as i64));
        p.insert("max_train_rows".into(), ParamValue::Int(self.max_train_rows as i64));
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AeModel {
    pub encoder: DenseNet,
    pub decoder: DenseNet,
    pub epochs_trained: usize,
    /// Mean training loss of each epoch.
    pub loss_history: Vec<f64>,
}

impl AeModel {
    /// Freshly initialized network for inputs of width `input_dim`.
    pub fn new(input_dim: usize, bottleneck: usize, seed: u64) -> Self {
        let encoder = DenseNet::new(
            input_dim,
            &[
                LayerSpec::new(16, Activation::Relu),
                LayerSpec::new(32, Activation::Relu),
                LayerSpec::new(bottleneck, Activation::Linear),
            ],
            rng::derive_seed(seed, 0),
        );
        let decoder = DenseNet::new(
            bottleneck,
            &[
                LayerSpec::new(32, Activation::Relu),
                LayerSpec::new(16, Activation::Relu),
                LayerSpec::new(input_dim, Activation::Linear),
            ],
            rng::derive_seed(seed, 1),
        );
        AeModel {
            encoder,
            decoder,
            epochs_trained: 0,
            loss_history: Vec::new(),
        }
    }

    pub fn from_nets(encoder: DenseNet, decoder: DenseNet) -> Result<Self> {
        if encoder.output_dim() != decoder.input_dim() || decoder.output_dim() != encoder.input_dim() {
            return Err(Error::Shape {
                context: "AeModel::from_nets",
                expected: encoder.input_dim(),
                found: decoder.output_dim(),
            });
        }
        Ok(AeModel {
            encoder,
            decoder,
            epochs_trained: 0,
            loss_history: Vec::new(),
        })
    }

    /// `D(E(x))` for every row.
    pub fn reconstruct(&self, batch: &Matrix) -> Result<Matrix> {
        self.decoder.predict(&self.encoder.predict(batch)?)
    }

    /// Mean squared error over all entries of the batch, with gradients for encoder and
    /// decoder parameters.
    pub fn loss_and_gradients(&self, batch: &Matrix) -> Result<(f64, Gradients, Gradients)> {
        let (code, enc_cache) = self.encoder.forward(batch)?;
        let (recon, dec_cache) = self.decoder.forward(&code)?;
        let count = (batch.rows() * batch.cols()).max(1) as f64;
        let mut grad = recon;
        let mut loss = 0.0;
        for (g, &x) in grad.as_mut_slice().iter_mut().zip(batch.as_slice()) {
            let diff = *g - x;
            loss += diff * diff;
            *g = 2.0 * diff / count;
        }
        let (dec_grads, code_grad) = self.decoder.backward(&dec_cache, &grad)?;
        let (enc_grads, _) = self.encoder.backward(&enc_cache, &code_grad)?;
        Ok((loss / count, enc_grads, dec_grads))
    }
}

impl ScoredModel for AeModel {
    fn n_features(&self) -> usize {
        self.encoder.input_dim()
    }

    /// `‖x − D(E(x))‖₂`.
    fn score_row(&self, row: &[f64]) -> f64 {
        let x = Matrix::from_vec(1, row.len(), row.to_vec()).expect("row matrix");
        let recon = self.reconstruct(&x).expect("input width checked by caller");
        math::sqrt(math::squared_distance(row, recon.row(0)))
    }

    fn score(&self, rows: &Matrix) -> Result<Vec<f64>> {
        self.check_width(rows)?;
        let recon = self.reconstruct(rows)?;
        Ok(rows
            .iter_rows()
            .zip(recon.iter_rows())
            .map(|(x, r)| math::sqrt(math::squared_distance(x, r)))
            .collect())
    }
}

pub fn ae_fit(normals: &Dataset, params: &AeParams, seed: u64) -> Result<AeModel> {
    require_normals(normals)?;
    if !(params.learning_rate > 0.0) {
        return Err(Error::param("learning_rate", "must be positive"));
    }
    let train = cap_rows(normals, params.max_train_rows, rng::derive_seed(seed, 0));
    let x = train.features();
    let mut model = AeModel::new(x.cols(), params.bottleneck, rng::derive_seed(seed, 1));
    let mut enc_opt = Optimizer::adam(params.learning_rate);
    let mut dec_opt = Optimizer::adam(params.learning_rate);
    let mut rng = rng::seeded(rng::derive_seed(seed, 2));

    for epoch in 0..params.epochs {
        let mut total = 0.0;
        for batch in minibatches(x.rows(), params.batch_size, &mut rng) {
            let xb = x.select_rows(&batch);
            let (loss, enc_g, dec_g) = model.loss_and_gradients(&xb)?;
            total += loss * batch.len() as f64;
            enc_opt.step_net(&mut model.encoder, &enc_g);
            dec_opt.step_net(&mut model.decoder, &dec_g);
        }
        if !(model.encoder.is_finite() && model.decoder.is_finite()) {
            return Err(Error::Diverged {
                model: "ae",
                epoch: epoch + 1,
            });
        }
        model.loss_history.push(total / x.rows() as f64);
        model.epochs_trained = epoch + 1;
    }
    Ok(model)
}
