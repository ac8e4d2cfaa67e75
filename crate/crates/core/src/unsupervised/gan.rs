//! Adversarially trained encoder/generator/discriminator triple.
//!
//! The discriminator sees pairs: `(x, E(x))` from data are labelled real, `(G(z), z)` with
//! `z ~ N(0, I)` are labelled fake. E and G are trained jointly with the non-saturating
//! objective to make D swap those labels. A row is scored by
//! `A(x) = α‖x − G(E(x))‖₁ + (1 − α)·CE(D(x, E(x)), real)`.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{cap_rows, require_normals};
use crate::data::{Dataset, DEFAULT_SCALED_COLUMNS};
use crate::error::{Error, Result};
use crate::math;
use crate::model::{ParamValue, Params, ScoredModel};
use crate::numkit::{
    minibatches, Activation, DenseNet, ForwardCache, Gradients, LayerSpec, Matrix, Optimizer, BATCH_SIZE,
};
use crate::rng;

/// Epoch-mean discriminator loss below this counts towards collapse.
pub const COLLAPSE_LOSS: f64 = 1e-3;
/// Consecutive low-loss epochs that stop training.
pub const COLLAPSE_EPOCHS: usize = 10;

/// Which feature columns the networks see.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GanColumns {
    /// Every column except `Time` and `Amount`.
    Default,
    All,
    Named(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GanParams {
    pub epochs: usize,
    pub learning_rate: f64,
    pub latent_dim: usize,
    pub alpha: f64,
    pub batch_size: usize,
    pub max_train_rows: usize,
    pub columns: GanColumns,
}

impl Default for GanParams {
    fn default() -> Self {
        GanParams {
            epochs: 50,
            learning_rate: 1e-4,
            latent_dim: 32,
            alpha: 0.9,
            batch_size: BATCH_SIZE,
            max_train_rows: 50_000,
            columns: GanColumns::Default,
        }
    }
}

impl GanParams {
    pub(crate) fn set(&mut self, key: &str, value: &ParamValue) -> Result<()> {
        match key {
            "epochs" => self.epochs = value.as_usize(key)?,
            "learning_rate" => self.learning_rate = value.positive_f64(key)?,
            "latent_dim" => self.latent_dim = value.positive_usize(key)?,
            "alpha" => {
                let a = value.non_negative_f64(key)?;
                if a > 1.0 {
                    return Err(Error::param(key, "must be in [0, 1]"));
                }
                self.alpha = a;
            }
            "batch_size" => self.batch_size = value.positive_usize(key)?,
            "max_train_rows" => self.max_train_rows = value.positive_usize(key)?,
            "input_columns" => {
                self.columns = match value.as_text(key)? {
                    "default" => GanColumns::Default,
                    "all" => GanColumns::All,
                    list => GanColumns::Named(
                        list.split(',')
                            .map(str::trim)
                            .filter(|s| !s.is_empty())
                            .map(String::from)
                            .collect(),
                    ),
                }
            }
            _ => {
                return Err(Error::UnknownParameter {
                    model: "gan",
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
        p.insert("latent_dim".into(), ParamValue::Int(self.latent_dim as i64));
        p.insert("alpha".into(), ParamValue::Float(self.alpha));
        p.insert("batch_size".into(), ParamValue::Int(self.batch_size as i64));
        p.insert("max_train_rows".into(), ParamValue::Int(self.max_train_rows as i64));
        let cols = match &self.columns {
            GanColumns::Default => String::from("default"),
            GanColumns::All => String::from("all"),
            GanColumns::Named(names) => names.join(","),
        };
        p.insert("input_columns".into(), ParamValue::Text(cols));
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GanStop {
    Completed,
    /// Discriminator loss stayed below [`COLLAPSE_LOSS`] for [`COLLAPSE_EPOCHS`] epochs
    /// ending at `epoch`; parameters were restored from the last healthy epoch.
    Collapse { epoch: usize },
    /// Parameters became non-finite at `epoch`; the last healthy parameters were kept.
    Diverged { epoch: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GanModel {
    pub encoder: DenseNet,
    pub generator: DenseNet,
    /// Input `(x, z)`, output a single logit.
    pub discriminator: DenseNet,
    pub alpha: f64,
    /// Positions of the network inputs within a full feature row.
    pub input_columns: Vec<usize>,
    /// Width of the full feature rows the model scores.
    pub n_features: usize,
    /// Epochs whose parameters the model holds.
    pub epochs_trained: usize,
    pub d_loss_history: Vec<f64>,
    pub ge_loss_history: Vec<f64>,
    pub stop: GanStop,
}

/// Losses and gradients of one adversarial evaluation.
#[derive(Debug, Clone)]
pub struct GanLosses {
    /// `mean softplus(−D(x, E(x))) + mean softplus(D(G(z), z))`
    pub d_loss: f64,
    /// `mean softplus(D(x, E(x))) + mean softplus(−D(G(z), z))`
    pub ge_loss: f64,
    pub d_grads: Gradients,
    pub e_grads: Gradients,
    pub g_grads: Gradients,
}

/// `α·l_g + (1 − α)·l_d`.
pub fn anomaly_score(l_g: f64, l_d: f64, alpha: f64) -> f64 {
    alpha * l_g + (1.0 - alpha) * l_d
}

/// Mean of `softplus(sign·logit)` over the rows of a one-column output, plus its
/// gradient with respect to the logits.
fn softplus_mean(logits: &Matrix, sign: f64) -> (f64, Matrix) {
    let n = logits.rows().max(1) as f64;
    let mut grad = logits.clone();
    let mut loss = 0.0;
    for g in grad.as_mut_slice() {
        let l = *g;
        loss += math::softplus(sign * l);
        *g = sign * math::sigmoid(sign * l) / n;
    }
    (loss / n, grad)
}

impl GanModel {
    /// Freshly initialized networks for `data_dim` inputs.
    pub fn new(data_dim: usize, latent_dim: usize, alpha: f64, seed: u64) -> Self {
        let encoder = DenseNet::new(
            data_dim,
            &[
                LayerSpec::new(32, Activation::LEAKY),
                LayerSpec::new(latent_dim, Activation::Linear),
            ],
            rng::derive_seed(seed, 0),
        );
        let generator = DenseNet::new(
            latent_dim,
            &[
                LayerSpec::new(32, Activation::Relu),
                LayerSpec::new(64, Activation::Relu),
                LayerSpec::new(data_dim, Activation::Linear),
            ],
            rng::derive_seed(seed, 1),
        );
        let discriminator = DenseNet::new(
            data_dim + latent_dim,
            &[
                LayerSpec::new(32, Activation::LEAKY),
                LayerSpec::new(1, Activation::Linear),
            ],
            rng::derive_seed(seed, 2),
        );
        GanModel {
            encoder,
            generator,
            discriminator,
            alpha,
            input_columns: (0..data_dim).collect(),
            n_features: data_dim,
            epochs_trained: 0,
            d_loss_history: Vec::new(),
            ge_loss_history: Vec::new(),
            stop: GanStop::Completed,
        }
    }

    pub fn data_dim(&self) -> usize {
        self.encoder.input_dim()
    }

    pub fn latent_dim(&self) -> usize {
        self.encoder.output_dim()
    }

    /// Both adversarial losses and all gradients at the current parameters, for data
    /// batch `x` (network input columns only) and latent batch `z`.
    pub fn adversarial_losses(&self, x: &Matrix, z: &Matrix) -> Result<GanLosses> {
        let (ex, e_cache) = self.encoder.forward(x)?;
        let (gz, g_cache) = self.generator.forward(z)?;
        let real = x.hconcat(&ex);
        let fake = gz.hconcat(z);
        let (real_logit, real_cache) = self.discriminator.forward(&real)?;
        let (fake_logit, fake_cache) = self.discriminator.forward(&fake)?;

        // discriminator: real -> 1, fake -> 0
        let (dl_real, d_real_grad) = softplus_mean(&real_logit, -1.0);
        let (dl_fake, d_fake_grad) = softplus_mean(&fake_logit, 1.0);
        let (mut d_grads, _) = self.discriminator.backward(&real_cache, &d_real_grad)?;
        let (d_fake_params, _) = self.discriminator.backward(&fake_cache, &d_fake_grad)?;
        d_grads.add_assign(&d_fake_params);

        // encoder and generator: real -> 0, fake -> 1
        let (gl_real, ge_real_grad) = softplus_mean(&real_logit, 1.0);
        let (gl_fake, ge_fake_grad) = softplus_mean(&fake_logit, -1.0);
        let (_, real_input_grad) = self.discriminator.backward(&real_cache, &ge_real_grad)?;
        let (_, fake_input_grad) = self.discriminator.backward(&fake_cache, &ge_fake_grad)?;
        let d = x.cols();
        let e_grads = self.backward_from(&self.encoder, &e_cache, &real_input_grad.col_range(d, real.cols()))?;
        let g_grads = self.backward_from(&self.generator, &g_cache, &fake_input_grad.col_range(0, d))?;

        Ok(GanLosses {
            d_loss: dl_real + dl_fake,
            ge_loss: gl_real + gl_fake,
            d_grads,
            e_grads,
            g_grads,
        })
    }

    /// Discriminator loss and its parameter gradients only.
    pub fn discriminator_loss(&self, x: &Matrix, z: &Matrix) -> Result<(f64, Gradients)> {
        let ex = self.encoder.predict(x)?;
        let gz = self.generator.predict(z)?;
        let (real_logit, real_cache) = self.discriminator.forward(&x.hconcat(&ex))?;
        let (fake_logit, fake_cache) = self.discriminator.forward(&gz.hconcat(z))?;
        let (dl_real, real_grad) = softplus_mean(&real_logit, -1.0);
        let (dl_fake, fake_grad) = softplus_mean(&fake_logit, 1.0);
        let (mut grads, _) = self.discriminator.backward(&real_cache, &real_grad)?;
        grads.add_assign(&self.discriminator.backward(&fake_cache, &fake_grad)?.0);
        Ok((dl_real + dl_fake, grads))
    }

    fn backward_from(&self, net: &DenseNet, cache: &ForwardCache, grad: &Matrix) -> Result<Gradients> {
        Ok(net.backward(cache, grad)?.0)
    }

    /// `(L_G, L_D)` for one row already restricted to the network input columns.
    pub fn components(&self, x: &[f64]) -> (f64, f64) {
        let xm = Matrix::from_vec(1, x.len(), x.to_vec()).expect("row matrix");
        let (lg, ld) = self.components_batch(&xm).expect("width checked by caller");
        (lg[0], ld[0])
    }

    fn components_batch(&self, x: &Matrix) -> Result<(Vec<f64>, Vec<f64>)> {
        let ex = self.encoder.predict(x)?;
        let recon = self.generator.predict(&ex)?;
        let logits = self.discriminator.predict(&x.hconcat(&ex))?;
        let lg = x
            .iter_rows()
            .zip(recon.iter_rows())
            .map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - q).abs()).sum())
            .collect();
        let ld = logits.as_slice().iter().map(|&l| math::softplus(-l)).collect();
        Ok((lg, ld))
    }

    /// Discriminator probability that `(x, E(x))` is a real pair.
    pub fn real_probability(&self, x: &[f64]) -> f64 {
        let xm = Matrix::from_vec(1, x.len(), x.to_vec()).expect("row matrix");
        let ex = self.encoder.predict(&xm).expect("width checked by caller");
        let logit = self.discriminator.predict(&xm.hconcat(&ex)).expect("pair width");
        math::sigmoid(logit.get(0, 0))
    }

    pub fn select_inputs(&self, row: &[f64]) -> Vec<f64> {
        self.input_columns.iter().map(|&c| row[c]).collect()
    }

    fn is_finite(&self) -> bool {
        self.encoder.is_finite() && self.generator.is_finite() && self.discriminator.is_finite()
    }
}

impl ScoredModel for GanModel {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn score_row(&self, row: &[f64]) -> f64 {
        let (lg, ld) = self.components(&self.select_inputs(row));
        anomaly_score(lg, ld, self.alpha)
    }

    fn score(&self, rows: &Matrix) -> Result<Vec<f64>> {
        self.check_width(rows)?;
        let x = rows.select_cols(&self.input_columns);
        let (lg, ld) = self.components_batch(&x)?;
        Ok(lg
            .into_iter()
            .zip(ld)
            .map(|(g, d)| anomaly_score(g, d, self.alpha))
            .collect())
    }
}

fn resolve_columns(data: &Dataset, columns: &GanColumns) -> Result<Vec<usize>> {
    let names = data.column_names();
    let picked: Vec<usize> = match columns {
        GanColumns::All => (0..names.len()).collect(),
        GanColumns::Default => (0..names.len())
            .filter(|&i| !DEFAULT_SCALED_COLUMNS.contains(&names[i].as_str()))
            .collect(),
        GanColumns::Named(wanted) => wanted
            .iter()
            .map(|w| {
                data.column_index(w).ok_or_else(|| {
                    Error::param("input_columns", alloc::format!("no column named `{w}`"))
                })
            })
            .collect::<Result<_>>()?,
    };
    if picked.is_empty() {
        return Err(Error::param("input_columns", "selects no columns"));
    }
    Ok(picked)
}

fn standard_normal_matrix(rows: usize, cols: usize, rng: &mut rng::SeededRng) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for v in m.as_mut_slice() {
        *v = rng::standard_normal(rng);
    }
    m
}

pub fn gan_fit(normals: &Dataset, params: &GanParams, seed: u64) -> Result<GanModel> {
    require_normals(normals)?;
    if !(params.learning_rate > 0.0) {
        return Err(Error::param("learning_rate", "must be positive"));
    }
    let columns = resolve_columns(normals, &params.columns)?;
    let train = cap_rows(normals, params.max_train_rows, rng::derive_seed(seed, 0));
    let x = train.features().select_cols(&columns);

    let mut model = GanModel::new(x.cols(), params.latent_dim, params.alpha, rng::derive_seed(seed, 1));
    model.input_columns = columns;
    model.n_features = normals.n_cols();

    let mut d_opt = Optimizer::adam(params.learning_rate);
    let mut e_opt = Optimizer::adam(params.learning_rate);
    let mut g_opt = Optimizer::adam(params.learning_rate);
    let mut rng = rng::seeded(rng::derive_seed(seed, 2));
    let mut checkpoint = model.clone();
    let mut low_streak = 0usize;

    for epoch in 1..=params.epochs {
        let (mut d_total, mut ge_total) = (0.0, 0.0);
        for batch in minibatches(x.rows(), params.batch_size, &mut rng) {
            let xb = x.select_rows(&batch);
            let z = standard_normal_matrix(batch.len(), params.latent_dim, &mut rng);
            let (d_loss, d_grads) = model.discriminator_loss(&xb, &z)?;
            d_opt.step_net(&mut model.discriminator, &d_grads);
            d_total += d_loss * batch.len() as f64;

            let losses = model.adversarial_losses(&xb, &z)?;
            e_opt.step_net(&mut model.encoder, &losses.e_grads);
            g_opt.step_net(&mut model.generator, &losses.g_grads);
            ge_total += losses.ge_loss * batch.len() as f64;
        }
        if !model.is_finite() {
            checkpoint.stop = GanStop::Diverged { epoch };
            return Ok(checkpoint);
        }
        let d_mean = d_total / x.rows() as f64;
        model.d_loss_history.push(d_mean);
        model.ge_loss_history.push(ge_total / x.rows() as f64);
        model.epochs_trained = epoch;
        if d_mean < COLLAPSE_LOSS {
            low_streak += 1;
            if low_streak >= COLLAPSE_EPOCHS {
                checkpoint.d_loss_history = model.d_loss_history;
                checkpoint.ge_loss_history = model.ge_loss_history;
                checkpoint.stop = GanStop::Collapse { epoch };
                return Ok(checkpoint);
            }
        } else {
            low_streak = 0;
            checkpoint = model.clone();
        }
    }
    Ok(model)
}
