//! Dense feed-forward networks with hand-derived backpropagation.

use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{Error, Result};
use crate::math;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    LeakyRelu(f64),
    Linear,
    Sigmoid,
    Tanh,
}

impl Activation {
    /// Leaky ReLU with the slope used wherever a network calls for "leaky ReLU".
    pub const LEAKY: Activation = Activation::LeakyRelu(0.2);

    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::LeakyRelu(slope) => {
                if z > 0.0 {
                    z
                } else {
                    slope * z
                }
            }
            Activation::Linear => z,
            Activation::Sigmoid => math::sigmoid(z),
            Activation::Tanh => math::tanh(z),
        }
    }

    /// d(activation)/dz given the pre-activation `z` and its output `a`.
    #[inline]
    pub fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::LeakyRelu(slope) => {
                if z > 0.0 {
                    1.0
                } else {
                    slope
                }
            }
            Activation::Linear => 1.0,
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Tanh => 1.0 - a * a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerSpec {
    pub units: usize,
    pub activation: Activation,
}

impl LayerSpec {
    pub const fn new(units: usize, activation: Activation) -> Self {
        LayerSpec { units, activation }
    }
}

/// One affine layer: `activation(x · weights + bias)` with `weights` shaped `in x out`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub weights: Matrix,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl Dense {
    pub fn input_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.cols()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseNet {
    layers: Vec<Dense>,
    rng_seed: u64,
}

/// Activations recorded by [`DenseNet::forward`] for the matching backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    inputs: Vec<Matrix>,
    pre: Vec<Matrix>,
    output: Matrix,
}

impl ForwardCache {
    pub fn output(&self) -> &Matrix {
        &self.output
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseGrad {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

/// Parameter gradients, one entry per layer, shaped like the network.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<DenseGrad>,
}

impl Gradients {
    pub fn zeros_like(net: &DenseNet) -> Self {
        Gradients {
            layers: net
                .layers
                .iter()
                .map(|l| DenseGrad {
                    weights: Matrix::zeros(l.input_dim(), l.output_dim()),
                    bias: alloc::vec![0.0; l.output_dim()],
                })
                .collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            for (x, y) in a.weights.as_mut_slice().iter_mut().zip(b.weights.as_slice()) {
                *x += y;
            }
            for (x, y) in a.bias.iter_mut().zip(&b.bias) {
                *x += y;
            }
        }
    }

    /// Flattened in the same order as [`DenseNet::flat_params`].
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for l in &self.layers {
            out.extend_from_slice(l.weights.as_slice());
            out.extend_from_slice(&l.bias);
        }
        out
    }
}

impl DenseNet {
    /// Glorot-uniform weights, zero biases.
    pub fn new(input_dim: usize, specs: &[LayerSpec], seed: u64) -> Self {
        let mut rng = rng::seeded(seed);
        let mut fan_in = input_dim;
        let mut layers = Vec::with_capacity(specs.len());
        for spec in specs {
            let limit = math::sqrt(6.0 / (fan_in + spec.units) as f64);
            let mut weights = Matrix::zeros(fan_in, spec.units);
            for w in weights.as_mut_slice() {
                *w = rng.random_range(-limit..limit);
            }
            layers.push(Dense {
                weights,
                bias: alloc::vec![0.0; spec.units],
                activation: spec.activation,
            });
            fan_in = spec.units;
        }
        DenseNet {
            layers,
            rng_seed: seed,
        }
    }

    pub fn from_layers(layers: Vec<Dense>) -> Result<Self> {
        for (i, l) in layers.iter().enumerate() {
            if l.bias.len() != l.output_dim() {
                return Err(Error::Shape {
                    context: "DenseNet::from_layers bias",
                    expected: l.output_dim(),
                    found: l.bias.len(),
                });
            }
            if i > 0 && layers[i - 1].output_dim() != l.input_dim() {
                return Err(Error::Shape {
                    context: "DenseNet::from_layers chain",
                    expected: layers[i - 1].output_dim(),
                    found: l.input_dim(),
                });
            }
        }
        Ok(DenseNet {
            layers,
            rng_seed: 0,
        })
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, Dense::input_dim)
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, Dense::output_dim)
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.is_finite() && l.bias.iter().all(|b| b.is_finite()))
    }

    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for l in &self.layers {
            out.extend_from_slice(l.weights.as_slice());
            out.extend_from_slice(&l.bias);
        }
        out
    }

    pub fn set_flat_params(&mut self, flat: &[f64]) {
        let mut offset = 0;
        for l in &mut self.layers {
            let w = l.weights.as_mut_slice();
            w.copy_from_slice(&flat[offset..offset + w.len()]);
            offset += w.len();
            let n = l.bias.len();
            l.bias.copy_from_slice(&flat[offset..offset + n]);
            offset += n;
        }
    }

    fn check_input(&self, batch: &Matrix) -> Result<()> {
        if batch.cols() != self.input_dim() {
            return Err(Error::Shape {
                context: "DenseNet::forward input width",
                expected: self.input_dim(),
                found: batch.cols(),
            });
        }
        Ok(())
    }

    fn affine(layer: &Dense, input: &Matrix) -> Matrix {
        let mut z = input.matmul(&layer.weights);
        for r in 0..z.rows() {
            for (v, b) in z.row_mut(r).iter_mut().zip(&layer.bias) {
                *v += b;
            }
        }
        z
    }

    pub fn forward(&self, batch: &Matrix) -> Result<(Matrix, ForwardCache)> {
        self.check_input(batch)?;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut current = batch.clone();
        for layer in &self.layers {
            let z = Self::affine(layer, &current);
            let mut a = z.clone();
            let act = layer.activation;
            a.map_inplace(|v| act.apply(v));
            inputs.push(current);
            pre.push(z);
            current = a;
        }
        let cache = ForwardCache {
            inputs,
            pre,
            output: current.clone(),
        };
        Ok((current, cache))
    }

    /// Forward pass without keeping intermediate activations.
    pub fn predict(&self, batch: &Matrix) -> Result<Matrix> {
        self.check_input(batch)?;
        let mut current = batch.clone();
        for layer in &self.layers {
            let mut z = Self::affine(layer, &current);
            let act = layer.activation;
            z.map_inplace(|v| act.apply(v));
            current = z;
        }
        Ok(current)
    }

    /// Backpropagates `loss_grad` (dL/d output) through the cached forward pass.
    /// Returns parameter gradients and dL/d input.
    pub fn backward(&self, cache: &ForwardCache, loss_grad: &Matrix) -> Result<(Gradients, Matrix)> {
        if cache.pre.len() != self.layers.len() {
            return Err(Error::Shape {
                context: "DenseNet::backward cache depth",
                expected: self.layers.len(),
                found: cache.pre.len(),
            });
        }
        for (layer, z) in self.layers.iter().zip(&cache.pre) {
            if z.cols() != layer.output_dim() {
                return Err(Error::Shape {
                    context: "DenseNet::backward stale cache",
                    expected: layer.output_dim(),
                    found: z.cols(),
                });
            }
        }
        if loss_grad.rows() != cache.output.rows() || loss_grad.cols() != cache.output.cols() {
            return Err(Error::Shape {
                context: "DenseNet::backward loss gradient",
                expected: cache.output.rows() * cache.output.cols(),
                found: loss_grad.rows() * loss_grad.cols(),
            });
        }

        let mut grads = Vec::with_capacity(self.layers.len());
        let mut upstream = loss_grad.clone();
        for (idx, layer) in self.layers.iter().enumerate().rev() {
            let z = &cache.pre[idx];
            let a = if idx + 1 < self.layers.len() {
                &cache.inputs[idx + 1]
            } else {
                &cache.output
            };
            let mut dz = upstream;
            let act = layer.activation;
            for ((d, &zv), &av) in dz
                .as_mut_slice()
                .iter_mut()
                .zip(z.as_slice())
                .zip(a.as_slice())
            {
                *d *= act.derivative(zv, av);
            }
            let dw = cache.inputs[idx].t_matmul(&dz);
            let mut db = alloc::vec![0.0; layer.output_dim()];
            for r in 0..dz.rows() {
                for (b, v) in db.iter_mut().zip(dz.row(r)) {
                    *b += v;
                }
            }
            upstream = dz.matmul_t(&layer.weights);
            grads.push(DenseGrad {
                weights: dw,
                bias: db,
            });
        }
        grads.reverse();
        Ok((Gradients { layers: grads }, upstream))
    }
}
