use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{DenseNet, Gradients};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Sgd,
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

/// First-order optimizer. Moment buffers are keyed by parameter slot and created on
/// first use with the shape of the parameter they track.
#[derive(Debug, Clone)]
pub struct Optimizer {
    kind: OptimizerKind,
    learning_rate: f64,
    step: u64,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, learning_rate: f64) -> Self {
        Optimizer {
            kind,
            learning_rate,
            step: 0,
            first: Vec::new(),
            second: Vec::new(),
        }
    }

    pub fn sgd(learning_rate: f64) -> Self {
        Self::new(OptimizerKind::Sgd, learning_rate)
    }

    /// Adam with β1 = 0.9, β2 = 0.999, ε = 1e-8.
    pub fn adam(learning_rate: f64) -> Self {
        Self::new(
            OptimizerKind::Adam {
                beta1: 0.9,
                beta2: 0.999,
                eps: 1e-8,
            },
            learning_rate,
        )
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    /// Starts a new update; call once before the per-slot [`Optimizer::update`] calls.
    pub fn begin_step(&mut self) {
        self.step += 1;
    }

    pub fn update(&mut self, slot: usize, params: &mut [f64], grads: &[f64]) {
        assert_eq!(params.len(), grads.len(), "parameter/gradient length");
        match self.kind {
            OptimizerKind::Sgd => {
                for (p, g) in params.iter_mut().zip(grads) {
                    *p -= self.learning_rate * g;
                }
            }
            OptimizerKind::Adam { beta1, beta2, eps } => {
                while self.first.len() <= slot {
                    self.first.push(Vec::new());
                    self.second.push(Vec::new());
                }
                if self.first[slot].len() != params.len() {
                    self.first[slot] = vec![0.0; params.len()];
                    self.second[slot] = vec![0.0; params.len()];
                }
                let t = self.step.max(1) as f64;
                let c1 = 1.0 - libm::pow(beta1, t);
                let c2 = 1.0 - libm::pow(beta2, t);
                let m = &mut self.first[slot];
                let v = &mut self.second[slot];
                for i in 0..params.len() {
                    let g = grads[i];
                    m[i] = beta1 * m[i] + (1.0 - beta1) * g;
                    v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
                    let m_hat = m[i] / c1;
                    let v_hat = v[i] / c2;
                    params[i] -= self.learning_rate * m_hat / (math::sqrt(v_hat) + eps);
                }
            }
        }
    }

    /// Single-slot step: `begin_step` followed by `update(0, ..)`.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        self.begin_step();
        self.update(0, params, grads);
    }

    /// Applies `grads` to every layer of `net`. Slots `2l` and `2l + 1` hold layer `l`'s
    /// weights and bias, so one optimizer must not be shared between networks.
    pub fn step_net(&mut self, net: &mut DenseNet, grads: &Gradients) {
        self.begin_step();
        for (l, (layer, g)) in net.layers_mut().iter_mut().zip(&grads.layers).enumerate() {
            self.update(2 * l, layer.weights.as_mut_slice(), g.weights.as_slice());
            self.update(2 * l + 1, &mut layer.bias, &g.bias);
        }
    }
}
