//! Dense linear algebra, feed-forward networks, optimizers and the SMO QP solver shared
//! by the model implementations.

mod matrix;
mod net;
mod optim;
pub mod smo;

pub use matrix::Matrix;
pub use net::{Activation, Dense, DenseGrad, DenseNet, ForwardCache, Gradients, LayerSpec};
pub use optim::{Optimizer, OptimizerKind};

use alloc::vec::Vec;

use crate::rng::SeededRng;
use rand::seq::SliceRandom;

/// Mini-batch size used by every network trainer.
pub const BATCH_SIZE: usize = 64;

/// Shuffled mini-batch index lists covering `0..n`.
pub fn minibatches(n: usize, batch_size: usize, rng: &mut SeededRng) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order.chunks(batch_size.max(1)).map(<[usize]>::to_vec).collect()
}
