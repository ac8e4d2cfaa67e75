//! Anomaly scorers trained on normal (label 0) rows only. Scores follow the shared
//! contract: higher means more anomalous, hence more fraud-like.

pub mod autoencoder;
pub mod gan;
pub mod ocsvm;
pub mod rbm;

pub use autoencoder::{ae_fit, AeModel, AeParams};
pub use gan::{gan_fit, GanModel, GanParams};
pub use ocsvm::{ocsvm_fit, OcsvmModel, OcsvmParams};
pub use rbm::{rbm_fit, RbmModel, RbmParams};

use alloc::vec::Vec;

use rand::seq::index;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng;

/// Rejects empty input and any fraud-labelled row.
pub(crate) fn require_normals(data: &Dataset) -> Result<()> {
    if data.n_rows() == 0 {
        return Err(Error::InvalidData("no normal rows to train on".into()));
    }
    let fraud = data.class_counts()[1];
    if fraud > 0 {
        return Err(Error::LabelLeak { count: fraud });
    }
    Ok(())
}

/// Uniform sample without replacement of at most `max` rows, kept in original order.
pub(crate) fn cap_rows(data: &Dataset, max: usize, seed: u64) -> Dataset {
    if data.n_rows() <= max {
        return data.clone();
    }
    let mut rng = rng::seeded(seed);
    let mut picked: Vec<usize> = index::sample(&mut rng, data.n_rows(), max).into_vec();
    picked.sort_unstable();
    data.subset(&picked)
}
