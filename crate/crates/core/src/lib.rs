//! Supervised classifiers, unsupervised anomaly scorers and the ROC/cross-validation
//! protocol used to compare them on credit-card transaction data.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the CLI and anything touching
//! the filesystem live in the `fraudbench` companion crate.
//!
//! Every fitted model implements [`ScoredModel`]: it maps a feature row to a real fraud
//! score where higher means more fraud-like, so a single ROC pipeline serves all ten
//! models.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod data;
pub mod error;
pub mod eval;
pub mod math;
pub mod model;
pub mod numkit;
pub mod rng;
pub mod supervised;
pub mod unsupervised;

pub use data::{Dataset, FoldPlan, ScalerParams};
pub use error::{Error, Result};
pub use eval::{CvOptions, CvResult, RocCurve};
pub use model::{FittedModel, ModelKind, ModelSpec, ParamValue, Params, ScoredModel, Track};
pub use numkit::Matrix;
