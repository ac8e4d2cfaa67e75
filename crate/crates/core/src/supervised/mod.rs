//! Classifiers trained on labelled (balanced) data.

pub mod boost;
pub mod forest;
pub mod knn;
pub mod logistic;
pub mod svm;
pub mod tree;

pub use boost::{xgb_fit, BoostedModel, XgbParams};
pub use forest::{rf_fit, ForestModel, MaxFeatures, RfParams};
pub use knn::{knn_fit, KnnModel, KnnParams};
pub use logistic::{logistic_loss_and_grad, lr_fit, LogisticModel, LrParams};
pub use svm::{svm_fit, LinearSvmModel, SvmParams};
pub use tree::{dt_fit, DtParams, TreeModel};
