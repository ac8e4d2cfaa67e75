//! Transaction table, preprocessing (robust scaling, balanced downsampling), stratified
//! folds and the synthetic generator.

mod dataset;
mod folds;
mod sample;
mod scale;
mod synth;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

pub use dataset::Dataset;
pub use folds::{stratified_kfold, FoldPlan};
pub use sample::downsample_balanced;
pub use scale::{quantile_sorted, robust_scale, ScalerParams};
pub use synth::synth_generate;

/// Label column of the transaction CSV.
pub const LABEL_COLUMN: &str = "Class";

/// Columns robust-scaled by default. The `V*` columns are already PCA outputs.
pub const DEFAULT_SCALED_COLUMNS: [&str; 2] = ["Time", "Amount"];

/// `Time, V1, …, V28, Amount`: the 30 feature columns of the transaction table.
pub fn kaggle_feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(30);
    names.push(String::from("Time"));
    names.extend((1..=28).map(|i| format!("V{i}")));
    names.push(String::from("Amount"));
    names
}

/// Indices of the named columns that exist in `data`; unknown names are skipped.
pub fn column_indices(data: &Dataset, names: &[String]) -> Vec<usize> {
    names.iter().filter_map(|n| data.column_index(n)).collect()
}
