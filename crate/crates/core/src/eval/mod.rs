//! ROC analysis, the k-fold cross-validation protocol and grid search.

mod cv;
mod grid;
mod roc;

pub use cv::{
    assemble_folds, cross_validate, fit_pipeline, run_fold, CvOptions, CvResult, FittedPipeline, FoldOutcome, Learner,
};
pub use grid::{grid_points, grid_search, Grid, GridSearchResult};
pub use roc::{auroc, roc_curve, RocCurve};
