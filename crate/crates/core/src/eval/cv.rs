use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::roc::auroc;
use crate::data::{column_indices, downsample_balanced, robust_scale, Dataset, FoldPlan, ScalerParams, DEFAULT_SCALED_COLUMNS};
use crate::error::{Error, Result};
use crate::math;
use crate::model::{ModelSpec, Params, ScoredModel, Track};
use crate::rng;

/// Something that can be fitted inside the cross-validation protocol.
pub trait Learner {
    type Model: ScoredModel;

    fn name(&self) -> String;
    fn track(&self) -> Track;
    fn params(&self) -> Params;
    fn fit(&self, train: &Dataset, seed: u64) -> Result<Self::Model>;
}

impl Learner for ModelSpec {
    type Model = crate::model::FittedModel;

    fn name(&self) -> String {
        self.kind().name().into()
    }

    fn track(&self) -> Track {
        ModelSpec::track(self)
    }

    fn params(&self) -> Params {
        ModelSpec::params(self)
    }

    fn fit(&self, train: &Dataset, seed: u64) -> Result<Self::Model> {
        ModelSpec::fit(self, train, seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvOptions {
    /// Columns robust-scaled with statistics from each training fold. Names absent from
    /// the data are ignored.
    pub scale_columns: Vec<String>,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions {
            scale_columns: DEFAULT_SCALED_COLUMNS.iter().map(|&s| s.into()).collect(),
        }
    }
}

/// Scaler fitted on a training fold followed by the model fitted on the scaled rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedPipeline<M> {
    pub scaler: ScalerParams,
    pub model: M,
}

impl<M: ScoredModel> FittedPipeline<M> {
    /// Scores raw (unscaled) rows of `data`.
    pub fn score(&self, data: &Dataset) -> Result<Vec<f64>> {
        let scaled = self.scaler.apply(data)?;
        self.model.score(scaled.features())
    }
}

#[derive(Debug, Clone)]
pub struct FoldOutcome<M> {
    pub fold: usize,
    pub pipeline: FittedPipeline<M>,
    pub test_indices: Vec<usize>,
    pub scores: Vec<f64>,
    pub auroc: f64,
    /// Rows the model was fitted on, after downsampling or normal-only filtering.
    pub fit_rows: usize,
}

/// Per-fold and pooled AUROC of one model under one fold plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub model: String,
    pub track: Track,
    pub params: Params,
    pub seed: u64,
    pub per_fold_auroc: Vec<f64>,
    /// AUROC of all out-of-fold scores pooled together.
    pub pooled_auroc: f64,
    pub mean: f64,
    /// Sample standard deviation of the per-fold values.
    pub std: f64,
}

fn fold_error(fold: usize) -> impl Fn(Error) -> Error {
    move |e| Error::Fold {
        fold,
        source: Box::new(e),
    }
}

/// Fits the scaler on `train`, selects the fitting rows for the learner's track (balanced
/// downsample or normals only) and fits the model on them. Returns the pipeline and the
/// number of rows the model saw.
pub fn fit_pipeline<L: Learner + ?Sized>(
    learner: &L,
    train: &Dataset,
    opts: &CvOptions,
    seed: u64,
) -> Result<(FittedPipeline<L::Model>, usize)> {
    let columns = column_indices(train, &opts.scale_columns);
    let (train_scaled, scaler) = robust_scale(train, &columns)?;
    let fit_set = match learner.track() {
        Track::Supervised => downsample_balanced(&train_scaled, rng::derive_seed(seed, 0))?,
        Track::Unsupervised => train_scaled.normals(),
    };
    let model = learner.fit(&fit_set, rng::derive_seed(seed, 1))?;
    Ok((FittedPipeline { scaler, model }, fit_set.n_rows()))
}

/// Fits and evaluates one fold. Only training-fold rows reach the scaler, downsampler
/// and model; the test fold is touched only for scoring.
pub fn run_fold<L: Learner + ?Sized>(
    learner: &L,
    data: &Dataset,
    plan: &FoldPlan,
    fold: usize,
    opts: &CvOptions,
    seed: u64,
) -> Result<FoldOutcome<L::Model>> {
    if plan.n_rows() != data.n_rows() {
        return Err(Error::Shape {
            context: "fold plan rows",
            expected: data.n_rows(),
            found: plan.n_rows(),
        });
    }
    let wrap = fold_error(fold);
    let fold_seed = rng::derive_seed(seed, fold as u64);
    let train = data.subset(&plan.train_indices(fold));
    let (pipeline, fit_rows) = fit_pipeline(learner, &train, opts, fold_seed).map_err(&wrap)?;

    let test_indices = plan.test_indices(fold);
    let test = data.subset(&test_indices);
    let scores = pipeline.score(&test).map_err(&wrap)?;
    let auroc = auroc(&scores, test.labels()).map_err(&wrap)?;
    Ok(FoldOutcome {
        fold,
        pipeline,
        test_indices,
        scores,
        auroc,
        fit_rows,
    })
}

/// Combines fold outcomes (in any order) into a [`CvResult`].
pub fn assemble_folds<L: Learner + ?Sized>(
    learner: &L,
    data: &Dataset,
    seed: u64,
    outcomes: &[FoldOutcome<L::Model>],
) -> Result<CvResult> {
    let mut sorted: Vec<&FoldOutcome<L::Model>> = outcomes.iter().collect();
    sorted.sort_by_key(|o| o.fold);
    let per_fold_auroc: Vec<f64> = sorted.iter().map(|o| o.auroc).collect();
    let mut pooled_scores = Vec::with_capacity(data.n_rows());
    let mut pooled_labels = Vec::with_capacity(data.n_rows());
    for o in &sorted {
        pooled_scores.extend_from_slice(&o.scores);
        pooled_labels.extend(o.test_indices.iter().map(|&i| data.labels()[i]));
    }
    Ok(CvResult {
        model: learner.name(),
        track: learner.track(),
        params: learner.params(),
        seed,
        pooled_auroc: auroc(&pooled_scores, &pooled_labels)?,
        mean: math::mean(&per_fold_auroc),
        std: math::sample_std(&per_fold_auroc),
        per_fold_auroc,
    })
}

/// Runs every fold of `plan` in order and assembles the result.
pub fn cross_validate<L: Learner + ?Sized>(
    learner: &L,
    data: &Dataset,
    plan: &FoldPlan,
    opts: &CvOptions,
    seed: u64,
) -> Result<CvResult> {
    let outcomes = (0..plan.k())
        .map(|f| run_fold(learner, data, plan, f, opts, seed))
        .collect::<Result<Vec<_>>>()?;
    assemble_folds(learner, data, seed, &outcomes)
}
