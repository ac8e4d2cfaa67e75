//! Runs every configured model through cross-validation and writes the outputs.

use std::path::{Path, PathBuf};
use std::time::Instant;

use fraudbench_core::data::stratified_kfold;
use fraudbench_core::eval::{assemble_folds, grid_search, run_fold, CvResult};
use fraudbench_core::{CvOptions, Dataset, FoldPlan, ModelSpec};
use rayon::prelude::*;

use crate::config::{BenchmarkConfig, ModelEntry};
use crate::error::{Error, Result};
use crate::plots::emit_plots;
use crate::report::{BenchmarkReport, DatasetSummary, GridEntry, ModelResult, Protocol};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Record wall-clock seconds per model. Off makes the report a pure function of the
    /// config.
    pub timing: bool,
    /// Worker threads; the global rayon pool when absent.
    pub threads: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            timing: true,
            threads: None,
        }
    }
}

/// Loads the dataset and cross-validates every model. Nothing is written to disk.
pub fn run_benchmark(config: &BenchmarkConfig, opts: &RunOptions) -> Result<BenchmarkReport> {
    config.validate()?;
    let data = config.dataset.load(config.seed)?;
    run_on(config, &data, opts)
}

/// As [`run_benchmark`] on an already loaded dataset.
pub fn run_on(config: &BenchmarkConfig, data: &Dataset, opts: &RunOptions) -> Result<BenchmarkReport> {
    config.validate()?;
    let plan = stratified_kfold(data, config.k, config.seed)?;
    let cv = config.cv_options();
    let work = || -> Vec<ModelResult> {
        config
            .models
            .par_iter()
            .map(|entry| evaluate(config, entry, data, &plan, &cv, opts.timing))
            .collect()
    };
    let results = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    Ok(BenchmarkReport {
        config: config.clone(),
        protocol: Protocol::of(config),
        dataset_summary: DatasetSummary::of(data),
        results,
        artifacts: Vec::new(),
    })
}

fn evaluate(
    config: &BenchmarkConfig,
    entry: &ModelEntry,
    data: &Dataset,
    plan: &FoldPlan,
    cv: &CvOptions,
    timing: bool,
) -> ModelResult {
    let start = Instant::now();
    let seed = config.seed.wrapping_add(entry.kind.ordinal());
    let outcome = config.spec_for(entry).map_err(Error::from).and_then(|spec| match &entry.grid {
        Some(grid) => {
            let g = grid_search(&spec, grid, data, plan, cv, seed)?;
            let entries = g
                .evaluated
                .iter()
                .map(|(params, r)| GridEntry {
                    params: params.clone(),
                    mean: r.mean,
                    pooled_auroc: r.pooled_auroc,
                })
                .collect();
            Ok((g.best, Some(entries)))
        }
        None => Ok((cross_validate_parallel(&spec, data, plan, cv, seed)?, None)),
    });
    let seconds = timing.then(|| start.elapsed().as_secs_f64());
    match outcome {
        Ok((r, grid)) => ModelResult {
            model: r.model,
            track: r.track,
            params: r.params,
            seed,
            per_fold_auroc: r.per_fold_auroc,
            pooled_auroc: Some(r.pooled_auroc),
            mean: Some(r.mean),
            std: Some(r.std),
            seconds,
            error: None,
            grid,
        },
        Err(e) => ModelResult {
            model: entry.kind.name().into(),
            track: entry.kind.track(),
            params: config
                .spec_for(entry)
                .map(|s| s.params())
                .unwrap_or_else(|_| entry.params.clone()),
            seed,
            per_fold_auroc: Vec::new(),
            pooled_auroc: None,
            mean: None,
            std: None,
            seconds,
            error: Some(e.to_string()),
            grid: None,
        },
    }
}

/// Cross-validation with folds fitted concurrently; assembly is keyed by fold index, so
/// the result does not depend on scheduling.
pub fn cross_validate_parallel(
    spec: &ModelSpec,
    data: &Dataset,
    plan: &FoldPlan,
    cv: &CvOptions,
    seed: u64,
) -> Result<CvResult> {
    let outcomes = (0..plan.k())
        .into_par_iter()
        .map(|f| run_fold(spec, data, plan, f, cv, seed))
        .collect::<fraudbench_core::Result<Vec<_>>>()?;
    Ok(assemble_folds(spec, data, seed, &outcomes)?)
}

/// Writes `report.json`, `results.csv` and the plots into `dir` (created if needed) and
/// records the written file names in the report.
pub fn write_outputs(report: &mut BenchmarkReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(Error::io(dir))?;
    let plots = emit_plots(report, dir)?;
    for notice in &plots.notices {
        eprintln!("{notice}");
    }
    let csv_path = dir.join("results.csv");
    std::fs::write(&csv_path, report.results_csv()).map_err(Error::io(&csv_path))?;
    let json_path = dir.join("report.json");

    let mut written: Vec<PathBuf> = plots.paths;
    written.push(csv_path);
    written.push(json_path.clone());
    report.artifacts = written
        .iter()
        .map(|p| p.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned()))
        .collect();
    std::fs::write(&json_path, report.to_json()?).map_err(Error::io(&json_path))?;
    Ok(written)
}
