//! Benchmark report: JSON document and per-fold results CSV.

use std::path::Path;

use fraudbench_core::{Dataset, Params, Track};
use serde::{Deserialize, Serialize};

use crate::config::BenchmarkConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub n_rows: usize,
    pub n_fraud: usize,
    pub n_normal: usize,
}

impl DatasetSummary {
    pub fn of(data: &Dataset) -> Self {
        let [n_normal, n_fraud] = data.class_counts();
        DatasetSummary {
            n_rows: data.n_rows(),
            n_fraud,
            n_normal,
        }
    }
}

/// How each track is trained, with the models run on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackProtocol {
    pub training: String,
    pub models: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub k: usize,
    pub scaled_columns: Vec<String>,
    pub supervised: TrackProtocol,
    pub unsupervised: TrackProtocol,
}

impl Protocol {
    pub fn of(config: &BenchmarkConfig) -> Self {
        let names = |track: Track| {
            config
                .models
                .iter()
                .filter(|m| m.kind.track() == track)
                .map(|m| m.kind.name().to_string())
                .collect()
        };
        Protocol {
            k: config.k,
            scaled_columns: config.cv_options().scale_columns,
            supervised: TrackProtocol {
                training: "balanced random downsample of each training fold".into(),
                models: names(Track::Supervised),
            },
            unsupervised: TrackProtocol {
                training: "normal (Class 0) rows of each training fold".into(),
                models: names(Track::Unsupervised),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridEntry {
    pub params: Params,
    pub mean: f64,
    pub pooled_auroc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelResult {
    pub model: String,
    pub track: Track,
    /// Hyperparameters of the reported run (the grid winner when a grid was searched).
    pub params: Params,
    pub seed: u64,
    pub per_fold_auroc: Vec<f64>,
    pub pooled_auroc: Option<f64>,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    /// Wall-clock time; `null` when timing is disabled.
    pub seconds: Option<f64>,
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<GridEntry>>,
}

impl ModelResult {
    pub fn succeeded(&self) -> bool {
        self.error.is_none() && self.pooled_auroc.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub config: BenchmarkConfig,
    pub protocol: Protocol,
    pub dataset_summary: DatasetSummary,
    pub results: Vec<ModelResult>,
    /// Files written next to the report, relative to the output directory.
    #[serde(default)]
    pub artifacts: Vec<String>,
}

impl BenchmarkReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&std::fs::read_to_string(path).map_err(Error::io(path))?)
    }

    pub fn result(&self, model: &str) -> Option<&ModelResult> {
        self.results.iter().find(|r| r.model == model)
    }

    /// `model,track,fold,auroc`, one line per model and fold.
    pub fn results_csv(&self) -> String {
        let mut out = String::from("model,track,fold,auroc\n");
        for r in &self.results {
            for (fold, a) in r.per_fold_auroc.iter().enumerate() {
                out.push_str(&format!("{},{},{},{}\n", r.model, r.track, fold, a));
            }
        }
        out
    }
}
