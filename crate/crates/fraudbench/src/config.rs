//! Benchmark configuration, stored as TOML.
//!
//! ```toml
//! seed = 7
//! k = 5
//!
//! [dataset]
//! kind = "synthetic"
//! n_normal = 4000
//! n_fraud = 200
//! separation = 4.0
//! dims = 30
//!
//! [[models]]
//! kind = "xgb"
//! params = { max_depth = 4 }
//!
//! [[models]]
//! kind = "knn"
//! grid = { n_neighbors = [2, 4, 8] }
//! ```

use std::path::{Path, PathBuf};

use fraudbench_core::data::{synth_generate, DEFAULT_SCALED_COLUMNS};
use fraudbench_core::eval::Grid;
use fraudbench_core::{CvOptions, Dataset, ModelKind, ModelSpec, ParamValue, Params};
use serde::{Deserialize, Serialize};

use crate::csvio::{load_csv, Schema};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSource {
    /// A CSV file; `columns` lists the feature columns (default: the 30 transaction-table
    /// columns) and the file must end with a `Class` column.
    Csv {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        columns: Option<Vec<String>>,
    },
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n_normal: usize,
    pub n_fraud: usize,
    pub separation: f64,
    pub dims: usize,
    /// Generator seed; the master seed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl DatasetSource {
    pub fn load(&self, master_seed: u64) -> Result<Dataset> {
        match self {
            DatasetSource::Csv { path, columns } => {
                let schema = match columns {
                    Some(c) => Schema::labelled(c.clone()),
                    None => Schema::kaggle(),
                };
                load_csv(path, &schema)
            }
            DatasetSource::Synthetic(s) => Ok(synth_generate(
                s.n_normal,
                s.n_fraud,
                s.separation,
                s.dims,
                s.seed.unwrap_or(master_seed),
            )?),
        }
    }
}

/// Row caps for unsupervised training folds.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ocsvm_max_rows: Option<usize>,
    /// Shared by the RBM, auto-encoder and GAN.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nn_max_rows: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelEntry {
    pub kind: ModelKind,
    /// Overrides of the shipped defaults.
    #[serde(default, skip_serializing_if = "Params::is_empty")]
    pub params: Params,
    /// Searched on top of `params` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
}

impl ModelEntry {
    pub fn new(kind: ModelKind) -> Self {
        ModelEntry {
            kind,
            params: Params::new(),
            grid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub seed: u64,
    #[serde(default = "default_k")]
    pub k: usize,
    pub dataset: DatasetSource,
    pub models: Vec<ModelEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    /// GAN score weight, unless the GAN entry sets `alpha` itself.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gan_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "caps_unset")]
    pub caps: Caps,
    /// Robust-scaled columns (default `Time`, `Amount`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_columns: Option<Vec<String>>,
}

fn default_k() -> usize {
    5
}

fn caps_unset(c: &Caps) -> bool {
    c == &Caps::default()
}

impl BenchmarkConfig {
    /// All ten models with shipped defaults.
    pub fn all_models(dataset: DatasetSource, seed: u64) -> Self {
        BenchmarkConfig {
            seed,
            k: default_k(),
            dataset,
            models: ModelKind::ALL.into_iter().map(ModelEntry::new).collect(),
            out_dir: None,
            gan_alpha: None,
            caps: Caps::default(),
            scale_columns: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: BenchmarkConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Config(format!("k must be at least 2, got {}", self.k)));
        }
        if self.models.is_empty() {
            return Err(Error::Config("model list is empty".into()));
        }
        if let DatasetSource::Synthetic(s) = &self.dataset {
            if s.dims == 0 || !(s.separation >= 0.0 && s.separation.is_finite()) {
                return Err(Error::Config("synthetic dataset needs dims >= 1 and a finite separation >= 0".into()));
            }
        }
        for entry in &self.models {
            self.spec_for(entry).map_err(|e| Error::Config(format!("model {}: {e}", entry.kind)))?;
        }
        Ok(())
    }

    /// Defaults of the entry's model, then the config-wide caps and GAN weight, then the
    /// entry's own parameters.
    pub fn spec_for(&self, entry: &ModelEntry) -> Result<ModelSpec> {
        let mut spec = ModelSpec::default_for(entry.kind);
        let cap = match entry.kind {
            ModelKind::Ocsvm => self.caps.ocsvm_max_rows,
            ModelKind::Rbm | ModelKind::Ae | ModelKind::Gan => self.caps.nn_max_rows,
            _ => None,
        };
        if let Some(cap) = cap {
            spec.set("max_train_rows", &ParamValue::Int(cap as i64))?;
        }
        if let (ModelKind::Gan, Some(alpha)) = (entry.kind, self.gan_alpha) {
            spec.set("alpha", &ParamValue::Float(alpha))?;
        }
        spec.apply(&entry.params)?;
        Ok(spec)
    }

    pub fn cv_options(&self) -> CvOptions {
        CvOptions {
            scale_columns: self
                .scale_columns
                .clone()
                .unwrap_or_else(|| DEFAULT_SCALED_COLUMNS.iter().map(|&s| s.into()).collect()),
        }
    }
}
