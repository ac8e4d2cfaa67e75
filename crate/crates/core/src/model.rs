//! The shared scoring contract, hyperparameter values and the registry of the ten models.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::numkit::Matrix;
use crate::supervised::{
    dt_fit, knn_fit, lr_fit, rf_fit, svm_fit, xgb_fit, BoostedModel, DtParams, ForestModel, KnnModel, KnnParams,
    LinearSvmModel, LogisticModel, LrParams, RfParams, SvmParams, TreeModel, XgbParams,
};
use crate::unsupervised::{
    ae_fit, gan_fit, ocsvm_fit, rbm_fit, AeModel, AeParams, GanModel, GanParams, OcsvmModel, OcsvmParams, RbmModel,
    RbmParams,
};

/// A fitted model mapping feature rows to real fraud scores (higher = more fraud-like).
pub trait ScoredModel {
    /// Width of the feature rows the model expects.
    fn n_features(&self) -> usize;

    fn score_row(&self, row: &[f64]) -> f64;

    fn check_width(&self, rows: &Matrix) -> Result<()> {
        if rows.cols() != self.n_features() {
            return Err(Error::Shape {
                context: "score input width",
                expected: self.n_features(),
                found: rows.cols(),
            });
        }
        Ok(())
    }

    fn score(&self, rows: &Matrix) -> Result<Vec<f64>> {
        self.check_width(rows)?;
        Ok(rows.iter_rows().map(|r| self.score_row(r)).collect())
    }
}

/// A hyperparameter value as written in configs and grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
}

/// Hyperparameters keyed by name, iterated in sorted key order.
pub type Params = BTreeMap<String, ParamValue>;

impl ParamValue {
    fn kind_error(&self, key: &str, wanted: &str) -> Error {
        Error::param(key, format!("expected {wanted}, found {self}"))
    }

    pub fn as_f64(&self, key: &str) -> Result<f64> {
        match *self {
            ParamValue::Int(i) => Ok(i as f64),
            ParamValue::Float(f) if f.is_finite() => Ok(f),
            _ => Err(self.kind_error(key, "a finite number")),
        }
    }

    pub fn positive_f64(&self, key: &str) -> Result<f64> {
        let v = self.as_f64(key)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::param(key, format!("must be positive, found {v}")))
        }
    }

    pub fn non_negative_f64(&self, key: &str) -> Result<f64> {
        let v = self.as_f64(key)?;
        if v >= 0.0 {
            Ok(v)
        } else {
            Err(Error::param(key, format!("must be non-negative, found {v}")))
        }
    }

    pub fn as_usize(&self, key: &str) -> Result<usize> {
        match *self {
            ParamValue::Int(i) if i >= 0 => Ok(i as usize),
            ParamValue::Float(f) if f >= 0.0 && f == crate::math::floor(f) && f < 9.0e15 => Ok(f as usize),
            _ => Err(self.kind_error(key, "a non-negative integer")),
        }
    }

    pub fn positive_usize(&self, key: &str) -> Result<usize> {
        match self.as_usize(key)? {
            0 => Err(Error::param(key, "must be at least 1")),
            v => Ok(v),
        }
    }

    /// Booleans; the strings `true`/`false` are accepted in any case.
    pub fn as_bool(&self, key: &str) -> Result<bool> {
        match self {
            ParamValue::Bool(b) => Ok(*b),
            ParamValue::Text(t) if t.eq_ignore_ascii_case("true") => Ok(true),
            ParamValue::Text(t) if t.eq_ignore_ascii_case("false") => Ok(false),
            _ => Err(self.kind_error(key, "a boolean")),
        }
    }

    pub fn as_text(&self, key: &str) -> Result<&str> {
        match self {
            ParamValue::Text(t) => Ok(t),
            _ => Err(self.kind_error(key, "text")),
        }
    }

    /// Accepts only one of `allowed` (for options fixed by the implementation).
    pub fn expect_text(&self, key: &str, allowed: &[&str]) -> Result<()> {
        let t = self.as_text(key)?;
        if allowed.iter().any(|a| a.eq_ignore_ascii_case(t)) {
            Ok(())
        } else {
            Err(Error::param(key, format!("`{t}` is not supported (allowed: {})", allowed.join(", "))))
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Bool(b) => write!(f, "{b}"),
            ParamValue::Int(i) => write!(f, "{i}"),
            ParamValue::Float(v) => write!(f, "{v}"),
            ParamValue::Text(t) => f.write_str(t),
        }
    }
}

impl From<bool> for ParamValue {
    fn from(v: bool) -> Self {
        ParamValue::Bool(v)
    }
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Float(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.into())
    }
}

/// Training regime of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Track {
    /// Trained on the balanced (downsampled) labelled training fold.
    Supervised,
    /// Trained on the normal rows of the training fold only.
    Unsupervised,
}

impl fmt::Display for Track {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Track::Supervised => "supervised",
            Track::Unsupervised => "unsupervised",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Lr,
    Knn,
    Svm,
    Dt,
    Rf,
    Xgb,
    Ocsvm,
    Rbm,
    Ae,
    Gan,
}

impl ModelKind {
    /// Every model in ordinal order.
    pub const ALL: [ModelKind; 10] = [
        ModelKind::Lr,
        ModelKind::Knn,
        ModelKind::Svm,
        ModelKind::Dt,
        ModelKind::Rf,
        ModelKind::Xgb,
        ModelKind::Ocsvm,
        ModelKind::Rbm,
        ModelKind::Ae,
        ModelKind::Gan,
    ];

    /// Stable index used for seed derivation.
    pub fn ordinal(self) -> u64 {
        self as u64
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Lr => "lr",
            ModelKind::Knn => "knn",
            ModelKind::Svm => "svm",
            ModelKind::Dt => "dt",
            ModelKind::Rf => "rf",
            ModelKind::Xgb => "xgb",
            ModelKind::Ocsvm => "ocsvm",
            ModelKind::Rbm => "rbm",
            ModelKind::Ae => "ae",
            ModelKind::Gan => "gan",
        }
    }

    pub fn track(self) -> Track {
        match self {
            ModelKind::Lr | ModelKind::Knn | ModelKind::Svm | ModelKind::Dt | ModelKind::Rf | ModelKind::Xgb => {
                Track::Supervised
            }
            ModelKind::Ocsvm | ModelKind::Rbm | ModelKind::Ae | ModelKind::Gan => Track::Unsupervised,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::param("model", format!("unknown model `{s}`")))
    }
}

/// A model kind with its full hyperparameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum ModelSpec {
    Lr(LrParams),
    Knn(KnnParams),
    Svm(SvmParams),
    Dt(DtParams),
    Rf(RfParams),
    Xgb(XgbParams),
    Ocsvm(OcsvmParams),
    Rbm(RbmParams),
    Ae(AeParams),
    Gan(GanParams),
}

impl ModelSpec {
    /// The shipped default hyperparameters of `kind`.
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Lr => ModelSpec::Lr(LrParams::default()),
            ModelKind::Knn => ModelSpec::Knn(KnnParams::default()),
            ModelKind::Svm => ModelSpec::Svm(SvmParams::default()),
            ModelKind::Dt => ModelSpec::Dt(DtParams::default()),
            ModelKind::Rf => ModelSpec::Rf(RfParams::default()),
            ModelKind::Xgb => ModelSpec::Xgb(XgbParams::default()),
            ModelKind::Ocsvm => ModelSpec::Ocsvm(OcsvmParams::default()),
            ModelKind::Rbm => ModelSpec::Rbm(RbmParams::default()),
            ModelKind::Ae => ModelSpec::Ae(AeParams::default()),
            ModelKind::Gan => ModelSpec::Gan(GanParams::default()),
        }
    }

    /// Defaults of `kind` overridden by `params`.
    pub fn with_params(kind: ModelKind, params: &Params) -> Result<Self> {
        let mut spec = Self::default_for(kind);
        spec.apply(params)?;
        Ok(spec)
    }

    pub fn apply(&mut self, params: &Params) -> Result<()> {
        params.iter().try_for_each(|(k, v)| self.set(k, v))
    }

    pub fn set(&mut self, key: &str, value: &ParamValue) -> Result<()> {
        match self {
            ModelSpec::Lr(p) => p.set(key, value),
            ModelSpec::Knn(p) => p.set(key, value),
            ModelSpec::Svm(p) => p.set(key, value),
            ModelSpec::Dt(p) => p.set(key, value),
            ModelSpec::Rf(p) => p.set(key, value),
            ModelSpec::Xgb(p) => p.set(key, value),
            ModelSpec::Ocsvm(p) => p.set(key, value),
            ModelSpec::Rbm(p) => p.set(key, value),
            ModelSpec::Ae(p) => p.set(key, value),
            ModelSpec::Gan(p) => p.set(key, value),
        }
    }

    /// Every hyperparameter, including defaults.
    pub fn params(&self) -> Params {
        match self {
            ModelSpec::Lr(p) => p.to_params(),
            ModelSpec::Knn(p) => p.to_params(),
            ModelSpec::Svm(p) => p.to_params(),
            ModelSpec::Dt(p) => p.to_params(),
            ModelSpec::Rf(p) => p.to_params(),
            ModelSpec::Xgb(p) => p.to_params(),
            ModelSpec::Ocsvm(p) => p.to_params(),
            ModelSpec::Rbm(p) => p.to_params(),
            ModelSpec::Ae(p) => p.to_params(),
            ModelSpec::Gan(p) => p.to_params(),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::Lr(_) => ModelKind::Lr,
            ModelSpec::Knn(_) => ModelKind::Knn,
            ModelSpec::Svm(_) => ModelKind::Svm,
            ModelSpec::Dt(_) => ModelKind::Dt,
            ModelSpec::Rf(_) => ModelKind::Rf,
            ModelSpec::Xgb(_) => ModelKind::Xgb,
            ModelSpec::Ocsvm(_) => ModelKind::Ocsvm,
            ModelSpec::Rbm(_) => ModelKind::Rbm,
            ModelSpec::Ae(_) => ModelKind::Ae,
            ModelSpec::Gan(_) => ModelKind::Gan,
        }
    }

    pub fn track(&self) -> Track {
        self.kind().track()
    }

    /// Fits on `train` as given; track-specific preparation (downsampling, normal-only
    /// filtering, scaling) is the caller's job. Deterministic models ignore `seed`.
    pub fn fit(&self, train: &Dataset, seed: u64) -> Result<FittedModel> {
        Ok(match self {
            ModelSpec::Lr(p) => FittedModel::Lr(lr_fit(train, p)?),
            ModelSpec::Knn(p) => FittedModel::Knn(knn_fit(train, p)?),
            ModelSpec::Svm(p) => FittedModel::Svm(svm_fit(train, p)?),
            ModelSpec::Dt(p) => FittedModel::Dt(dt_fit(train, p)?),
            ModelSpec::Rf(p) => FittedModel::Rf(rf_fit(train, p, seed)?),
            ModelSpec::Xgb(p) => FittedModel::Xgb(xgb_fit(train, p)?),
            ModelSpec::Ocsvm(p) => FittedModel::Ocsvm(ocsvm_fit(train, p, seed)?),
            ModelSpec::Rbm(p) => FittedModel::Rbm(rbm_fit(train, p, seed)?),
            ModelSpec::Ae(p) => FittedModel::Ae(ae_fit(train, p, seed)?),
            ModelSpec::Gan(p) => FittedModel::Gan(gan_fit(train, p, seed)?),
        })
    }
}

/// Any fitted model, tagged by kind for persistence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "model", rename_all = "lowercase")]
pub enum FittedModel {
    Lr(LogisticModel),
    Knn(KnnModel),
    Svm(LinearSvmModel),
    Dt(TreeModel),
    Rf(ForestModel),
    Xgb(BoostedModel),
    Ocsvm(OcsvmModel),
    Rbm(RbmModel),
    Ae(AeModel),
    Gan(GanModel),
}

macro_rules! dispatch {
    ($self:expr, $m:ident => $body:expr) => {
        match $self {
            FittedModel::Lr($m) => $body,
            FittedModel::Knn($m) => $body,
            FittedModel::Svm($m) => $body,
            FittedModel::Dt($m) => $body,
            FittedModel::Rf($m) => $body,
            FittedModel::Xgb($m) => $body,
            FittedModel::Ocsvm($m) => $body,
            FittedModel::Rbm($m) => $body,
            FittedModel::Ae($m) => $body,
            FittedModel::Gan($m) => $body,
        }
    };
}

impl FittedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            FittedModel::Lr(_) => ModelKind::Lr,
            FittedModel::Knn(_) => ModelKind::Knn,
            FittedModel::Svm(_) => ModelKind::Svm,
            FittedModel::Dt(_) => ModelKind::Dt,
            FittedModel::Rf(_) => ModelKind::Rf,
            FittedModel::Xgb(_) => ModelKind::Xgb,
            FittedModel::Ocsvm(_) => ModelKind::Ocsvm,
            FittedModel::Rbm(_) => ModelKind::Rbm,
            FittedModel::Ae(_) => ModelKind::Ae,
            FittedModel::Gan(_) => ModelKind::Gan,
        }
    }
}

impl ScoredModel for FittedModel {
    fn n_features(&self) -> usize {
        dispatch!(self, m => m.n_features())
    }

    fn score_row(&self, row: &[f64]) -> f64 {
        dispatch!(self, m => m.score_row(row))
    }

    fn score(&self, rows: &Matrix) -> Result<Vec<f64>> {
        dispatch!(self, m => m.score(rows))
    }
}
