//! Fitted-pipeline files: one header line `fraudbench-model 1 <sha256> <bytes>` followed
//! by the JSON body it describes.

use std::path::Path;

use fraudbench_core::eval::FittedPipeline;
use fraudbench_core::{Dataset, FittedModel, ModelKind};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

const MAGIC: &str = "fraudbench-model";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedModel {
    /// Feature columns the pipeline expects, in order.
    pub columns: Vec<String>,
    pub pipeline: FittedPipeline<FittedModel>,
}

impl SavedModel {
    pub fn kind(&self) -> ModelKind {
        self.pipeline.model.kind()
    }

    pub fn score(&self, data: &Dataset) -> Result<Vec<f64>> {
        Ok(self.pipeline.score(data)?)
    }
}

pub fn encode(model: &SavedModel) -> Result<Vec<u8>> {
    let body = serde_json::to_vec(model)?;
    let digest = hex::encode(Sha256::digest(&body));
    let mut out = format!("{MAGIC} {VERSION} {digest} {}\n", body.len()).into_bytes();
    out.extend_from_slice(&body);
    Ok(out)
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<SavedModel> {
    let corrupt = |reason: String| Error::Corrupt {
        path: path.into(),
        reason,
    };
    let split = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| corrupt("missing header line".into()))?;
    let header = std::str::from_utf8(&bytes[..split]).map_err(|_| corrupt("header is not UTF-8".into()))?;
    let body = &bytes[split + 1..];
    let fields: Vec<&str> = header.split(' ').collect();
    let [magic, version, digest, len] = fields[..] else {
        return Err(corrupt(format!("malformed header `{header}`")));
    };
    if magic != MAGIC || version != VERSION.to_string() {
        return Err(corrupt(format!("unsupported header `{header}`")));
    }
    let expected_len: usize = len.parse().map_err(|_| corrupt(format!("bad length `{len}`")))?;
    let actual = hex::encode(Sha256::digest(body));
    if actual != digest || body.len() != expected_len {
        return Err(corrupt(format!(
            "checksum mismatch: header says {expected_len} bytes with sha256 {digest}, found {} bytes with sha256 {actual}",
            body.len()
        )));
    }
    Ok(serde_json::from_slice(body)?)
}

pub fn save_model(path: impl AsRef<Path>, model: &SavedModel) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode(model)?).map_err(Error::io(path))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SavedModel> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(Error::io(path))?;
    decode(&bytes, path)
}
