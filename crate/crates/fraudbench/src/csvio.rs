//! Transaction-table CSV reading and writing.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use fraudbench_core::data::{kaggle_feature_names, LABEL_COLUMN};
use fraudbench_core::{Dataset, Matrix};

use crate::error::{Error, Result};

/// Expected header: feature columns in order, then an optional label column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub features: Vec<String>,
    pub label: Option<String>,
}

impl Schema {
    /// `Time, V1..V28, Amount, Class`.
    pub fn kaggle() -> Self {
        Schema {
            features: kaggle_feature_names(),
            label: Some(LABEL_COLUMN.into()),
        }
    }

    pub fn labelled(features: Vec<String>) -> Self {
        Schema {
            features,
            label: Some(LABEL_COLUMN.into()),
        }
    }

    /// Feature columns only; loaded rows get label 0.
    pub fn unlabelled(features: Vec<String>) -> Self {
        Schema { features, label: None }
    }

    fn header(&self) -> Vec<&str> {
        self.features.iter().map(String::as_str).chain(self.label.as_deref()).collect()
    }
}

/// Reads `path` and checks its header against `schema` exactly. Errors name the data row
/// (counted from 1) and column of the first bad cell.
pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(Error::io(path))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let csv_err = |source| Error::Csv {
        path: path.into(),
        source,
    };
    let header: Vec<String> = reader.headers().map_err(csv_err)?.iter().map(|h| h.trim().to_string()).collect();
    let expected = schema.header();
    if header != expected {
        return Err(Error::Header {
            path: path.into(),
            expected: expected.join(","),
            found: header.join(","),
        });
    }

    let width = schema.features.len();
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = i + 1;
        let line = record.position().map_or(0, |p| p.line());
        let cell_err = |col: usize, message: String| Error::Cell {
            path: path.into(),
            row,
            line,
            column: expected[col].into(),
            message,
        };
        for (col, cell) in record.iter().enumerate().take(width) {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| cell_err(col, format!("`{cell}` is not a number")))?;
            if !v.is_finite() {
                return Err(cell_err(col, format!("`{cell}` is not finite")));
            }
            values.push(v);
        }
        if schema.label.is_some() {
            let cell = record[width].trim();
            let label = match cell.parse::<f64>() {
                Ok(v) if v == 0.0 => 0,
                Ok(v) if v == 1.0 => 1,
                _ => return Err(cell_err(width, format!("label `{cell}` is not 0 or 1"))),
            };
            labels.push(label);
        } else {
            labels.push(0);
        }
    }
    let n = labels.len();
    Ok(Dataset::new(Matrix::from_vec(n, width, values)?, labels, schema.features.clone())?)
}

/// Reads only the header row.
pub fn read_header(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(Error::io(path))?;
    let mut reader = csv::Reader::from_reader(file);
    let header = reader.headers().map_err(|source| Error::Csv {
        path: path.into(),
        source,
    })?;
    Ok(header.iter().map(|h| h.trim().to_string()).collect())
}

/// Schema inferred from a header: a trailing `Class` column is the label.
pub fn schema_from_header(header: Vec<String>) -> Schema {
    let mut features = header;
    if features.last().map(String::as_str) == Some(LABEL_COLUMN) {
        features.pop();
        Schema::labelled(features)
    } else {
        Schema::unlabelled(features)
    }
}

/// Writes `data` with its column names and a trailing `Class` column. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_csv(path: impl AsRef<Path>, data: &Dataset) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    let header: Vec<&str> = data
        .column_names()
        .iter()
        .map(String::as_str)
        .chain([LABEL_COLUMN])
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..data.n_rows() {
        for v in data.row(i) {
            out.push_str(&format!("{v},"));
        }
        out.push_str(&format!("{}\n", data.labels()[i]));
    }
    let mut file = File::create(path).map_err(Error::io(path))?;
    file.write_all(out.as_bytes()).map_err(Error::io(path))
}
