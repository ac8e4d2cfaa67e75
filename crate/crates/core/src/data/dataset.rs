use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::Matrix;

/// Immutable labelled feature table. Label `1` marks a fraudulent transaction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    features: Matrix,
    labels: Vec<u8>,
    column_names: Vec<String>,
}

impl Dataset {
    pub fn new(features: Matrix, labels: Vec<u8>, column_names: Vec<String>) -> Result<Self> {
        if labels.len() != features.rows() {
            return Err(Error::Shape {
                context: "Dataset labels",
                expected: features.rows(),
                found: labels.len(),
            });
        }
        if column_names.len() != features.cols() {
            return Err(Error::Shape {
                context: "Dataset column names",
                expected: features.cols(),
                found: column_names.len(),
            });
        }
        if let Some(pos) = labels.iter().position(|&l| l > 1) {
            return Err(Error::InvalidData(format!(
                "row {}: label {} is not 0 or 1",
                pos + 1,
                labels[pos]
            )));
        }
        if let Some(pos) = features.as_slice().iter().position(|v| !v.is_finite()) {
            let cols = features.cols().max(1);
            return Err(Error::InvalidData(format!(
                "row {}, column {}: non-finite value",
                pos / cols + 1,
                column_names.get(pos % cols).map_or("?", String::as_str)
            )));
        }
        Ok(Dataset {
            features,
            labels,
            column_names,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_cols(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.features.row(i)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }

    /// `[normal count, fraud count]`
    pub fn class_counts(&self) -> [usize; 2] {
        let fraud = self.labels.iter().filter(|&&l| l == 1).count();
        [self.labels.len() - fraud, fraud]
    }

    pub fn indices_of_class(&self, class: u8) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect()
    }

    /// Rows at `indices`, in that order (repeats allowed).
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            column_names: self.column_names.clone(),
        }
    }

    pub fn select_columns(&self, columns: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select_cols(columns),
            labels: self.labels.clone(),
            column_names: columns.iter().map(|&c| self.column_names[c].clone()).collect(),
        }
    }

    /// The label-0 rows only.
    pub fn normals(&self) -> Dataset {
        self.subset(&self.indices_of_class(0))
    }

    /// Same labels and column names with replaced feature values.
    pub fn with_features(&self, features: Matrix) -> Result<Dataset> {
        Dataset::new(features, self.labels.clone(), self.column_names.clone())
    }

    pub fn into_parts(self) -> (Matrix, Vec<u8>, Vec<String>) {
        (self.features, self.labels, self.column_names)
    }
}
