use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::rng;

/// Assignment of every row to one of `k` disjoint, class-stratified folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    k: usize,
    assignment: Vec<usize>,
    seed: u64,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_rows(&self) -> usize {
        self.assignment.len()
    }

    /// Fold index of every row.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Shuffles each class with `seed` and deals its rows round-robin into `k` folds. The
/// dealing position carries over from class 0 to class 1, so fold sizes differ by at
/// most one overall as well as per class.
pub fn stratified_kfold(data: &Dataset, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::param("k", "must be at least 2"));
    }
    let mut rng = rng::seeded(seed);
    let mut assignment = vec![0usize; data.n_rows()];
    let mut next = 0usize;
    for class in [0u8, 1u8] {
        let mut rows = data.indices_of_class(class);
        if rows.len() < k {
            return Err(Error::TooFewRows {
                class,
                count: rows.len(),
                k,
            });
        }
        rows.shuffle(&mut rng);
        for r in rows {
            assignment[r] = next % k;
            next += 1;
        }
    }
    Ok(FoldPlan {
        k,
        assignment,
        seed,
    })
}
