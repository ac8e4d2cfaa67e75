use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::cv::{cross_validate, CvOptions, CvResult};
use crate::data::{Dataset, FoldPlan};
use crate::error::{Error, Result};
use crate::model::{ModelSpec, ParamValue, Params};

/// Hyperparameter name to candidate values.
pub type Grid = BTreeMap<String, Vec<ParamValue>>;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchResult {
    pub best_params: Params,
    pub best: CvResult,
    /// Every evaluated combination, in iteration order.
    pub evaluated: Vec<(Params, CvResult)>,
}

/// Cartesian product of the grid. Keys vary in sorted order with the first key
/// slowest; each key's values keep their listed order.
pub fn grid_points(grid: &Grid) -> Result<Vec<Params>> {
    if grid.is_empty() || grid.values().any(Vec::is_empty) {
        return Err(Error::EmptyGrid);
    }
    let mut points = alloc::vec![Params::new()];
    for (key, values) in grid {
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.insert(key.clone(), v.clone());
                    q
                })
            })
            .collect();
    }
    Ok(points)
}

/// Cross-validates every grid point on top of `base` and keeps the highest mean fold
/// AUROC; ties go to the earlier point.
pub fn grid_search(
    base: &ModelSpec,
    grid: &Grid,
    data: &Dataset,
    plan: &FoldPlan,
    opts: &CvOptions,
    seed: u64,
) -> Result<GridSearchResult> {
    let mut evaluated = Vec::new();
    let mut best: Option<usize> = None;
    for point in grid_points(grid)? {
        let mut spec = base.clone();
        spec.apply(&point)?;
        let result = cross_validate(&spec, data, plan, opts, seed)?;
        if best.map_or(true, |b| result.mean > evaluated_mean(&evaluated, b)) {
            best = Some(evaluated.len());
        }
        evaluated.push((point, result));
    }
    let b = best.ok_or(Error::EmptyGrid)?;
    let (best_params, best) = evaluated[b].clone();
    Ok(GridSearchResult {
        best_params,
        best,
        evaluated,
    })
}

fn evaluated_mean(evaluated: &[(Params, CvResult)], i: usize) -> f64 {
    evaluated[i].1.mean
}
