use alloc::vec::Vec;

use rand::seq::{index, SliceRandom};

use super::Dataset;
use crate::error::{Error, Result};
use crate::rng;

/// Keeps every minority-class row, samples the majority class without replacement down to
/// the same count, and shuffles the result.
pub fn downsample_balanced(data: &Dataset, seed: u64) -> Result<Dataset> {
    let normals = data.indices_of_class(0);
    let frauds = data.indices_of_class(1);
    match (normals.is_empty(), frauds.is_empty()) {
        (true, _) => return Err(Error::SingleClass { present: 1 }),
        (_, true) => return Err(Error::SingleClass { present: 0 }),
        _ => {}
    }
    let (minority, majority) = if frauds.len() <= normals.len() {
        (frauds, normals)
    } else {
        (normals, frauds)
    };
    let mut rng = rng::seeded(seed);
    let picked = index::sample(&mut rng, majority.len(), minority.len());
    let mut rows: Vec<usize> = minority;
    rows.extend(picked.iter().map(|i| majority[i]));
    rows.shuffle(&mut rng);
    Ok(data.subset(&rows))
}
