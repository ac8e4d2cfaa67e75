use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};

/// ROC points for a threshold sweep from `+∞` down to the lowest score.
///
/// `thresholds[i]` is the cut producing `points[i]` (rows with score `>= cut` are flagged);
/// the first entry is `+∞` for the `(0, 0)` corner.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<(f64, f64)>,
    pub thresholds: Vec<f64>,
}

impl RocCurve {
    /// Trapezoidal area under the curve.
    pub fn auroc(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
            .sum()
    }
}

fn validate(scores: &[f64], labels: &[u8]) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(Error::Shape {
            context: "roc_curve labels",
            expected: scores.len(),
            found: labels.len(),
        });
    }
    if let Some(i) = scores.iter().position(|s| s.is_nan()) {
        return Err(Error::InvalidData(alloc::format!("score {i} is NaN")));
    }
    if let Some(i) = labels.iter().position(|&l| l > 1) {
        return Err(Error::InvalidData(alloc::format!("label {i} is {} (expected 0 or 1)", labels[i])));
    }
    let pos = labels.iter().filter(|&&l| l == 1).count();
    let neg = labels.len() - pos;
    match (pos, neg) {
        (0, _) => Err(Error::SingleClass { present: 0 }),
        (_, 0) => Err(Error::SingleClass { present: 1 }),
        _ => Ok((pos, neg)),
    }
}

/// One point per distinct score; tied scores move the curve diagonally in one step.
pub fn roc_curve(scores: &[f64], labels: &[u8]) -> Result<RocCurve> {
    let (pos, neg) = validate(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(Ordering::Equal));

    let mut points = vec![(0.0, 0.0)];
    let mut thresholds = vec![f64::INFINITY];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let cut = scores[order[i]];
        while i < order.len() && scores[order[i]] == cut {
            if labels[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
        thresholds.push(cut);
    }
    Ok(RocCurve { points, thresholds })
}

pub fn auroc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    Ok(roc_curve(scores, labels)?.auroc())
}
