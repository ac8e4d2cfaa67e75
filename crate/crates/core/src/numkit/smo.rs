//! Sequential minimal optimization for the box- and equality-constrained QP
//!
//! ```text
//! min_α  ½ αᵀQα + pᵀα   s.t.  yᵀα = const,  0 ≤ α_i ≤ upper
//! ```
//!
//! shared by the linear SVM (C-SVC dual) and the one-class SVM. Working pairs are the
//! maximal KKT violators; no shrinking.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

/// Implicit `Q` matrix, with `y` already folded in (`Q_ij = y_i y_j K_ij`).
pub trait QMatrix {
    fn size(&self) -> usize;
    fn diag(&self, i: usize) -> f64;
    fn compute_row(&self, i: usize, out: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoConfig {
    /// Stop when the maximal violating pair gap `m(α) − M(α)` drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Kernel rows kept in the FIFO cache.
    pub cache_rows: usize,
}

impl Default for SmoConfig {
    fn default() -> Self {
        SmoConfig {
            tolerance: 1e-3,
            max_iterations: 10_000_000,
            cache_rows: 2048,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoSolution {
    pub alpha: Vec<f64>,
    /// `Qα + p` at the solution.
    pub gradient: Vec<f64>,
    /// Offset such that free variables satisfy `y_i G_i = rho`.
    pub rho: f64,
    /// Final violating-pair gap.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub objective: f64,
}

const TAU: f64 = 1e-12;

struct RowCache<'q, Q: QMatrix> {
    q: &'q Q,
    rows: BTreeMap<usize, Vec<f64>>,
    order: VecDeque<usize>,
    capacity: usize,
}

impl<'q, Q: QMatrix> RowCache<'q, Q> {
    fn copy_row(&mut self, i: usize, out: &mut [f64]) {
        if let Some(r) = self.rows.get(&i) {
            out.copy_from_slice(r);
            return;
        }
        self.q.compute_row(i, out);
        if self.capacity == 0 {
            return;
        }
        if self.rows.len() >= self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.rows.remove(&old);
            }
        }
        self.rows.insert(i, out.to_vec());
        self.order.push_back(i);
    }
}

/// Solves the QP from a feasible starting point `alpha0`.
pub fn solve<Q: QMatrix>(
    q: &Q,
    p: &[f64],
    y: &[f64],
    upper: f64,
    alpha0: Vec<f64>,
    config: &SmoConfig,
) -> SmoSolution {
    let n = q.size();
    assert_eq!(p.len(), n);
    assert_eq!(y.len(), n);
    assert_eq!(alpha0.len(), n);

    let mut alpha = alpha0;
    let diag: Vec<f64> = (0..n).map(|i| q.diag(i)).collect();
    let mut cache = RowCache {
        q,
        rows: BTreeMap::new(),
        order: VecDeque::new(),
        capacity: config.cache_rows,
    };

    let mut grad = p.to_vec();
    let mut qi = vec![0.0; n];
    let mut qj = vec![0.0; n];
    for i in 0..n {
        if alpha[i] != 0.0 {
            cache.copy_row(i, &mut qi);
            for k in 0..n {
                grad[k] += alpha[i] * qi[k];
            }
        }
    }

    let in_up = |a: f64, yi: f64| (yi > 0.0 && a < upper) || (yi < 0.0 && a > 0.0);
    let in_low = |a: f64, yi: f64| (yi > 0.0 && a > 0.0) || (yi < 0.0 && a < upper);

    let mut iterations = 0;
    let mut gap;
    let mut converged = false;
    loop {
        // i = argmax_{I_up} −y G,  j = argmin_{I_low} −y G
        let mut gmax = f64::NEG_INFINITY;
        let mut gmin = f64::INFINITY;
        let mut i_sel = usize::MAX;
        let mut j_sel = usize::MAX;
        for t in 0..n {
            let v = -y[t] * grad[t];
            if in_up(alpha[t], y[t]) && v > gmax {
                gmax = v;
                i_sel = t;
            }
            if in_low(alpha[t], y[t]) && v < gmin {
                gmin = v;
                j_sel = t;
            }
        }
        gap = if i_sel == usize::MAX || j_sel == usize::MAX {
            0.0
        } else {
            gmax - gmin
        };
        if gap < config.tolerance {
            converged = true;
            break;
        }
        if iterations >= config.max_iterations {
            break;
        }
        iterations += 1;

        let (i, j) = (i_sel, j_sel);
        cache.copy_row(i, &mut qi);
        cache.copy_row(j, &mut qj);
        let old_i = alpha[i];
        let old_j = alpha[j];
        let (c_i, c_j) = (upper, upper);

        if y[i] != y[j] {
            let mut quad = diag[i] + diag[j] + 2.0 * qi[j];
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > c_i - c_j {
                if alpha[i] > c_i {
                    alpha[i] = c_i;
                    alpha[j] = c_i - diff;
                }
            } else if alpha[j] > c_j {
                alpha[j] = c_j;
                alpha[i] = c_j + diff;
            }
        } else {
            let mut quad = diag[i] + diag[j] - 2.0 * qi[j];
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c_i {
                if alpha[i] > c_i {
                    alpha[i] = c_i;
                    alpha[j] = sum - c_i;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c_j {
                if alpha[j] > c_j {
                    alpha[j] = c_j;
                    alpha[i] = sum - c_j;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let di = alpha[i] - old_i;
        let dj = alpha[j] - old_j;
        for k in 0..n {
            grad[k] += qi[k] * di + qj[k] * dj;
        }
    }

    let rho = compute_rho(&alpha, &grad, y, upper);
    // ½ αᵀQα + pᵀα = ½ αᵀ(G + p)
    let objective = 0.5
        * alpha
            .iter()
            .zip(grad.iter().zip(p))
            .map(|(a, (g, pv))| a * (g + pv))
            .sum::<f64>();
    SmoSolution {
        alpha,
        gradient: grad,
        rho,
        gap,
        iterations,
        converged,
        objective,
    }
}

fn compute_rho(alpha: &[f64], grad: &[f64], y: &[f64], upper: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut n_free = 0usize;
    let mut sum_free = 0.0;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= upper {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    if n_free > 0 {
        sum_free / n_free as f64
    } else if ub.is_finite() && lb.is_finite() {
        (ub + lb) / 2.0
    } else if ub.is_finite() {
        ub
    } else if lb.is_finite() {
        lb
    } else {
        0.0
    }
}

/// Maximal violating-pair gap `m(α) − M(α)` of a candidate dual point. Zero (or negative)
/// means the KKT conditions hold exactly.
pub fn kkt_gap(alpha: &[f64], grad: &[f64], y: &[f64], upper: f64) -> f64 {
    let mut gmax = f64::NEG_INFINITY;
    let mut gmin = f64::INFINITY;
    for t in 0..alpha.len() {
        let v = -y[t] * grad[t];
        let up = (y[t] > 0.0 && alpha[t] < upper) || (y[t] < 0.0 && alpha[t] > 0.0);
        let low = (y[t] > 0.0 && alpha[t] > 0.0) || (y[t] < 0.0 && alpha[t] < upper);
        if up {
            gmax = gmax.max(v);
        }
        if low {
            gmin = gmin.min(v);
        }
    }
    if gmax.is_finite() && gmin.is_finite() {
        gmax - gmin
    } else {
        0.0
    }
}
