//! Independent reference implementations used as test oracles. Nothing here calls the
//! code under test.
#![allow(dead_code)]

/// Pairwise Mann–Whitney statistic: fraction of (positive, negative) pairs where the
/// positive scores higher, ties counted ½.
pub fn mann_whitney(scores: &[f64], labels: &[u8]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        if labels[i] != 1 {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] != 0 {
                continue;
            }
            pairs += 1.0;
            if si > sj {
                wins += 1.0;
            } else if si == sj {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

/// Central-difference gradient of `f` at `params`.
pub fn central_difference(params: &[f64], step: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut p = params.to_vec();
    (0..p.len())
        .map(|i| {
            let orig = p[i];
            p[i] = orig + step;
            let up = f(&p);
            p[i] = orig - step;
            let down = f(&p);
            p[i] = orig;
            (up - down) / (2.0 * step)
        })
        .collect()
}

/// `‖a − b‖ / (‖a‖ + ‖b‖)`, or 0 when both vectors are (numerically) zero.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let scale = norm(a) + norm(b);
    if scale < 1e-12 {
        0.0
    } else {
        norm(&diff) / scale
    }
}

/// Gaussian elimination with partial pivoting; `None` when (near) singular.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= factor * a[col][c];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

pub fn qp_objective(q: &[Vec<f64>], p: &[f64], alpha: &[f64]) -> f64 {
    let n = alpha.len();
    let mut obj = 0.0;
    for i in 0..n {
        obj += p[i] * alpha[i];
        for j in 0..n {
            obj += 0.5 * alpha[i] * q[i][j] * alpha[j];
        }
    }
    obj
}

/// Exact minimizer of `½αᵀQα + pᵀα` subject to `yᵀα = delta`, `0 ≤ α ≤ upper`, by
/// enumerating every lower/upper/free status pattern (3ⁿ, meant for n ≤ 3) and solving
/// the equality-constrained stationarity system of the free set.
pub fn box_qp_exhaustive(q: &[Vec<f64>], p: &[f64], y: &[f64], delta: f64, upper: f64) -> (Vec<f64>, f64) {
    let n = p.len();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for code in 0..3usize.pow(n as u32) {
        let status: Vec<usize> = (0..n).map(|i| (code / 3usize.pow(i as u32)) % 3).collect();
        let mut alpha = vec![0.0; n];
        let free: Vec<usize> = (0..n).filter(|&i| status[i] == 2).collect();
        for i in 0..n {
            if status[i] == 1 {
                alpha[i] = upper;
            }
        }
        if !free.is_empty() {
            // [Q_FF  y_F] [α_F]   [−p_F − Q_FB α_B]
            // [y_Fᵀ  0  ] [ λ ] = [delta − y_Bᵀ α_B]
            let m = free.len();
            let mut a = vec![vec![0.0; m + 1]; m + 1];
            let mut b = vec![0.0; m + 1];
            for (r, &i) in free.iter().enumerate() {
                for (c, &j) in free.iter().enumerate() {
                    a[r][c] = q[i][j];
                }
                a[r][m] = y[i];
                a[m][r] = y[i];
                b[r] = -p[i] - (0..n).filter(|j| status[*j] != 2).map(|j| q[i][j] * alpha[j]).sum::<f64>();
            }
            b[m] = delta - (0..n).filter(|j| status[*j] != 2).map(|j| y[j] * alpha[j]).sum::<f64>();
            let Some(sol) = solve_linear(a, b) else { continue };
            for (r, &i) in free.iter().enumerate() {
                alpha[i] = sol[r];
            }
        }
        let feasible_eq = (y.iter().zip(&alpha).map(|(a, b)| a * b).sum::<f64>() - delta).abs() < 1e-9;
        let in_box = alpha.iter().all(|&a| a >= -1e-12 && a <= upper + 1e-12);
        if !(feasible_eq && in_box) {
            continue;
        }
        let obj = qp_objective(q, p, &alpha);
        if best.as_ref().map_or(true, |(_, b)| obj < *b) {
            best = Some((alpha, obj));
        }
    }
    best.expect("feasible QP")
}

fn entropy_bits(a: usize, b: usize) -> f64 {
    let n = (a + b) as f64;
    [a, b]
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln() / std::f64::consts::LN_2
        })
        .sum()
}

/// Best information-gain split over every feature and every midpoint between
/// consecutive distinct values. Ties within 1e-12 keep the lower feature, then the lower
/// threshold. Returns `(feature, threshold, gain)`.
pub fn exhaustive_best_split(rows: &[Vec<f64>], labels: &[u8], min_leaf: usize) -> Option<(usize, f64, f64)> {
    let n = rows.len();
    let pos = labels.iter().filter(|&&l| l == 1).count();
    let parent = entropy_bits(n - pos, pos);
    let mut best: Option<(usize, f64, f64)> = None;
    for f in 0..rows[0].len() {
        let mut values: Vec<f64> = rows.iter().map(|r| r[f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let t = (w[0] + w[1]) / 2.0;
            let (mut l0, mut l1, mut r0, mut r1) = (0, 0, 0, 0);
            for (r, &y) in rows.iter().zip(labels) {
                match (r[f] <= t, y) {
                    (true, 0) => l0 += 1,
                    (true, _) => l1 += 1,
                    (false, 0) => r0 += 1,
                    (false, _) => r1 += 1,
                }
            }
            if l0 + l1 < min_leaf || r0 + r1 < min_leaf {
                continue;
            }
            let gain = parent
                - (l0 + l1) as f64 / n as f64 * entropy_bits(l0, l1)
                - (r0 + r1) as f64 / n as f64 * entropy_bits(r0, r1);
            if best.map_or(true, |(_, _, g)| gain > g + 1e-12) {
                best = Some((f, t, gain));
            }
        }
    }
    best
}

/// `−log Σ_h exp(−E(x, h))` over all binary hidden vectors, with
/// `E(x, h) = ½‖x − b‖² − cᵀh − xᵀWh`; `w[i][j]` couples visible i and hidden j.
pub fn rbm_free_energy_bruteforce(w: &[Vec<f64>], b: &[f64], c: &[f64], x: &[f64]) -> f64 {
    let nh = c.len();
    let quad: f64 = 0.5 * x.iter().zip(b).map(|(xi, bi)| (xi - bi) * (xi - bi)).sum::<f64>();
    let mut terms = Vec::with_capacity(1 << nh);
    for mask in 0..(1usize << nh) {
        let h: Vec<f64> = (0..nh).map(|j| ((mask >> j) & 1) as f64).collect();
        let hidden: f64 = c.iter().zip(&h).map(|(a, b)| a * b).sum();
        let inter: f64 = (0..x.len()).map(|i| x[i] * (0..nh).map(|j| w[i][j] * h[j]).sum::<f64>()).sum();
        terms.push(-(quad - hidden - inter));
    }
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    -(m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln())
}

/// Small deterministic generator for oracle inputs (xorshift64*).
pub struct OracleRng(pub u64);

impl OracleRng {
    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0.max(1);
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}
