//! Binary product mean testing with the collision statistic.
//!
//! For samples `X^(1..n)` in `{0,1}^dim` the statistic is
//! `T = 1/(n(n-1)) sum_i sum_{k1 != k2} (X_i^(k1) - 1/2)(X_i^(k2) - 1/2)`,
//! an unbiased estimate of `||p - 1/2||^2`. It is computed per column from the
//! centered sum `S_i` via `sum_{k1 != k2} = S_i^2 - n/4`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn is_reject(self) -> bool {
        self == Verdict::Reject
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
        })
    }
}

/// `n` binary samples of dimension `dim`, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSampleMatrix {
    n: usize,
    dim: usize,
    bits: Vec<bool>,
}

impl BitSampleMatrix {
    pub fn new(n: usize, dim: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != n * dim {
            return Err(Error::Dimension(format!(
                "{} bits for a {n} x {dim} matrix",
                bits.len()
            )));
        }
        Ok(Self { n, dim, bits })
    }

    pub fn from_rows<R: AsRef<[bool]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        let mut bits = Vec::with_capacity(rows.len() * dim);
        for (k, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::Dimension(format!(
                    "row {k} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            bits.extend_from_slice(row);
        }
        Ok(Self {
            n: rows.len(),
            dim,
            bits,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, k: usize) -> &[bool] {
        &self.bits[k * self.dim..(k + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[bool]> {
        self.bits.chunks(self.dim.max(1)).take(self.n)
    }

    pub fn get(&self, k: usize, i: usize) -> bool {
        self.bits[k * self.dim + i]
    }
}

/// `T` in O(n dim). Errors when fewer than two samples are present.
pub fn collision_statistic(samples: &BitSampleMatrix) -> Result<f64> {
    let n = samples.n();
    if n < 2 {
        return Err(Error::DegenerateInput(format!(
            "collision statistic needs at least 2 samples, got {n}"
        )));
    }
    let mut ones = vec![0i64; samples.dim()];
    for row in samples.rows() {
        for (c, &b) in ones.iter_mut().zip(row) {
            *c += i64::from(b);
        }
    }
    // 2 S_i = 2 c_i - n, and S_i^2 - n/4 = ((2 c_i - n)^2 - n) / 4.
    let n_i = n as i64;
    let numer: i128 = ones
        .iter()
        .map(|&c| {
            let twice_s = i128::from(2 * c - n_i);
            twice_s * twice_s - i128::from(n_i)
        })
        .sum();
    Ok(numer as f64 / (4.0 * n as f64 * (n - 1) as f64))
}

/// Rejects iff `T > tau`.
pub fn bpmt_decide_threshold(samples: &BitSampleMatrix, tau: f64) -> Result<Verdict> {
    if !tau.is_finite() || tau < 0.0 {
        return Err(Error::Parameter(format!("threshold must be >= 0, got {tau}")));
    }
    let t = collision_statistic(samples)?;
    Ok(if t > tau {
        Verdict::Reject
    } else {
        Verdict::Accept
    })
}

/// Threshold used for distance parameter `epsilon`: `epsilon^2 / 2`.
pub fn bpmt_threshold(epsilon: f64) -> f64 {
    epsilon * epsilon / 2.0
}

/// Tests `p = 1/2` against `||p - 1/2|| >= epsilon` with `tau = epsilon^2 / 2`.
pub fn bpmt_decide(samples: &BitSampleMatrix, epsilon: f64) -> Result<Verdict> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Parameter(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    bpmt_decide_threshold(samples, bpmt_threshold(epsilon))
}

/// Mean of `T` and an upper bound on its variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub mean_t: f64,
    pub var_bound: f64,
}

/// Moments of `T` for `n` i.i.d. samples with coordinate means `p`.
pub fn bpmt_moments_oracle(p: &[f64], n: usize) -> Result<MomentReport> {
    if n < 2 {
        return Err(Error::DegenerateInput(format!("n must be >= 2, got {n}")));
    }
    let rows = vec![p.to_vec(); n];
    moments_oracle_heterogeneous(&rows)
}

/// Moments of `T` when sample `k` has its own coordinate means `p[k]`.
///
/// Within each coordinate all centered means `p[k][i] - 1/2` must share a sign
/// (zero is compatible with either). Then
/// `E[T] = sum_i sum_{k1 != k2} q_i^(k1) q_i^(k2) / (n(n-1))` and
/// `Var(T) <= sum_i (n(n-1)/8 + (n-2) E[T_i]) / (n^2 (n-1)^2)`.
pub fn moments_oracle_heterogeneous(p: &[Vec<f64>]) -> Result<MomentReport> {
    let n = p.len();
    if n < 2 {
        return Err(Error::DegenerateInput(format!("n must be >= 2, got {n}")));
    }
    let dim = p[0].len();
    if p.iter().any(|row| row.len() != dim) {
        return Err(Error::Dimension("ragged mean profile".into()));
    }
    if p.iter().flatten().any(|&v| !(v > 0.0 && v < 1.0)) {
        return Err(Error::Parameter("means must lie in (0, 1)".into()));
    }
    let nf = n as f64;
    let pairs = nf * (nf - 1.0);
    let mut sum_pairwise = 0.0;
    for i in 0..dim {
        let centered = p.iter().map(|row| row[i] - 0.5);
        let (mut pos, mut neg) = (false, false);
        let (mut s, mut s2) = (0.0, 0.0);
        for q in centered {
            pos |= q > 0.0;
            neg |= q < 0.0;
            s += q;
            s2 += q * q;
        }
        if pos && neg {
            return Err(Error::Parameter(format!(
                "coordinate {i}: centered means change sign across samples"
            )));
        }
        sum_pairwise += s * s - s2;
    }
    let mean_t = sum_pairwise / pairs;
    let var_bound = (dim as f64 * pairs / 8.0 + (nf - 2.0) * sum_pairwise) / (pairs * pairs);
    Ok(MomentReport { mean_t, var_bound })
}
