//! Moments of the F-matrix under the Kingman (Yule) distribution.
//!
//! A branch present in interval `j` survives unsplit to interval `i` with
//! probability `j / i`, and two such branches both survive with probability
//! `j(j-1) / (i(i-1))`; the moments below follow from these. None of them
//! depend on `n`.

use crate::error::{Error, Result};
use crate::shape::fmatrix::{tri_index, tri_len};

/// `E[F_ij] = j(j+1)/i`.
pub fn kingman_mean_entry(i: usize, j: usize) -> f64 {
    (j * (j + 1)) as f64 / i as f64
}

fn check(n: usize, i: usize, j: usize) -> Result<()> {
    if j == 0 || j > i || i + 1 > n {
        return Err(Error::InvalidParameter(format!("index ({i}, {j}) out of range for n = {n}")));
    }
    Ok(())
}

/// `Var[F_ij] = j^2 (j+1)^2 / (i^2 (i-1)) + j (j+1) (i-2j-1) / (i (i-1))`.
pub fn kingman_var(n: usize, i: usize, j: usize) -> Result<f64> {
    check(n, i, j)?;
    if i == 1 {
        return Ok(0.0);
    }
    let (i, j) = (i as f64, j as f64);
    let v = j * j * (j + 1.0) * (j + 1.0) / (i * i * (i - 1.0)) + j * (j + 1.0) * (i - 2.0 * j - 1.0) / (i * (i - 1.0));
    Ok(v.max(0.0))
}

/// `Cov[F_{i1 j1}, F_{i2 j2}]`. With `i1 >= i2`, `a = min(j1, j2)` and
/// `b = max(j1, j2)` this is `a(a+1)(i2-b)(i2-b-1) / (i1 i2 (i2-1))` when
/// `b < i2`, and zero otherwise (the two entries then depend on disjoint
/// sets of branching events).
pub fn kingman_cov(n: usize, i1: usize, j1: usize, i2: usize, j2: usize) -> Result<f64> {
    check(n, i1, j1)?;
    check(n, i2, j2)?;
    Ok(cov_unchecked(i1, j1, i2, j2))
}

fn cov_unchecked(i1: usize, j1: usize, i2: usize, j2: usize) -> f64 {
    let (i1, i2) = if i1 >= i2 { (i1, i2) } else { (i2, i1) };
    let (a, b) = (j1.min(j2), j1.max(j2));
    if b >= i2 {
        return 0.0;
    }
    let (a, b, i1, i2) = (a as f64, b as f64, i1 as f64, i2 as f64);
    a * (a + 1.0) * (i2 - b) * (i2 - b - 1.0) / (i1 * i2 * (i2 - 1.0))
}

/// Mean matrix and covariance over the lower triangle for one `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct KingmanMoments {
    n: usize,
    mean: Vec<f64>,
    cov: Vec<f64>,
}

impl KingmanMoments {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
        }
        let dim = n - 1;
        let len = tri_len(dim);
        let mut mean = Vec::with_capacity(len);
        let mut idx = Vec::with_capacity(len);
        for i in 1..=dim {
            for j in 1..=i {
                mean.push(kingman_mean_entry(i, j));
                idx.push((i, j));
            }
        }
        let mut cov = vec![0.0; len * len];
        for (a, &(i1, j1)) in idx.iter().enumerate() {
            for (b, &(i2, j2)) in idx.iter().enumerate() {
                cov[a * len + b] = cov_unchecked(i1, j1, i2, j2);
            }
        }
        Ok(Self { n, mean, cov })
    }

    pub fn leaves(&self) -> usize {
        self.n
    }

    pub fn mean(&self, i: usize, j: usize) -> f64 {
        self.mean[tri_index(i, j)]
    }

    /// Row-major flattened mean matrix.
    pub fn mean_entries(&self) -> &[f64] {
        &self.mean
    }

    pub fn var(&self, i: usize, j: usize) -> f64 {
        let k = tri_index(i, j);
        self.cov[k * self.mean.len() + k]
    }

    pub fn cov(&self, i1: usize, j1: usize, i2: usize, j2: usize) -> f64 {
        self.cov[tri_index(i1, j1) * self.mean.len() + tri_index(i2, j2)]
    }

    /// Covariance between flat entries `a` and `b`.
    pub fn cov_flat(&self, a: usize, b: usize) -> f64 {
        self.cov[a * self.mean.len() + b]
    }
}
