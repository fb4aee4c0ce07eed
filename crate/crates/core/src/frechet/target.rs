use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::metrics::{check_same, d1_exact};
use crate::models::KingmanMoments;
use crate::shape::fmatrix::{tri_index, tri_len};
use crate::shape::FMatrix;

const PMF_TOL: f64 = 1e-10;

/// Entrywise mean `M` of F-matrices under a sample or a distribution. For
/// the d2 metric the Fréchet mean depends on the input only through `M`:
/// `sum_k mu_k d2(F, Y_k)^2 = ||F - M||^2 + const`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl TargetMatrix {
    pub fn from_sample(sample: &[FMatrix]) -> Result<Self> {
        let weights = vec![1.0 / sample.len() as f64; sample.len()];
        Self::from_weighted(sample, &weights)
    }

    /// Expectation under `weights`, which must sum to one.
    pub fn from_weighted(support: &[FMatrix], weights: &[f64]) -> Result<Self> {
        let Some(first) = support.first() else {
            return Err(Error::EmptySample);
        };
        check_weights(support.len(), weights)?;
        let n = first.leaves();
        let mut entries = vec![0.0; first.entries().len()];
        for (f, &w) in support.iter().zip(weights) {
            check_same(n, f.leaves())?;
            for (m, &v) in entries.iter_mut().zip(f.entries()) {
                *m += w * v as f64;
            }
        }
        Ok(Self { n, entries })
    }

    /// Row-major flattened entries.
    pub fn from_entries(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n < 2 || entries.len() != tri_len(n - 1) {
            return Err(Error::InvalidParameter(format!(
                "{} entries do not form a target matrix for n = {n}",
                entries.len()
            )));
        }
        Ok(Self { n, entries })
    }

    /// Analytic mean under the Yule distribution.
    pub fn kingman(n: usize) -> Result<Self> {
        let m = KingmanMoments::new(n)?;
        Ok(Self { n, entries: m.mean_entries().to_vec() })
    }

    pub fn leaves(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[tri_index(i, j)]
    }

    /// `||F - M||^2`.
    pub fn energy(&self, f: &FMatrix) -> f64 {
        f.entries().iter().zip(&self.entries).map(|(&v, m)| (v as f64 - m).powi(2)).sum()
    }

    /// `sum F^2 - 2 F M`, which differs from [`energy`](Self::energy) by
    /// the constant `sum M^2`.
    pub fn quadratic_objective(&self, f: &FMatrix) -> f64 {
        f.entries()
            .iter()
            .zip(&self.entries)
            .map(|(&v, m)| {
                let v = v as f64;
                v * v - 2.0 * v * m
            })
            .sum()
    }
}

pub(crate) fn check_weights(len: usize, weights: &[f64]) -> Result<()> {
    if weights.len() != len {
        return Err(Error::DimensionMismatch { left: len, right: weights.len() });
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidParameter("weights must be finite and non-negative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > PMF_TOL {
        return Err(Error::InvalidParameter(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

/// What a Fréchet mean of shapes minimizes.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    /// d2: `||F - M||^2`.
    L2(TargetMatrix),
    /// d1: `sum_k w_k d1(F, Y_k)^2` over a weighted support.
    L1 { support: Vec<FMatrix>, weights: Vec<f64> },
}

impl Objective {
    pub fn l2_from_sample(sample: &[FMatrix]) -> Result<Self> {
        Ok(Objective::L2(TargetMatrix::from_sample(sample)?))
    }

    /// Empirical d1 objective; repeated shapes are merged.
    pub fn l1_from_sample(sample: &[FMatrix]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut counts: BTreeMap<&FMatrix, usize> = BTreeMap::new();
        for f in sample {
            *counts.entry(f).or_default() += 1;
        }
        let m = sample.len() as f64;
        let (support, weights) = counts.into_iter().map(|(f, c)| (f.clone(), c as f64 / m)).unzip();
        Self::l1_weighted(support, weights)
    }

    pub fn l1_weighted(support: Vec<FMatrix>, weights: Vec<f64>) -> Result<Self> {
        let Some(first) = support.first() else {
            return Err(Error::EmptySample);
        };
        check_weights(support.len(), &weights)?;
        for f in &support {
            check_same(first.leaves(), f.leaves())?;
        }
        Ok(Objective::L1 { support, weights })
    }

    pub fn leaves(&self) -> usize {
        match self {
            Objective::L2(t) => t.leaves(),
            Objective::L1 { support, .. } => support[0].leaves(),
        }
    }

    pub fn energy(&self, f: &FMatrix) -> f64 {
        match self {
            Objective::L2(t) => t.energy(f),
            Objective::L1 { support, weights } => {
                support.iter().zip(weights).map(|(y, w)| w * (d1_exact(f, y) as f64).powi(2)).sum()
            }
        }
    }
}
