use crate::error::{Error, Result};
use crate::metrics::{check_same, Metric};
use crate::shape::fmatrix::{tri_index, tri_len};
use crate::shape::{FMatrix, RankedShapeCode};

/// Interval weights `W[i][j] = u[j] - u[i+1]`, with `u[n] = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl WeightMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[tri_index(i, j)]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (1..=self.dim).map(|i| (1..=i).map(|j| self.get(i, j)).collect()).collect()
    }
}

pub(crate) fn check_times(u: &[f64]) -> Result<()> {
    if u.is_empty() {
        return Err(Error::InvalidTimes("no event times".into()));
    }
    for (k, &t) in u.iter().enumerate() {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidTimes(format!("time {t} at position {} is not a non-negative number", k + 1)));
        }
        if k > 0 && t > u[k - 1] {
            return Err(Error::InvalidTimes(format!(
                "times must not increase towards the present (position {}: {} > {})",
                k + 1,
                t,
                u[k - 1]
            )));
        }
    }
    Ok(())
}

/// Weight matrix for branching times `u[1] >= ... >= u[n-1] >= 0` (time
/// before present; the sampling time `u[n] = 0` is implicit).
pub fn weight_matrix(u: &[f64]) -> Result<WeightMatrix> {
    check_times(u)?;
    Ok(weights_unchecked(u))
}

fn weights_unchecked(u: &[f64]) -> WeightMatrix {
    let dim = u.len();
    let at = |k: usize| if k > dim { 0.0 } else { u[k - 1] };
    let mut entries = Vec::with_capacity(tri_len(dim));
    for i in 1..=dim {
        for j in 1..=i {
            entries.push(at(j) - at(i + 1));
        }
    }
    WeightMatrix { dim, entries }
}

/// A ranked tree shape with branching times.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedGenealogy {
    code: RankedShapeCode,
    times: Vec<f64>,
    f: FMatrix,
    w: WeightMatrix,
}

impl RankedGenealogy {
    /// `times[k]` is the time before present at which internal node `k + 2`
    /// branches; times must not increase.
    pub fn new(code: RankedShapeCode, times: Vec<f64>) -> Result<Self> {
        if times.len() + 1 != code.leaves() {
            return Err(Error::InvalidTimes(format!(
                "{} times given for a shape with {} leaves (need {})",
                times.len(),
                code.leaves(),
                code.leaves() - 1
            )));
        }
        check_times(&times)?;
        let f = code.to_fmatrix();
        let w = weights_unchecked(&times);
        Ok(Self { code, times, f, w })
    }

    pub fn leaves(&self) -> usize {
        self.code.leaves()
    }

    pub fn code(&self) -> &RankedShapeCode {
        &self.code
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fmatrix(&self) -> &FMatrix {
        &self.f
    }

    pub fn weights(&self) -> &WeightMatrix {
        &self.w
    }

    /// Flattened Hadamard product `F * W`.
    pub fn weighted(&self) -> Vec<f64> {
        self.f.entries().iter().zip(self.w.entries()).map(|(&f, &w)| f as f64 * w).collect()
    }
}

/// Lp distance between the `F * W` products of two genealogies.
pub fn d_genealogy(a: &RankedGenealogy, b: &RankedGenealogy, metric: Metric) -> Result<f64> {
    check_same(a.leaves(), b.leaves())?;
    let diffs = a
        .f
        .entries()
        .iter()
        .zip(a.w.entries())
        .zip(b.f.entries().iter().zip(b.w.entries()))
        .map(|((&fa, &wa), (&fb, &wb))| fa as f64 * wa - fb as f64 * wb);
    Ok(metric.from_diffs(diffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_from_times() {
        let w = weight_matrix(&[3.0, 2.0, 1.0]).unwrap();
        assert_eq!(w.to_rows(), vec![vec![1.0], vec![2.0, 1.0], vec![3.0, 2.0, 1.0]]);
        let w = weight_matrix(&[0.0, 0.0]).unwrap();
        assert!(w.entries().iter().all(|&x| x == 0.0));
        assert_eq!(weight_matrix(&[1.0]).unwrap().to_rows(), vec![vec![1.0]]);
        assert!(weight_matrix(&[1.0, 2.0]).is_err());
        assert!(weight_matrix(&[1.0, -1.0]).is_err());
        assert!(weight_matrix(&[]).is_err());
    }

    #[test]
    fn scaling_times_scales_distance() {
        let c = RankedShapeCode::new(vec![1, 2, 2, 3]).unwrap();
        let g = RankedGenealogy::new(c.clone(), vec![4.0, 3.0, 2.5, 1.0]).unwrap();
        let g2 = RankedGenealogy::new(c, vec![8.0, 6.0, 5.0, 2.0]).unwrap();
        let total: f64 = g.weighted().iter().sum();
        assert!((d_genealogy(&g, &g2, Metric::L1).unwrap() - total).abs() < 1e-12);
        assert_eq!(d_genealogy(&g, &g, Metric::L2).unwrap(), 0.0);
    }

    #[test]
    fn wrong_time_count() {
        let c = RankedShapeCode::new(vec![1, 2]).unwrap();
        assert!(RankedGenealogy::new(c, vec![1.0]).is_err());
    }
}
