//! Standardized sample means of F-matrices.
//!
//! `sqrt(m) (mean(F) - M)` is asymptotically normal; whitening it with a
//! (pseudo-)inverse square root of the covariance gives approximately
//! independent standard normal coordinates, and its squared norm is
//! approximately chi-square with `rank` degrees of freedom.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::models::kingman::KingmanMoments;
use crate::shape::fmatrix::tri_index;
use crate::shape::FMatrix;

/// Covariance used for whitening.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Covariance {
    /// Analytic Kingman covariance.
    Kingman,
    /// Sample covariance (divisor `m - 1`).
    Empirical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CltResult {
    /// 1-based `(i, j)` of each retained coordinate.
    pub coords: Vec<(usize, usize)>,
    /// `sqrt(m) (mean - M)` on the retained coordinates.
    pub raw: Vec<f64>,
    /// Whitened residuals `Sigma^{+1/2} raw`.
    pub residuals: Vec<f64>,
    /// Squared norm of the whitened residuals.
    pub statistic: f64,
    pub rank: usize,
    pub m: usize,
}

const EIGEN_TOL: f64 = 1e-10;

/// Standardizes a sample against the Kingman mean.
pub fn clt_standardize(sample: &[FMatrix], covariance: Covariance) -> Result<CltResult> {
    let Some(first) = sample.first() else {
        return Err(Error::EmptySample);
    };
    let moments = KingmanMoments::new(first.leaves())?;
    clt_standardize_against(sample, moments.mean_entries(), covariance)
}

/// Standardizes a sample against a given flattened mean matrix.
pub fn clt_standardize_against(sample: &[FMatrix], mean: &[f64], covariance: Covariance) -> Result<CltResult> {
    let Some(first) = sample.first() else {
        return Err(Error::EmptySample);
    };
    let m = sample.len();
    if m < 2 {
        return Err(Error::InvalidParameter("need at least two matrices".into()));
    }
    let n = first.leaves();
    for f in sample {
        crate::metrics::check_same(n, f.leaves())?;
    }
    if mean.len() != first.entries().len() {
        return Err(Error::InvalidParameter(format!(
            "mean has {} entries, expected {}",
            mean.len(),
            first.entries().len()
        )));
    }
    let candidates: Vec<(usize, usize)> = (3..n).flat_map(|i| (1..=i - 2).map(move |j| (i, j))).collect();
    let flat: Vec<usize> = candidates.iter().map(|&(i, j)| tri_index(i, j)).collect();

    let mf = m as f64;
    let avg: Vec<f64> = flat
        .iter()
        .map(|&k| sample.iter().map(|f| f.entries()[k] as f64).sum::<f64>() / mf)
        .collect();

    let full_cov: Vec<Vec<f64>> = match covariance {
        Covariance::Kingman => {
            let km = KingmanMoments::new(n)?;
            flat.iter().map(|&a| flat.iter().map(|&b| km.cov_flat(a, b)).collect()).collect()
        }
        Covariance::Empirical => {
            let centered: Vec<Vec<f64>> = sample
                .iter()
                .map(|f| flat.iter().zip(&avg).map(|(&k, &mu)| f.entries()[k] as f64 - mu).collect())
                .collect();
            (0..flat.len())
                .map(|a| {
                    (0..flat.len())
                        .map(|b| centered.iter().map(|c| c[a] * c[b]).sum::<f64>() / (mf - 1.0))
                        .collect()
                })
                .collect()
        }
    };

    let keep: Vec<usize> = (0..flat.len()).filter(|&a| full_cov[a][a] > EIGEN_TOL).collect();
    if keep.is_empty() {
        return Err(Error::RankZero);
    }
    let k = keep.len();
    let sigma = DMatrix::from_fn(k, k, |r, c| full_cov[keep[r]][keep[c]]);
    let raw: Vec<f64> = keep.iter().map(|&a| mf.sqrt() * (avg[a] - mean[flat[a]])).collect();

    let eig = SymmetricEigen::new(sigma);
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    if lmax <= EIGEN_TOL {
        return Err(Error::RankZero);
    }
    let inv_sqrt: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| if l > EIGEN_TOL * lmax.max(1.0) { 1.0 / l.sqrt() } else { 0.0 })
        .collect();
    let rank = inv_sqrt.iter().filter(|&&x| x > 0.0).count();
    let v = &eig.eigenvectors;
    let r = DVector::from_vec(raw.clone());
    let proj = v.transpose() * r;
    let scaled = DVector::from_iterator(k, proj.iter().zip(&inv_sqrt).map(|(p, s)| p * s));
    let z = v * scaled;
    let residuals: Vec<f64> = z.iter().cloned().collect();
    let statistic = residuals.iter().map(|x| x * x).sum();
    Ok(CltResult {
        coords: keep.iter().map(|&a| candidates[a]).collect(),
        raw,
        residuals,
        statistic,
        rank,
        m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::beta_split::{sample_blum_francois, BetaSplit};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identical_trees_against_kingman() {
        let f = FMatrix::balanced(6);
        let sample = vec![f.clone(); 4];
        let res = clt_standardize(&sample, Covariance::Kingman).unwrap();
        assert_eq!(res.coords, vec![(3, 1), (4, 1), (4, 2), (5, 1), (5, 2), (5, 3)]);
        let km = KingmanMoments::new(6).unwrap();
        for (x, &(i, j)) in res.raw.iter().zip(&res.coords) {
            assert!((x - 2.0 * (f.get(i, j) as f64 - km.mean(i, j))).abs() < 1e-12);
        }
        assert_eq!(res.rank, 6);
    }

    #[test]
    fn degenerate_empirical() {
        let sample = vec![FMatrix::balanced(6); 5];
        assert_eq!(clt_standardize(&sample, Covariance::Empirical), Err(Error::RankZero));
        assert_eq!(clt_standardize(&[], Covariance::Kingman), Err(Error::EmptySample));
    }

    #[test]
    fn statistic_is_mahalanobis() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sample: Vec<FMatrix> =
            (0..300).map(|_| sample_blum_francois(6, BetaSplit::YULE, &mut rng).to_fmatrix()).collect();
        let res = clt_standardize(&sample, Covariance::Kingman).unwrap();
        let km = KingmanMoments::new(6).unwrap();
        let k = res.coords.len();
        let sigma = DMatrix::from_fn(k, k, |r, c| {
            let (i1, j1) = res.coords[r];
            let (i2, j2) = res.coords[c];
            km.cov(i1, j1, i2, j2)
        });
        let inv = sigma.try_inverse().unwrap();
        let r = DVector::from_vec(res.raw.clone());
        let q = (r.transpose() * inv * r)[(0, 0)];
        assert!((q - res.statistic).abs() < 1e-8 * q.max(1.0));
    }
}
