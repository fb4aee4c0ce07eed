//! Classical multidimensional scaling.

use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::metrics::DistanceMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct MdsEmbedding {
    /// One row of `k` coordinates per point.
    pub coordinates: Vec<Vec<f64>>,
    /// Leading eigenvalues of the centered Gram matrix, clamped at zero.
    pub eigenvalues: Vec<f64>,
    /// Share of the positive spectrum captured by the `k` axes.
    pub explained: f64,
}

impl MdsEmbedding {
    pub fn write_csv<W: Write>(&self, ids: &[String], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        let k = self.eigenvalues.len();
        let mut header = vec!["id".to_string()];
        header.extend((1..=k).map(|a| format!("axis{a}")));
        w.write_record(&header).map_err(io)?;
        for (id, row) in ids.iter().zip(&self.coordinates) {
            let mut rec = vec![id.clone()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

/// Embeds `d` in `k` dimensions. Each axis is oriented so that its
/// coordinate of largest magnitude (first on ties) is positive.
pub fn classical_mds(d: &DistanceMatrix, k: usize) -> Result<MdsEmbedding> {
    let m = d.size();
    if k == 0 {
        return Err(Error::InvalidParameter("embedding dimension must be at least 1".into()));
    }
    if m == 0 {
        return Err(Error::EmptySample);
    }
    let sq = DMatrix::from_fn(m, m, |i, j| d.get(i, j) * d.get(i, j));
    let row_mean: Vec<f64> = (0..m).map(|i| sq.row(i).mean()).collect();
    let total = row_mean.iter().sum::<f64>() / m as f64;
    let gram = DMatrix::from_fn(m, m, |i, j| -0.5 * (sq[(i, j)] - row_mean[i] - row_mean[j] + total));
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let k = k.min(m);
    let positive: f64 = eig.eigenvalues.iter().filter(|&&v| v > 0.0).sum();
    let mut coordinates = vec![Vec::with_capacity(k); m];
    let mut eigenvalues = Vec::with_capacity(k);
    for &a in &order[..k] {
        let lambda = eig.eigenvalues[a].max(0.0);
        let v = eig.eigenvectors.column(a);
        let pivot = (0..m).fold(0, |best, i| if v[i].abs() > v[best].abs() + 1e-12 { i } else { best });
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for (i, row) in coordinates.iter_mut().enumerate() {
            row.push(sign * v[i] * lambda.sqrt());
        }
        eigenvalues.push(lambda);
    }
    let explained = if positive > 0.0 { eigenvalues.iter().sum::<f64>() / positive } else { 1.0 };
    Ok(MdsEmbedding { coordinates, eigenvalues, explained })
}
