use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::par;

/// Symmetric matrix of pairwise distances with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    size: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let size = rows.len();
        let mut data = Vec::with_capacity(size * size);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::InvalidParameter(format!("row {} has {} entries, expected {size}", i + 1, row.len())));
            }
            data.extend_from_slice(row);
        }
        let m = Self { size, data };
        for i in 0..size {
            if m.get(i, i) != 0.0 {
                return Err(Error::InvalidParameter(format!("non-zero diagonal at {}", i + 1)));
            }
            for j in 0..i {
                if (m.get(i, j) - m.get(j, i)).abs() > 1e-9 * (1.0 + m.get(i, j).abs()) {
                    return Err(Error::InvalidParameter(format!("matrix is not symmetric at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.size..(i + 1) * self.size]
    }

    /// Reads the format written by [`DistanceMatrix::write_csv`].
    pub fn read_csv<R: Read>(input: R) -> Result<(Vec<String>, Self)> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let fmt = |line: usize, message: String| Error::Format { line, message };
        let ids: Vec<String> = r.headers().map_err(|e| fmt(1, e.to_string()))?.iter().map(String::from).collect();
        let mut rows = Vec::with_capacity(ids.len());
        for (k, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| fmt(k + 2, e.to_string()))?;
            let row = rec
                .iter()
                .map(|v| v.trim().parse::<f64>().map_err(|_| fmt(k + 2, format!("not a number: '{v}'"))))
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        if rows.len() != ids.len() {
            return Err(fmt(rows.len() + 1, format!("{} rows for {} identifiers", rows.len(), ids.len())));
        }
        Ok((ids, Self::from_rows(rows)?))
    }

    /// Writes a header of identifiers followed by the square matrix.
    pub fn write_csv<W: Write>(&self, ids: &[String], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(ids).map_err(io)?;
        for i in 0..self.size {
            w.write_record(self.row(i).iter().map(|v| v.to_string())).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))?;
        Ok(())
    }
}

/// Evaluates `dist` on every unordered pair. Rows are fanned out across
/// threads when `parallel` is set; each entry is computed once, so the result
/// does not depend on scheduling.
pub fn pairwise_distance_matrix<T, F>(items: &[T], parallel: bool, dist: F) -> Result<DistanceMatrix>
where
    T: Sync,
    F: Fn(&T, &T) -> Result<f64> + Sync + Send,
{
    let size = items.len();
    let upper: Vec<Result<Vec<f64>>> = par::map_indices(size, parallel, |i| {
        (i + 1..size).map(|j| dist(&items[i], &items[j])).collect()
    });
    let mut data = vec![0.0; size * size];
    for (i, row) in upper.into_iter().enumerate() {
        for (k, d) in row?.into_iter().enumerate() {
            let j = i + 1 + k;
            data[i * size + j] = d;
            data[j * size + i] = d;
        }
    }
    Ok(DistanceMatrix { size, data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{d_shape, Metric};
    use crate::shape::{enumerate_shapes, FMatrix};

    #[test]
    fn identical_and_empty() {
        let f = FMatrix::balanced(5);
        let m = pairwise_distance_matrix(&[f.clone(), f], true, |a, b| d_shape(a, b, Metric::L2)).unwrap();
        assert_eq!(m.row(0), &[0.0, 0.0]);
        let e = pairwise_distance_matrix::<FMatrix, _>(&[], true, |a, b| d_shape(a, b, Metric::L2)).unwrap();
        assert_eq!(e.size(), 0);
    }

    #[test]
    fn parallel_matches_sequential() {
        let all = enumerate_shapes(5).unwrap();
        let seq = pairwise_distance_matrix(&all, false, |a, b| d_shape(a, b, Metric::L1)).unwrap();
        let par = pairwise_distance_matrix(&all, true, |a, b| d_shape(a, b, Metric::L1)).unwrap();
        assert_eq!(seq, par);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(seq.get(i, j), d_shape(&all[i], &all[j], Metric::L1).unwrap());
            }
        }
    }

    #[test]
    fn errors_propagate() {
        let items = [FMatrix::balanced(4), FMatrix::balanced(5)];
        assert!(pairwise_distance_matrix(&items, false, |a, b| d_shape(a, b, Metric::L1)).is_err());
    }

    #[test]
    fn csv_layout() {
        let m = DistanceMatrix::from_rows(vec![vec![0.0, 1.5], vec![1.5, 0.0]]).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&["a".into(), "b".into()], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n0,1.5\n1.5,0\n");
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
    }
}
