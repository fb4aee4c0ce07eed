use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::shape::code::RankedShapeCode;

/// Flat offset of the 1-based lower-triangle entry `(i, j)`, `j <= i`.
#[inline]
pub(crate) fn tri_index(i: usize, j: usize) -> usize {
    debug_assert!(j >= 1 && j <= i);
    i * (i - 1) / 2 + (j - 1)
}

/// Number of stored entries for a triangle with `dim` rows.
#[inline]
pub(crate) fn tri_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

/// Which defining inequality of an F-matrix failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    /// Row `i` does not hold exactly `i` entries.
    Shape,
    Negative,
    /// `F[i][i] = i + 1`.
    Diagonal,
    /// `F[i+1][i] = i`.
    Subdiagonal,
    /// `max(0, F[i-1][1] - 1) <= F[i][1] <= F[i-1][1]`.
    FirstColumn,
    /// `F[i][k-1] <= F[i][k]`.
    RowOrder,
    /// `F[i-1][k] - 1 <= F[i][k] <= F[i-1][k]`.
    ColumnStep,
    /// `F[i][k-1] + F[i-1][k] - F[i-1][k-1] - 1 <= F[i][k] <= F[i][k-1] + F[i-1][k] - F[i-1][k-1]`.
    Increment,
}

/// The first violated constraint, with 1-based indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub constraint: Constraint,
    pub row: usize,
    pub col: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} constraint violated at ({}, {})", self.constraint, self.row, self.col)
    }
}

/// Checks a lower-triangular integer matrix (row `i` holds `i` entries)
/// against the defining constraints of the F-matrix space.
///
/// Entries are scanned row-major; the first failure is reported.
pub fn validate_fmatrix(rows: &[Vec<i64>]) -> std::result::Result<(), Violation> {
    let fail = |constraint, row, col| Err(Violation { constraint, row, col });
    if rows.is_empty() {
        return fail(Constraint::Shape, 0, 0);
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != r + 1 {
            return fail(Constraint::Shape, r + 1, row.len());
        }
    }
    let at = |i: usize, j: usize| rows[i - 1][j - 1];
    for i in 1..=rows.len() {
        for j in 1..=i {
            let v = at(i, j);
            if v < 0 {
                return fail(Constraint::Negative, i, j);
            }
            if j == i {
                if v != i as i64 + 1 {
                    return fail(Constraint::Diagonal, i, j);
                }
            } else if j + 1 == i {
                if v != j as i64 {
                    return fail(Constraint::Subdiagonal, i, j);
                }
            } else if j == 1 {
                let above = at(i - 1, 1);
                if v < (above - 1).max(0) || v > above {
                    return fail(Constraint::FirstColumn, i, j);
                }
            } else {
                let left = at(i, j - 1);
                let above = at(i - 1, j);
                let diag = at(i - 1, j - 1);
                if v < left {
                    return fail(Constraint::RowOrder, i, j);
                }
                if v < above - 1 || v > above {
                    return fail(Constraint::ColumnStep, i, j);
                }
                let hi = left + above - diag;
                if v < hi - 1 || v > hi {
                    return fail(Constraint::Increment, i, j);
                }
            }
        }
    }
    Ok(())
}

/// Canonical encoding of a ranked tree shape with `n` leaves: an
/// `(n-1) x (n-1)` lower-triangular matrix where `F[i][j]` counts the
/// branches extant in interval `j` that have not bifurcated by the end of
/// interval `i`.
///
/// Indices in the public accessors are 1-based; storage is a flat row-major
/// triangle.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FMatrix {
    n: usize,
    entries: Vec<u16>,
}

impl FMatrix {
    /// Builds and validates a matrix from its rows.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        validate_fmatrix(rows).map_err(Error::InvalidFMatrix)?;
        let n = rows.len() + 1;
        if n > u16::MAX as usize {
            return Err(Error::InvalidParameter(format!("n = {n} is too large")));
        }
        let entries = rows.iter().flatten().map(|&v| v as u16).collect();
        Ok(Self { n, entries })
    }

    pub(crate) fn from_flat_unchecked(n: usize, entries: Vec<u16>) -> Self {
        debug_assert_eq!(entries.len(), tri_len(n - 1));
        Self { n, entries }
    }

    /// Number of leaves.
    pub fn leaves(&self) -> usize {
        self.n
    }

    /// Number of rows, `n - 1`.
    pub fn dim(&self) -> usize {
        self.n - 1
    }

    /// Entry `F[i][j]`, 1-based, `1 <= j <= i <= n - 1`.
    pub fn get(&self, i: usize, j: usize) -> u16 {
        assert!(j >= 1 && j <= i && i < self.n, "index ({i}, {j}) out of range");
        self.entries[tri_index(i, j)]
    }

    /// Row-major flattened lower triangle.
    pub fn entries(&self) -> &[u16] {
        &self.entries
    }

    /// Row `i` (1-based) as a slice of length `i`.
    pub fn row(&self, i: usize) -> &[u16] {
        let start = tri_index(i, 1);
        &self.entries[start..start + i]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u16]> + '_ {
        (1..self.n).map(move |i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.rows().map(|r| r.iter().map(|&v| v as i64).collect()).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(|&v| v as f64).collect()
    }

    /// The caterpillar (most unbalanced) shape: `F[i][j] = j` below the
    /// diagonal.
    pub fn unbalanced(n: usize) -> Self {
        assert!(n >= 2, "need at least two leaves");
        let mut entries = Vec::with_capacity(tri_len(n - 1));
        for i in 1..n {
            for j in 1..=i {
                entries.push(if j == i { (i + 1) as u16 } else { j as u16 });
            }
        }
        Self { n, entries }
    }

    /// The most balanced shape: `F[i][j] = max(0, 2j - i + 1)`.
    pub fn balanced(n: usize) -> Self {
        assert!(n >= 2, "need at least two leaves");
        let mut entries = Vec::with_capacity(tri_len(n - 1));
        for i in 1..n as i64 {
            for j in 1..=i {
                entries.push((2 * j - i + 1).max(0) as u16);
            }
        }
        Self { n, entries }
    }

    /// Intermediate D-matrix, `D[i][j] = F[i][j] - F[i][j-1]`.
    pub fn to_dmatrix(&self) -> DMatrix {
        let dim = self.dim();
        let mut entries = Vec::with_capacity(self.entries.len());
        for i in 1..=dim {
            let row = self.row(i);
            let mut prev = 0u16;
            for &v in row {
                entries.push((v - prev) as u8);
                prev = v;
            }
        }
        DMatrix { n: self.n, entries }
    }

    /// Functional code of the shape.
    pub fn to_code(&self) -> RankedShapeCode {
        self.to_dmatrix().to_code()
    }

    /// Order of the depth-first enumeration: row-major comparison with
    /// larger entries first. The caterpillar is the minimum.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        other.entries.cmp(&self.entries)
    }

    /// Sum of all entries.
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|&v| v as u64).sum()
    }
}

impl PartialOrd for FMatrix {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FMatrix {
    /// Canonical order, see [`FMatrix::canonical_cmp`].
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| self.canonical_cmp(other))
    }
}

impl fmt::Debug for FMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

/// Counts of surviving children per internal node: `D[i][j]` is the number of
/// children of node `j + 1` that have not bifurcated by the end of interval
/// `i`. Each entry is 0, 1 or 2.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DMatrix {
    n: usize,
    entries: Vec<u8>,
}

impl DMatrix {
    /// Simulates the branching order encoded by `code`.
    pub fn from_code(code: &RankedShapeCode) -> Self {
        let n = code.leaves();
        let dim = n - 1;
        let mut entries = vec![0u8; tri_len(dim)];
        let mut current: Vec<u8> = Vec::with_capacity(dim);
        for (k, &parent) in code.as_slice().iter().enumerate() {
            let i = k + 1;
            if i > 1 {
                current[parent as usize - 2] -= 1;
            }
            current.push(2);
            let start = tri_index(i, 1);
            entries[start..start + i].copy_from_slice(&current);
        }
        Self { n, entries }
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[tri_index(i, j)]
    }

    pub fn leaves(&self) -> usize {
        self.n
    }

    /// Column prefix sums along each row.
    pub fn to_fmatrix(&self) -> FMatrix {
        let dim = self.n - 1;
        let mut entries = Vec::with_capacity(self.entries.len());
        for i in 1..=dim {
            let mut acc = 0u16;
            for j in 1..=i {
                acc += self.get(i, j) as u16;
                entries.push(acc);
            }
        }
        FMatrix::from_flat_unchecked(self.n, entries)
    }

    /// Recovers the code by locating, in each row, the column whose count
    /// dropped relative to the previous row.
    pub fn to_code(&self) -> RankedShapeCode {
        let dim = self.n - 1;
        let mut t = Vec::with_capacity(dim);
        t.push(1u32);
        for i in 2..=dim {
            let col = (1..i)
                .find(|&j| self.get(i - 1, j) > self.get(i, j))
                .expect("a valid D-matrix has exactly one decreasing column per row");
            t.push(col as u32 + 1);
        }
        RankedShapeCode::from_vec_unchecked(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(v: &[&[i64]]) -> Vec<Vec<i64>> {
        v.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn extremal_matrices_validate() {
        let unb = rows(&[&[2], &[1, 3], &[1, 2, 4], &[1, 2, 3, 5]]);
        let bal = rows(&[&[2], &[1, 3], &[0, 2, 4], &[0, 1, 3, 5]]);
        assert_eq!(validate_fmatrix(&unb), Ok(()));
        assert_eq!(validate_fmatrix(&bal), Ok(()));
        assert_eq!(FMatrix::unbalanced(5).to_rows(), unb);
        assert_eq!(FMatrix::balanced(5).to_rows(), bal);
    }

    #[test]
    fn n3_extremes_coincide() {
        assert_eq!(FMatrix::unbalanced(3), FMatrix::balanced(3));
        assert_eq!(FMatrix::unbalanced(3).to_rows(), rows(&[&[2], &[1, 3]]));
    }

    #[test]
    fn diagonal_violation_reported() {
        let bad = rows(&[&[3]]);
        assert_eq!(
            validate_fmatrix(&bad),
            Err(Violation { constraint: Constraint::Diagonal, row: 1, col: 1 })
        );
    }

    #[test]
    fn other_violations() {
        let shape = rows(&[&[2], &[1]]);
        assert_eq!(validate_fmatrix(&shape).unwrap_err().constraint, Constraint::Shape);
        let sub = rows(&[&[2], &[2, 3]]);
        assert_eq!(validate_fmatrix(&sub).unwrap_err().constraint, Constraint::Subdiagonal);
        let first = rows(&[&[2], &[1, 3], &[2, 2, 4]]);
        assert_eq!(validate_fmatrix(&first).unwrap_err().constraint, Constraint::FirstColumn);
        // two columns dropping in one row
        let two = rows(&[&[2], &[1, 3], &[1, 2, 4], &[0, 1, 3, 5], &[0, 0, 2, 4, 6]]);
        assert!(validate_fmatrix(&two).is_ok());
        let neg = rows(&[&[2], &[1, 3], &[-1, 2, 4]]);
        assert_eq!(validate_fmatrix(&neg).unwrap_err().constraint, Constraint::Negative);
        let step = rows(&[&[2], &[1, 3], &[1, 2, 4], &[1, 3, 3, 5]]);
        assert_eq!(validate_fmatrix(&step).unwrap_err().constraint, Constraint::ColumnStep);
        assert_eq!(validate_fmatrix(&[]).unwrap_err().constraint, Constraint::Shape);
    }

    #[test]
    fn dmatrix_round_trip() {
        let f = FMatrix::balanced(5);
        let d = f.to_dmatrix();
        assert_eq!(d.get(3, 1), 0);
        assert_eq!(d.get(4, 2), 1);
        assert_eq!(d.to_fmatrix(), f);
        assert_eq!(f.to_code().as_slice(), &[1, 2, 2, 3]);
    }

    #[test]
    fn canonical_order_puts_caterpillar_first() {
        let unb = FMatrix::unbalanced(6);
        let bal = FMatrix::balanced(6);
        assert_eq!(unb.canonical_cmp(&bal), Ordering::Less);
    }
}
