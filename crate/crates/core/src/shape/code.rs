use std::fmt;

use crate::error::{Error, Result};
use crate::shape::fmatrix::{DMatrix, FMatrix};

/// Functional code of a ranked tree shape with `n` leaves.
///
/// Internal nodes are labelled `2..=n` in order of branching (the root is
/// node 2). Entry `k` (1-based) holds the label of the parent of internal
/// node `k + 1`; the first entry is the sentinel `1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankedShapeCode(Vec<u32>);

impl RankedShapeCode {
    /// Validates and wraps a code.
    pub fn new(t: Vec<u32>) -> Result<Self> {
        validate_code(&t)?;
        Ok(Self(t))
    }

    pub(crate) fn from_vec_unchecked(t: Vec<u32>) -> Self {
        debug_assert!(validate_code(&t).is_ok(), "invalid code {t:?}");
        Self(t)
    }

    /// `(1, 2, ..., n-1)`, the caterpillar.
    pub fn caterpillar(n: usize) -> Self {
        assert!(n >= 2, "need at least two leaves");
        Self((1..n as u32).collect())
    }

    pub fn leaves(&self) -> usize {
        self.0.len() + 1
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    /// Number of internal nodes whose two children are both leaves.
    pub fn cherry_count(&self) -> usize {
        let mut used = vec![false; self.leaves() + 1];
        for &p in &self.0[1..] {
            used[p as usize] = true;
        }
        (2..=self.leaves()).filter(|&l| !used[l]).count()
    }

    /// Number of internal children of each internal node, indexed by
    /// `label - 2`.
    pub fn internal_children(&self) -> Vec<u8> {
        let mut counts = vec![0u8; self.0.len()];
        for &p in &self.0[1..] {
            counts[p as usize - 2] += 1;
        }
        counts
    }

    /// Children lists of each internal node (by label, indexed `label - 2`);
    /// `None` stands for a leaf. Internal children come first, in label order.
    pub fn children(&self) -> Vec<[Option<u32>; 2]> {
        let mut out = vec![[None, None]; self.0.len()];
        for (k, &p) in self.0.iter().enumerate().skip(1) {
            let slot = &mut out[p as usize - 2];
            let child = Some(k as u32 + 2);
            if slot[0].is_none() {
                slot[0] = child;
            } else {
                slot[1] = child;
            }
        }
        out
    }

    /// Number of internal nodes in the subtree rooted at each internal node
    /// (itself included), indexed `label - 2`.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![1usize; self.0.len()];
        for k in (1..self.0.len()).rev() {
            let parent = self.0[k] as usize - 2;
            sizes[parent] += sizes[k];
        }
        sizes
    }

    pub fn to_fmatrix(&self) -> FMatrix {
        DMatrix::from_code(self).to_fmatrix()
    }

    pub fn from_fmatrix(f: &FMatrix) -> Self {
        f.to_code()
    }
}

/// Checks the three defining properties of a functional code, reporting the
/// first offending 1-based position.
pub fn validate_code(t: &[u32]) -> Result<()> {
    if t.is_empty() {
        return Err(Error::InvalidCode { index: 0, reason: "empty code" });
    }
    if t[0] != 1 {
        return Err(Error::InvalidCode { index: 1, reason: "first entry must be 1" });
    }
    let mut seen = vec![0u8; t.len() + 2];
    for (k, &v) in t.iter().enumerate().skip(1) {
        let i = k + 1;
        if v < 2 || v as usize > i {
            return Err(Error::InvalidCode { index: i, reason: "parent label out of range 2..=i" });
        }
        seen[v as usize] += 1;
        if seen[v as usize] > 2 {
            return Err(Error::InvalidCode { index: i, reason: "label used more than twice" });
        }
    }
    Ok(())
}

impl fmt::Display for RankedShapeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for RankedShapeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}
