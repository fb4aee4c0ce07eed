//! d1/d2 distances between ranked tree shapes and ranked genealogies.

pub mod align;
pub mod genealogy;
pub mod pairwise;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::shape::FMatrix;

pub use align::{align_heterochronous, d_aligned, d_hetero, AlignedMatrix, Event, HeteroGenealogy};
pub use genealogy::{d_genealogy, weight_matrix, RankedGenealogy, WeightMatrix};
pub use pairwise::{pairwise_distance_matrix, DistanceMatrix};

/// Entrywise L1 (`d1`) or L2 (`d2`) distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    L1,
    L2,
}

impl Metric {
    /// Distance from a sequence of entrywise differences.
    pub fn from_diffs<I: IntoIterator<Item = f64>>(self, diffs: I) -> f64 {
        match self {
            Metric::L1 => diffs.into_iter().map(f64::abs).sum(),
            Metric::L2 => diffs.into_iter().map(|d| d * d).sum::<f64>().sqrt(),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "d1" | "1" | "l1" | "L1" => Ok(Metric::L1),
            "d2" | "2" | "l2" | "L2" => Ok(Metric::L2),
            _ => Err(Error::InvalidParameter(format!("unknown metric '{s}' (use d1 or d2)"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::L1 => "d1",
            Metric::L2 => "d2",
        })
    }
}

pub(crate) fn check_same(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

/// `sum |F1 - F2|`, exact.
pub fn d1_exact(a: &FMatrix, b: &FMatrix) -> u64 {
    a.entries().iter().zip(b.entries()).map(|(&x, &y)| x.abs_diff(y) as u64).sum()
}

/// `sum (F1 - F2)^2`, exact.
pub fn d2_squared_exact(a: &FMatrix, b: &FMatrix) -> u64 {
    a.entries()
        .iter()
        .zip(b.entries())
        .map(|(&x, &y)| {
            let d = x.abs_diff(y) as u64;
            d * d
        })
        .sum()
}

/// d1 or d2 between two shapes with the same number of leaves.
pub fn d_shape(a: &FMatrix, b: &FMatrix, metric: Metric) -> Result<f64> {
    check_same(a.leaves(), b.leaves())?;
    Ok(match metric {
        Metric::L1 => d1_exact(a, b) as f64,
        Metric::L2 => (d2_squared_exact(a, b) as f64).sqrt(),
    })
}

/// Squared distance, exact for shapes (no square root round trip for d2).
pub fn d_shape_squared(a: &FMatrix, b: &FMatrix, metric: Metric) -> Result<f64> {
    check_same(a.leaves(), b.leaves())?;
    Ok(match metric {
        Metric::L1 => {
            let d = d1_exact(a, b) as f64;
            d * d
        }
        Metric::L2 => d2_squared_exact(a, b) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremes_at_five() {
        let unb = FMatrix::unbalanced(5);
        let bal = FMatrix::balanced(5);
        assert_eq!(d_shape(&unb, &bal, Metric::L1).unwrap(), 3.0);
        assert_eq!(d_shape(&unb, &bal, Metric::L2).unwrap(), 3f64.sqrt());
        assert_eq!(d_shape(&bal, &bal, Metric::L2).unwrap(), 0.0);
        assert_eq!(d_shape_squared(&unb, &bal, Metric::L2).unwrap(), 3.0);
        assert_eq!(d_shape_squared(&unb, &bal, Metric::L1).unwrap(), 9.0);
    }

    #[test]
    fn mismatch() {
        let err = d_shape(&FMatrix::unbalanced(4), &FMatrix::unbalanced(5), Metric::L1);
        assert_eq!(err, Err(Error::DimensionMismatch { left: 4, right: 5 }));
    }

    #[test]
    fn metric_parsing() {
        assert_eq!("d1".parse::<Metric>().unwrap(), Metric::L1);
        assert_eq!("d2".parse::<Metric>().unwrap(), Metric::L2);
        assert!("d3".parse::<Metric>().is_err());
    }
}
