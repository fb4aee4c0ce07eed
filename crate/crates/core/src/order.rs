//! Orders on ranked tree shapes, entropy and metric balls.
//!
//! The signed distance of `x` to a reference is `-d(x, ref)` when `x` is at
//! least as close to the caterpillar as to the most balanced shape, and
//! `+d(x, ref)` otherwise. The total order sorts by signed distance and
//! breaks ties with the column-major lexicographic order, in which a matrix
//! comes first when its first differing entry is larger (so the caterpillar
//! is the minimum and the most balanced shape the maximum).

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::frechet::anneal::SaConfig;
use crate::frechet::mean::{frechet_mean_exact, frechet_mean_sa};
use crate::frechet::target::{check_weights, Objective, TargetMatrix};
use crate::metrics::{check_same, d1_exact, d2_squared_exact, Metric};
use crate::shape::{FMatrix, DEFAULT_ENUMERATION_CAP};

const LEVEL_TOL: f64 = 1e-12;

/// Seed of the annealing run that stands in for the exact Kingman mean
/// above the enumeration cap.
pub const REFERENCE_SEED: u64 = 20_240_601;

/// The Kingman Fréchet mean under d2: exact up to the default enumeration
/// cap (first mean in canonical order), annealed with [`REFERENCE_SEED`]
/// above it.
pub fn kingman_reference(n: usize, parallel: bool) -> Result<FMatrix> {
    let objective = Objective::L2(TargetMatrix::kingman(n)?);
    if n <= DEFAULT_ENUMERATION_CAP {
        return Ok(frechet_mean_exact(&objective, DEFAULT_ENUMERATION_CAP, parallel)?.first().clone());
    }
    let config = SaConfig { parallel, ..SaConfig::with_seed(REFERENCE_SEED) };
    Ok(frechet_mean_sa(&objective, None, &config)?.best.to_fmatrix())
}

/// Exact representation of a distance: `d1`, or `d2^2`.
fn raw_distance(a: &FMatrix, b: &FMatrix, metric: Metric) -> u64 {
    match metric {
        Metric::L1 => d1_exact(a, b),
        Metric::L2 => d2_squared_exact(a, b),
    }
}

fn to_distance(raw: u64, metric: Metric) -> f64 {
    match metric {
        Metric::L1 => raw as f64,
        Metric::L2 => (raw as f64).sqrt(),
    }
}

/// Whether `x` is on the caterpillar side: `d(x, unb) <= d(x, bal)`.
pub fn is_unbalanced_side(x: &FMatrix, metric: Metric) -> bool {
    let n = x.leaves();
    raw_distance(x, &FMatrix::unbalanced(n), metric) <= raw_distance(x, &FMatrix::balanced(n), metric)
}

/// Signed distance as an exactly comparable key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignedKey {
    negative: bool,
    raw: u64,
    metric: Metric,
}

impl SignedKey {
    pub fn new(x: &FMatrix, reference: &FMatrix, metric: Metric) -> Result<Self> {
        check_same(x.leaves(), reference.leaves())?;
        let raw = raw_distance(x, reference, metric);
        Ok(Self { negative: raw > 0 && is_unbalanced_side(x, metric), raw, metric })
    }

    pub fn value(&self) -> f64 {
        let d = to_distance(self.raw, self.metric);
        if self.negative {
            -d
        } else {
            d
        }
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }
}

impl PartialOrd for SignedKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SignedKey {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.negative, other.negative) {
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (true, true) => other.raw.cmp(&self.raw),
            (false, false) => self.raw.cmp(&other.raw),
        }
    }
}

pub fn signed_distance(x: &FMatrix, reference: &FMatrix, metric: Metric) -> Result<f64> {
    Ok(SignedKey::new(x, reference, metric)?.value())
}

/// Column-major lexicographic order: `Less` means `a` comes first.
pub fn lex_compare(a: &FMatrix, b: &FMatrix) -> Result<Ordering> {
    check_same(a.leaves(), b.leaves())?;
    let dim = a.dim();
    for j in 1..=dim {
        for i in j..=dim {
            match a.get(i, j).cmp(&b.get(i, j)) {
                Ordering::Equal => {}
                o => return Ok(o.reverse()),
            }
        }
    }
    Ok(Ordering::Equal)
}

/// Signed distance to `reference`, then lexicographic order.
pub fn total_compare(a: &FMatrix, b: &FMatrix, reference: &FMatrix, metric: Metric) -> Result<Ordering> {
    let (ka, kb) = (SignedKey::new(a, reference, metric)?, SignedKey::new(b, reference, metric)?);
    Ok(match ka.cmp(&kb) {
        Ordering::Equal => lex_compare(a, b)?,
        o => o,
    })
}

/// Indices of `shapes` sorted by the total order (stable for duplicates).
pub fn sort_by_total_order(shapes: &[FMatrix], reference: &FMatrix, metric: Metric) -> Result<Vec<usize>> {
    let keys = shapes.iter().map(|f| SignedKey::new(f, reference, metric)).collect::<Result<Vec<_>>>()?;
    let mut idx: Vec<usize> = (0..shapes.len()).collect();
    idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then_with(|| lex_compare(&shapes[a], &shapes[b]).unwrap()));
    Ok(idx)
}

/// `-sum p ln p` of a normalized pmf.
pub fn entropy(pmf: &[f64]) -> Result<f64> {
    check_weights(pmf.len(), pmf)?;
    Ok(-pmf.iter().filter(|&&p| p > 0.0).map(|p| p * p.ln()).sum::<f64>())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallSummary {
    pub radius: f64,
    pub level: f64,
    /// Mass inside the ball.
    pub mass: f64,
    /// Indices of support points within the radius.
    pub members: Vec<usize>,
    /// Boundary representatives: minimum and maximum under the total order
    /// of the negative side, then of the positive side (duplicates dropped).
    pub boundary: Vec<usize>,
}

/// Smallest ball around `center` with mass at least `level`. The radius is
/// one of the achieved distances. Signs and the order on the boundary use
/// `center` as the reference.
pub fn credible_ball(
    support: &[FMatrix],
    weights: Option<&[f64]>,
    center: &FMatrix,
    level: f64,
    metric: Metric,
) -> Result<BallSummary> {
    if support.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(level > 0.0 && level <= 1.0) {
        return Err(Error::InvalidParameter(format!("level must be in (0, 1], got {level}")));
    }
    let uniform;
    let weights = match weights {
        Some(w) => {
            check_weights(support.len(), w)?;
            w
        }
        None => {
            uniform = vec![1.0 / support.len() as f64; support.len()];
            &uniform
        }
    };
    let raw = support
        .iter()
        .map(|y| {
            check_same(y.leaves(), center.leaves())?;
            Ok(raw_distance(y, center, metric))
        })
        .collect::<Result<Vec<u64>>>()?;
    let mut by_distance: Vec<usize> = (0..support.len()).collect();
    by_distance.sort_by_key(|&i| raw[i]);
    let mut mass = 0.0;
    let mut eps = raw[by_distance[by_distance.len() - 1]];
    let mut k = 0;
    while k < by_distance.len() {
        let d = raw[by_distance[k]];
        while k < by_distance.len() && raw[by_distance[k]] == d {
            mass += weights[by_distance[k]];
            k += 1;
        }
        if mass >= level - LEVEL_TOL {
            eps = d;
            break;
        }
    }
    let members: Vec<usize> = (0..support.len()).filter(|&i| raw[i] <= eps).collect();
    let mass = members.iter().map(|&i| weights[i]).sum();
    let on_boundary: Vec<usize> = members.iter().copied().filter(|&i| raw[i] == eps).collect();
    let mut boundary = Vec::new();
    for negative in [true, false] {
        let side: Vec<usize> = on_boundary
            .iter()
            .copied()
            .filter(|&i| if eps == 0 { negative } else { is_unbalanced_side(&support[i], metric) == negative })
            .collect();
        if side.is_empty() {
            continue;
        }
        let sub: Vec<FMatrix> = side.iter().map(|&i| support[i].clone()).collect();
        let order = sort_by_total_order(&sub, center, metric)?;
        let (lo, hi) = (side[order[0]], side[order[order.len() - 1]]);
        boundary.push(lo);
        if support[hi] != support[lo] {
            boundary.push(hi);
        }
    }
    Ok(BallSummary { radius: to_distance(eps, metric), level, mass, members, boundary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::enumerate_shapes;

    #[test]
    fn lex_extremes() {
        for n in 3..8 {
            let (unb, bal) = (FMatrix::unbalanced(n), FMatrix::balanced(n));
            for f in enumerate_shapes(n).unwrap() {
                assert_ne!(lex_compare(&unb, &f).unwrap(), Ordering::Greater);
                assert_ne!(lex_compare(&f, &bal).unwrap(), Ordering::Greater);
            }
        }
        assert_eq!(lex_compare(&FMatrix::unbalanced(5), &FMatrix::balanced(5)).unwrap(), Ordering::Less);
    }

    #[test]
    fn signed_distance_signs() {
        let n = 6;
        let r = enumerate_shapes(n).unwrap()[4].clone();
        assert!(signed_distance(&FMatrix::unbalanced(n), &r, Metric::L2).unwrap() < 0.0);
        assert!(signed_distance(&FMatrix::balanced(n), &r, Metric::L2).unwrap() > 0.0);
        assert_eq!(signed_distance(&r, &r, Metric::L1).unwrap(), 0.0);
        let o = total_compare(&FMatrix::unbalanced(n), &FMatrix::balanced(n), &r, Metric::L2).unwrap();
        assert_eq!(o, Ordering::Less);
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert!((entropy(&[0.2; 5]).unwrap() - 5f64.ln()).abs() < 1e-12);
        assert!(entropy(&[0.5, 0.4]).is_err());
    }

    #[test]
    fn point_mass_ball() {
        let c = FMatrix::balanced(5);
        let b = credible_ball(&[c.clone(), c.clone()], None, &c, 0.9, Metric::L2).unwrap();
        assert_eq!(b.radius, 0.0);
        assert_eq!(b.members, vec![0, 1]);
        assert_eq!(b.boundary, vec![0]);
    }
}
