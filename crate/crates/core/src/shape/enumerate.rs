use crate::error::{Error, Result};
use crate::shape::fmatrix::{tri_index, tri_len, FMatrix};

/// Largest `n` enumerated unless the caller raises the cap.
pub const DEFAULT_ENUMERATION_CAP: usize = 12;

/// All ranked tree shapes with `n` leaves, in canonical order.
pub fn enumerate_shapes(n: usize) -> Result<Vec<FMatrix>> {
    enumerate_shapes_capped(n, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_shapes_capped(n: usize, cap: usize) -> Result<Vec<FMatrix>> {
    let mut out = Vec::new();
    for_each_shape_capped(n, cap, |f| out.push(FMatrix::from_flat_unchecked(n, f.to_vec())))?;
    Ok(out)
}

/// Visits the flat entries of every shape with `n` leaves without
/// allocating a matrix per shape.
pub fn for_each_shape<F: FnMut(&[u16])>(n: usize, visit: F) -> Result<()> {
    for_each_shape_capped(n, DEFAULT_ENUMERATION_CAP, visit)
}

pub fn for_each_shape_capped<F: FnMut(&[u16])>(n: usize, cap: usize, mut visit: F) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    if n > cap {
        return Err(Error::CapacityExceeded { n, cap });
    }
    let dim = n - 1;
    let mut buf = vec![0u16; tri_len(dim)];
    fill(&mut buf, dim, 1, 1, &mut visit);
    Ok(())
}

/// Depth-first over entries in row-major order; each entry ranges over the
/// interval allowed by the entries above and to its left, largest first.
fn fill<F: FnMut(&[u16])>(buf: &mut [u16], dim: usize, i: usize, j: usize, visit: &mut F) {
    if i > dim {
        visit(buf);
        return;
    }
    let (ni, nj) = if j == i { (i + 1, 1) } else { (i, j + 1) };
    let (lo, hi) = bounds(buf, i, j);
    let idx = tri_index(i, j);
    let mut v = hi;
    while v >= lo {
        buf[idx] = v as u16;
        fill(buf, dim, ni, nj, visit);
        if v == 0 {
            break;
        }
        v -= 1;
    }
}

fn bounds(buf: &[u16], i: usize, j: usize) -> (i32, i32) {
    let at = |r: usize, c: usize| buf[tri_index(r, c)] as i32;
    if j == i {
        let v = i as i32 + 1;
        (v, v)
    } else if j + 1 == i {
        (j as i32, j as i32)
    } else if j == 1 {
        let above = at(i - 1, 1);
        ((above - 1).max(0), above)
    } else {
        let left = at(i, j - 1);
        let above = at(i - 1, j);
        let inc = left + above - at(i - 1, j - 1);
        let lo = left.max(above - 1).max(inc - 1);
        let hi = above.min(inc);
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::fmatrix::validate_fmatrix;

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_shapes(2).unwrap().len(), 1);
        assert_eq!(enumerate_shapes(5).unwrap().len(), 5);
        assert_eq!(enumerate_shapes(8).unwrap().len(), 272);
    }

    #[test]
    fn first_is_caterpillar_last_is_balanced() {
        let all = enumerate_shapes(7).unwrap();
        assert_eq!(all[0], FMatrix::unbalanced(7));
        assert_eq!(*all.last().unwrap(), FMatrix::balanced(7));
        assert!(all.windows(2).all(|w| w[0].canonical_cmp(&w[1]).is_lt()));
        assert!(all.iter().all(|f| validate_fmatrix(&f.to_rows()).is_ok()));
    }

    #[test]
    fn cap_is_enforced() {
        assert_eq!(enumerate_shapes(13), Err(Error::CapacityExceeded { n: 13, cap: 12 }));
        assert!(enumerate_shapes(1).is_err());
    }
}
