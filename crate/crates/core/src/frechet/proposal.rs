//! Proposal chains on functional codes.
//!
//! Isochronous: pick a position `i` in `2..=n-1` uniformly and redraw `t_i`
//! uniformly from the values in `2..=i` that occur at most once elsewhere
//! (the current value is always allowed, so self-moves happen).
//!
//! Heterochronous, with `sigma` fixed: pick two distinct positions in
//! `2..=2n-1` and swap their entries, rejecting the move if the result is
//! not a valid code.

use std::collections::BTreeMap;

use rand::Rng;

use crate::shape::{validate_hetero_code, HeteroShapeCode, RankedShapeCode};

/// Values allowed at 0-based position `p` given the rest of `t`.
pub(crate) fn allowed_values(t: &[u32], p: usize) -> Vec<u32> {
    let i = p as u32 + 1;
    let mut count = vec![0u8; t.len() + 2];
    for (k, &v) in t.iter().enumerate() {
        if k != p {
            count[v as usize] += 1;
        }
    }
    (2..=i).filter(|&v| count[v as usize] < 2).collect()
}

/// One isochronous proposal as `(position, new value)` on the 0-based code,
/// or `None` for a self-move.
pub(crate) fn propose_iso_move<R: Rng + ?Sized>(t: &[u32], rng: &mut R) -> Option<(usize, u32)> {
    if t.len() < 2 {
        return None;
    }
    let p = rng.random_range(1..t.len());
    let allowed = allowed_values(t, p);
    let v = allowed[rng.random_range(0..allowed.len())];
    (v != t[p]).then_some((p, v))
}

/// Draws one step of the isochronous chain.
pub fn propose_iso<R: Rng + ?Sized>(code: &RankedShapeCode, rng: &mut R) -> RankedShapeCode {
    let mut t = code.as_slice().to_vec();
    if let Some((p, v)) = propose_iso_move(&t, rng) {
        t[p] = v;
    }
    RankedShapeCode::from_vec_unchecked(t)
}

/// Exact transition probabilities of the isochronous chain from `code`,
/// including the self-move.
pub fn iso_kernel(code: &RankedShapeCode) -> Vec<(RankedShapeCode, f64)> {
    let t = code.as_slice();
    let mut out: BTreeMap<RankedShapeCode, f64> = BTreeMap::new();
    if t.len() < 2 {
        out.insert(code.clone(), 1.0);
    } else {
        let positions = (t.len() - 1) as f64;
        for p in 1..t.len() {
            let allowed = allowed_values(t, p);
            for &v in &allowed {
                let mut next = t.to_vec();
                next[p] = v;
                *out.entry(RankedShapeCode::from_vec_unchecked(next)).or_default() += 1.0 / (positions * allowed.len() as f64);
            }
        }
    }
    out.into_iter().collect()
}

/// Largest label usable as a parent at each 0-based position:
/// `1 + (number of internal nodes created before it)`.
pub(crate) fn parent_caps(sigma: &[bool]) -> Vec<u32> {
    let mut caps = Vec::with_capacity(sigma.len());
    let mut ones = 0u32;
    for &s in sigma {
        caps.push(1 + ones);
        ones += s as u32;
    }
    caps
}

/// One heterochronous proposal as a pair of 0-based positions, or `None`
/// for a self-move or a rejected swap.
pub(crate) fn propose_hetero_move<R: Rng + ?Sized>(t: &[u32], caps: &[u32], rng: &mut R) -> Option<(usize, usize)> {
    let len = t.len();
    if len < 3 {
        return None;
    }
    let i = rng.random_range(1..len);
    let mut j = rng.random_range(1..len - 1);
    if j >= i {
        j += 1;
    }
    if t[i] == t[j] || t[j] > caps[i] || t[i] > caps[j] {
        return None;
    }
    Some((i, j))
}

/// Draws one step of the heterochronous chain.
pub fn propose_hetero<R: Rng + ?Sized>(code: &HeteroShapeCode, rng: &mut R) -> HeteroShapeCode {
    let caps = parent_caps(code.sigma());
    match propose_hetero_move(code.t(), &caps, rng) {
        Some((i, j)) => {
            let mut t = code.t().to_vec();
            t.swap(i, j);
            HeteroShapeCode::from_parts_unchecked(t, code.sigma().to_vec())
        }
        None => code.clone(),
    }
}

/// Exact transition probabilities of the heterochronous chain from `code`.
/// Validity is checked with the full code validator, independently of the
/// shortcut used by the sampler.
pub fn hetero_kernel(code: &HeteroShapeCode) -> Vec<(HeteroShapeCode, f64)> {
    let t = code.t();
    let len = t.len();
    let mut out: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    if len < 3 {
        out.insert(t.to_vec(), 1.0);
    } else {
        let pairs = ((len - 1) * (len - 2)) as f64;
        for i in 1..len {
            for j in 1..len {
                if i == j {
                    continue;
                }
                let mut next = t.to_vec();
                next.swap(i, j);
                if validate_hetero_code(&next, code.sigma()).is_err() {
                    next = t.to_vec();
                }
                *out.entry(next).or_default() += 1.0 / pairs;
            }
        }
    }
    out.into_iter()
        .map(|(t, p)| (HeteroShapeCode::from_parts_unchecked(t, code.sigma().to_vec()), p))
        .collect()
}
