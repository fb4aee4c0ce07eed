use std::fmt;

use crate::error::{Error, Result};
use crate::shape::code::RankedShapeCode;

/// Which defining property of a heterochronous code failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeteroProperty {
    /// `t` and `sigma` differ in length, or the length is not `2n - 1`.
    Length,
    /// `t[1] = 1` and `sigma[1] = 1`.
    Start,
    /// Exactly `n - 1` coalescent events.
    CoalescentCount,
    /// Exactly `n` sampling events.
    SamplingCount,
    /// Each of `2..=n` occurs exactly twice in `t`.
    LabelMultiplicity,
    /// `2 <= t[i] <= 1 + (ones in sigma[1..i-1])`.
    ParentRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeteroViolation {
    pub property: HeteroProperty,
    /// 1-based position (or offending label for `LabelMultiplicity`).
    pub index: usize,
}

impl fmt::Display for HeteroViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} property violated at {}", self.property, self.index)
    }
}

/// Checks the five defining properties of a heterochronous code.
pub fn validate_hetero_code(t: &[u32], sigma: &[bool]) -> std::result::Result<(), HeteroViolation> {
    let fail = |property, index| Err(HeteroViolation { property, index });
    if t.len() != sigma.len() || t.len().is_multiple_of(2) {
        return fail(HeteroProperty::Length, t.len().min(sigma.len()));
    }
    let n = t.len().div_ceil(2);
    if t[0] != 1 || !sigma[0] {
        return fail(HeteroProperty::Start, 1);
    }
    let ones = sigma.iter().filter(|&&s| s).count();
    if ones != n - 1 {
        return fail(HeteroProperty::CoalescentCount, ones);
    }
    if sigma.len() - ones != n {
        return fail(HeteroProperty::SamplingCount, sigma.len() - ones);
    }
    let mut ones_before = 1usize;
    for i in 2..=t.len() {
        let v = t[i - 1] as usize;
        if v < 2 || v > 1 + ones_before {
            return fail(HeteroProperty::ParentRange, i);
        }
        if sigma[i - 1] {
            ones_before += 1;
        }
    }
    let mut counts = vec![0usize; n + 2];
    for &v in &t[1..] {
        if (v as usize) <= n {
            counts[v as usize] += 1;
        }
    }
    if let Some(label) = (2..=n).find(|&l| counts[l] != 2) {
        return fail(HeteroProperty::LabelMultiplicity, label);
    }
    Ok(())
}

/// Ranked tree shape with leaves sampled at possibly different times: the
/// pair `(t, sigma)` lists every node in order of creation, with
/// `sigma = true` for internal nodes and `false` for leaves.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HeteroShapeCode {
    t: Vec<u32>,
    sigma: Vec<bool>,
}

impl HeteroShapeCode {
    pub fn new(t: Vec<u32>, sigma: Vec<bool>) -> Result<Self> {
        validate_hetero_code(&t, &sigma).map_err(Error::InvalidHeteroCode)?;
        Ok(Self { t, sigma })
    }

    pub(crate) fn from_parts_unchecked(t: Vec<u32>, sigma: Vec<bool>) -> Self {
        debug_assert!(validate_hetero_code(&t, &sigma).is_ok());
        Self { t, sigma }
    }

    /// Parses the digit-string form, e.g. `("123442365567788", "111100101100000")`.
    /// Only usable when every label is a single digit.
    pub fn from_digits(t: &str, sigma: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidParameter(m.to_string());
        let t = t
            .chars()
            .map(|c| c.to_digit(10).ok_or_else(|| bad("non-digit in t")))
            .collect::<Result<Vec<_>>>()?;
        let sigma = sigma
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(bad("sigma must be a 0/1 string")),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(t, sigma)
    }

    /// The heterochronous caterpillar for a given event pattern: internal
    /// parents `(1, 2, ..., n-1)`, leaf parents `(2, 3, ..., n, n)`.
    pub fn caterpillar(sigma: Vec<bool>) -> Result<Self> {
        let n = sigma.len().div_ceil(2);
        let mut internal = 1u32..;
        let mut leaf = (2..=n as u32).chain(std::iter::once(n as u32));
        let t = sigma
            .iter()
            .map(|&s| if s { internal.next().unwrap() } else { leaf.next().unwrap_or(0) })
            .collect();
        Self::new(t, sigma)
    }

    pub fn leaves(&self) -> usize {
        self.t.len().div_ceil(2)
    }

    pub fn t(&self) -> &[u32] {
        &self.t
    }

    pub fn sigma(&self) -> &[bool] {
        &self.sigma
    }

    /// `(t[i] : sigma[i] = 1)`, the ranked shape of the coalescent events.
    pub fn subcode(&self) -> RankedShapeCode {
        let t = self.t.iter().zip(&self.sigma).filter(|(_, &s)| s).map(|(&v, _)| v).collect();
        RankedShapeCode::from_vec_unchecked(t)
    }

    /// Swaps two positions, returning the result only if still valid.
    pub fn swapped(&self, i: usize, j: usize) -> Option<Self> {
        let mut t = self.t.clone();
        t.swap(i, j);
        validate_hetero_code(&t, &self.sigma).ok()?;
        Some(Self { t, sigma: self.sigma.clone() })
    }

    /// Embeds an isochronous code: all leaves follow the last coalescence,
    /// sorted by parent label.
    pub fn from_isochronous(code: &RankedShapeCode) -> Self {
        let n = code.leaves();
        let mut t = code.as_slice().to_vec();
        let kids = code.internal_children();
        let mut leaves = Vec::with_capacity(n);
        for (k, &c) in kids.iter().enumerate() {
            for _ in c..2 {
                leaves.push(k as u32 + 2);
            }
        }
        t.extend(leaves);
        let mut sigma = vec![true; n - 1];
        sigma.extend(std::iter::repeat_n(false, n));
        Self::from_parts_unchecked(t, sigma)
    }
}

impl fmt::Debug for HeteroShapeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(t: {:?}, sigma: ", self.t)?;
        for &s in &self.sigma {
            f.write_str(if s { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_validates() {
        let h = HeteroShapeCode::from_digits("123442365567788", "111100101100000").unwrap();
        assert_eq!(h.leaves(), 8);
        assert_eq!(h.subcode().as_slice(), &[1, 2, 3, 4, 3, 5, 5]);
    }

    #[test]
    fn property_violations() {
        // one coalescent event too few
        let t = vec![1, 2, 2, 3, 3];
        let sigma = vec![true, false, false, false, false];
        let err = validate_hetero_code(&t, &sigma).unwrap_err();
        assert_eq!(err.property, HeteroProperty::CoalescentCount);

        // label 3 three times
        let t = vec![1, 2, 3, 3, 3, 2, 4];
        let sigma = vec![true, true, true, false, false, false, false];
        assert_eq!(
            validate_hetero_code(&t, &sigma).unwrap_err().property,
            HeteroProperty::LabelMultiplicity
        );

        let err = validate_hetero_code(&[1, 2, 2], &[true, false]).unwrap_err();
        assert_eq!(err.property, HeteroProperty::Length);

        let err = validate_hetero_code(&[1, 3, 2, 2, 3], &[true, true, false, false, false]);
        assert_eq!(err.unwrap_err().property, HeteroProperty::ParentRange);
    }

    #[test]
    fn isochronous_embedding() {
        let code = RankedShapeCode::new(vec![1, 2, 2]).unwrap();
        let h = HeteroShapeCode::from_isochronous(&code);
        assert_eq!(h.t(), &[1, 2, 2, 3, 3, 4, 4]);
        assert_eq!(h.subcode(), code);
    }

    #[test]
    fn caterpillar_for_pattern() {
        let sigma: Vec<bool> = "1101000".chars().map(|c| c == '1').collect();
        let h = HeteroShapeCode::caterpillar(sigma).unwrap();
        assert_eq!(h.t(), &[1, 2, 2, 3, 3, 4, 4]);
    }
}
