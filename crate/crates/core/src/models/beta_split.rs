//! Blum-François beta-splitting distribution on ranked tree shapes.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Beta, Distribution};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::shape::RankedShapeCode;

/// Splitting parameter `beta` in `[-1, inf)`; `f64::INFINITY` stands for the
/// fully balanced limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSplit(f64);

impl BetaSplit {
    pub const YULE: BetaSplit = BetaSplit(0.0);

    pub fn new(beta: f64) -> Result<Self> {
        if beta.is_nan() || beta < -1.0 {
            return Err(Error::InvalidParameter(format!("beta must be >= -1, got {beta}")));
        }
        Ok(Self(beta))
    }

    pub fn infinite() -> Self {
        Self(f64::INFINITY)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `ln[B(a + beta + 1, b + beta + 1) / B(beta + 1, beta + 1)]`, with the
    /// limits at `beta = -1` and `beta = inf`.
    fn ln_split_ratio(self, a: usize, b: usize) -> f64 {
        let beta = self.0;
        if beta == -1.0 {
            let r = 0.5 * ((a == 0) as u8 + (b == 0) as u8) as f64;
            return r.ln();
        }
        if beta.is_infinite() {
            return -((a + b) as f64) * std::f64::consts::LN_2;
        }
        let x = beta + 1.0;
        let (a, b) = (a as f64, b as f64);
        ln_gamma(a + x) + ln_gamma(b + x) - ln_gamma(a + b + 2.0 * x) - 2.0 * ln_gamma(x) + ln_gamma(2.0 * x)
    }
}

impl FromStr for BetaSplit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "+inf" | "infinity" => Ok(Self::infinite()),
            _ => {
                let v: f64 = s.parse().map_err(|_| Error::InvalidParameter(format!("invalid beta '{s}'")))?;
                Self::new(v)
            }
        }
    }
}

impl fmt::Display for BetaSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Yule (Kingman) probability `2^(n-c-1) / (n-1)!` of a ranked shape.
pub fn yule_pmf(code: &RankedShapeCode) -> f64 {
    let n = code.leaves();
    let c = code.cherry_count();
    let log = (n - c - 1) as f64 * std::f64::consts::LN_2 - ln_gamma(n as f64);
    log.exp()
}

/// Log-probability of a ranked shape under the beta-splitting model.
pub fn blum_francois_ln_pmf(code: &RankedShapeCode, beta: BetaSplit) -> f64 {
    let n = code.leaves();
    let c = code.cherry_count();
    let sizes = code.subtree_sizes();
    let mut log = (n - 1 - c) as f64 * std::f64::consts::LN_2;
    for kids in code.children() {
        let size = |k: Option<u32>| k.map_or(0, |l| sizes[l as usize - 2]);
        log += beta.ln_split_ratio(size(kids[0]), size(kids[1]));
        if log == f64::NEG_INFINITY {
            break;
        }
    }
    log
}

pub fn blum_francois_pmf(code: &RankedShapeCode, beta: BetaSplit) -> f64 {
    blum_francois_ln_pmf(code, beta).exp()
}

enum Coin {
    Fair01,
    Half,
    Beta(Beta<f64>),
}

impl Coin {
    fn new(beta: BetaSplit) -> Self {
        let b = beta.value();
        if b == -1.0 {
            Coin::Fair01
        } else if b.is_infinite() {
            Coin::Half
        } else {
            Coin::Beta(Beta::new(b + 1.0, b + 1.0).expect("shape parameters are positive"))
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Coin::Fair01 => {
                if rng.random_bool(0.5) {
                    1.0
                } else {
                    0.0
                }
            }
            Coin::Half => 0.5,
            Coin::Beta(d) => d.sample(rng),
        }
    }
}

/// Draws a ranked shape: every internal node gets a Beta(beta+1, beta+1)
/// coin when created, and each new branching is routed down from the root by
/// those coins until it reaches a leaf.
pub fn sample_blum_francois<R: Rng + ?Sized>(n: usize, beta: BetaSplit, rng: &mut R) -> RankedShapeCode {
    assert!(n >= 2, "need at least two leaves");
    let coin = Coin::new(beta);
    // per internal node (index label - 2): coin, and children (Some(label) if internal)
    let mut p = Vec::with_capacity(n - 1);
    let mut kids: Vec<[Option<u32>; 2]> = Vec::with_capacity(n - 1);
    let mut t = Vec::with_capacity(n - 1);
    t.push(1u32);
    p.push(coin.draw(rng));
    kids.push([None, None]);
    for label in 3..=n as u32 {
        let mut node = 0usize;
        loop {
            let side = if rng.random::<f64>() < p[node] { 0 } else { 1 };
            match kids[node][side] {
                Some(child) => node = child as usize - 2,
                None => {
                    kids[node][side] = Some(label);
                    t.push(node as u32 + 2);
                    break;
                }
            }
        }
        p.push(coin.draw(rng));
        kids.push([None, None]);
    }
    RankedShapeCode::from_vec_unchecked(t)
}
