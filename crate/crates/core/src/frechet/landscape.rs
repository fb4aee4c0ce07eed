//! Energy landscapes for annealing over isochronous and heterochronous codes.

use rand::Rng;

use crate::frechet::anneal::Landscape;
use crate::frechet::proposal::{parent_caps, propose_hetero_move, propose_iso_move};
use crate::frechet::target::Objective;
use crate::shape::fmatrix::tri_index;
use crate::shape::{FMatrix, RankedShapeCode};

#[derive(Debug, Clone, PartialEq)]
pub struct IsoState {
    pub(crate) code: Vec<u32>,
    pub(crate) f: Vec<u16>,
    /// d1 to each support point (d1 objective only).
    pub(crate) d1: Vec<u64>,
}

impl IsoState {
    pub fn code(&self) -> RankedShapeCode {
        RankedShapeCode::from_vec_unchecked(self.code.clone())
    }

    pub fn fmatrix(&self) -> FMatrix {
        FMatrix::from_flat_unchecked(self.code.len() + 1, self.f.clone())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IsoMove {
    pos: usize,
    to: u32,
}

/// Isochronous landscape: changing `t_i` from `a` to `b` shifts the
/// prefix sums of every row `r >= i`, by `+1` on columns `a-1..=b-2` when
/// `a < b` and by `-1` on columns `b-1..=a-2` when `a > b`.
pub struct IsoLandscape<'a> {
    objective: &'a Objective,
    n: usize,
}

impl<'a> IsoLandscape<'a> {
    pub fn new(objective: &'a Objective) -> Self {
        Self { objective, n: objective.leaves() }
    }

    pub fn state(&self, code: &RankedShapeCode) -> IsoState {
        let f = code.to_fmatrix();
        let d1 = match self.objective {
            Objective::L2(_) => Vec::new(),
            Objective::L1 { support, .. } => support.iter().map(|y| crate::metrics::d1_exact(&f, y)).collect(),
        };
        IsoState { code: code.as_slice().to_vec(), f: f.entries().to_vec(), d1 }
    }

    /// Flat indices touched by a move and the common sign of the change.
    fn changes(&self, state: &IsoState, mv: &IsoMove) -> (impl Iterator<Item = usize> + '_, i32) {
        let i = mv.pos + 1;
        let (a, b) = (state.code[mv.pos] as usize, mv.to as usize);
        let (lo, hi, sign) = if a < b { (a - 1, b - 2, 1) } else { (b - 1, a - 2, -1) };
        let rows = i..self.n;
        (rows.flat_map(move |r| (lo..=hi).map(move |c| tri_index(r, c))), sign)
    }
}

impl Landscape for IsoLandscape<'_> {
    type State = IsoState;
    type Move = IsoMove;

    fn energy(&self, state: &IsoState) -> f64 {
        self.objective.energy(&state.fmatrix())
    }

    fn propose<R: Rng>(&self, state: &IsoState, rng: &mut R) -> Option<IsoMove> {
        propose_iso_move(&state.code, rng).map(|(pos, to)| IsoMove { pos, to })
    }

    fn delta(&self, state: &IsoState, mv: &IsoMove) -> f64 {
        let (idx, s) = self.changes(state, mv);
        match self.objective {
            Objective::L2(target) => {
                let m = target.entries();
                let s = s as f64;
                idx.map(|k| s * (2.0 * (state.f[k] as f64 - m[k]) + s)).sum()
            }
            Objective::L1 { support, weights } => {
                let idx: Vec<usize> = idx.collect();
                support
                    .iter()
                    .zip(weights)
                    .zip(&state.d1)
                    .map(|((y, w), &d)| {
                        let new = shifted_d1(d, &idx, s, &state.f, y.entries());
                        w * ((new * new) as f64 - (d * d) as f64)
                    })
                    .sum()
            }
        }
    }

    fn apply(&self, state: &mut IsoState, mv: &IsoMove) {
        let (idx, s) = self.changes(state, mv);
        let idx: Vec<usize> = idx.collect();
        if let Objective::L1 { support, .. } = self.objective {
            for (y, d) in support.iter().zip(state.d1.iter_mut()) {
                *d = shifted_d1(*d, &idx, s, &state.f, y.entries());
            }
        }
        for k in idx {
            state.f[k] = (state.f[k] as i32 + s) as u16;
        }
        state.code[mv.pos] = mv.to;
    }

    fn precedes(&self, a: &IsoState, b: &IsoState) -> bool {
        a.f > b.f
    }
}

fn shifted_d1(d: u64, idx: &[usize], s: i32, f: &[u16], y: &[u16]) -> u64 {
    let mut d = d as i64;
    for &k in idx {
        let (x, y) = (f[k] as i64, y[k] as i64);
        d += (x + s as i64 - y).abs() - (x - y).abs();
    }
    d as u64
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeteroState {
    pub(crate) t: Vec<u32>,
    pub(crate) f: Vec<i32>,
}

impl HeteroState {
    pub fn t(&self) -> &[u32] {
        &self.t
    }

    /// Extended F-matrix on the landscape's event grid, row-major.
    pub fn extended(&self) -> &[i32] {
        &self.f
    }
}

/// Heterochronous landscape for a fixed event sequence: energy
/// `||F - M||^2` over the extended matrices. A swap changes the parents of
/// two nodes and so the birth events of two branches.
pub struct HeteroLandscape {
    sigma: Vec<bool>,
    caps: Vec<u32>,
    /// Event index of each internal node, by label.
    label_event: Vec<usize>,
    /// Event index at which each node appears, by position.
    node_event: Vec<usize>,
    target: Vec<f64>,
}

impl HeteroLandscape {
    pub(crate) fn new(sigma: Vec<bool>, label_event: Vec<usize>, node_event: Vec<usize>, target: Vec<f64>) -> Self {
        let caps = parent_caps(&sigma);
        Self { sigma, caps, label_event, node_event, target }
    }

    pub fn sigma(&self) -> &[bool] {
        &self.sigma
    }

    pub fn state(&self, t: &[u32]) -> HeteroState {
        let mut f = vec![0i32; self.target.len()];
        for p in 1..t.len() {
            let (birth, end) = (self.label_event[t[p] as usize], self.node_event[p]);
            for j in birth..end {
                for i in j..end {
                    f[tri_index(i, j)] += 1;
                }
            }
        }
        HeteroState { t: t.to_vec(), f }
    }

    /// Entry changes from moving the birth of a branch ending at `end` from
    /// event `from` to event `to`.
    fn rebirth(&self, from: usize, to: usize, end: usize, out: &mut Vec<(usize, i32)>) {
        let (lo, hi, s) = if to < from { (to, from, 1) } else { (from, to, -1) };
        for j in lo..hi {
            for i in j..end {
                out.push((tri_index(i, j), s));
            }
        }
    }

    fn changes(&self, state: &HeteroState, (a, b): (usize, usize)) -> Vec<(usize, i32)> {
        let mut out = Vec::new();
        let (ea, eb) = (self.label_event[state.t[a] as usize], self.label_event[state.t[b] as usize]);
        self.rebirth(ea, eb, self.node_event[a], &mut out);
        self.rebirth(eb, ea, self.node_event[b], &mut out);
        out.sort_unstable_by_key(|&(k, _)| k);
        let mut merged: Vec<(usize, i32)> = Vec::with_capacity(out.len());
        for (k, s) in out {
            match merged.last_mut() {
                Some(last) if last.0 == k => last.1 += s,
                _ => merged.push((k, s)),
            }
        }
        merged.retain(|&(_, s)| s != 0);
        merged
    }
}

impl Landscape for HeteroLandscape {
    type State = HeteroState;
    type Move = (usize, usize);

    fn energy(&self, state: &HeteroState) -> f64 {
        state.f.iter().zip(&self.target).map(|(&f, m)| (f as f64 - m).powi(2)).sum()
    }

    fn propose<R: Rng>(&self, state: &HeteroState, rng: &mut R) -> Option<(usize, usize)> {
        propose_hetero_move(&state.t, &self.caps, rng)
    }

    fn delta(&self, state: &HeteroState, mv: &(usize, usize)) -> f64 {
        self.changes(state, *mv)
            .into_iter()
            .map(|(k, s)| {
                let x = state.f[k] as f64 - self.target[k];
                let s = s as f64;
                s * (2.0 * x + s)
            })
            .sum()
    }

    fn apply(&self, state: &mut HeteroState, mv: &(usize, usize)) {
        for (k, s) in self.changes(state, *mv) {
            state.f[k] += s;
        }
        state.t.swap(mv.0, mv.1);
    }

    fn precedes(&self, a: &HeteroState, b: &HeteroState) -> bool {
        (&a.f, &b.t) > (&b.f, &a.t)
    }
}
