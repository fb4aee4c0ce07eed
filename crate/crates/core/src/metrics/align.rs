//! Heterochronous genealogies and their alignment to a common event grid.
//!
//! A heterochronous genealogy is a sequence of coalescent and sampling
//! events. Its extended F-matrix has one row and column per inter-event
//! interval; `F[i][j]` counts branches alive in interval `j` that are still
//! alive in interval `i`, and `W[i][j] = u[j] - u[i+1]` as in the
//! isochronous case.
//!
//! To compare trees with different sampling patterns, all coalescent events
//! are put at the same positions and, between consecutive coalescences,
//! every tree is padded with artificial sampling events (carrying no
//! samples) up to the largest count in the set. An artificial event is placed
//! right after the preceding coalescence and takes the time of the next real
//! event, so it opens a zero-length interval; that interval's row and column
//! are zero. Deleting them gives back the unaligned matrices.

use crate::error::{Error, Result};
use crate::metrics::genealogy::{check_times, RankedGenealogy};
use crate::metrics::{check_same, Metric};
use crate::shape::fmatrix::{tri_index, tri_len};
use crate::shape::HeteroShapeCode;

/// A heterochronous ranked genealogy: a hetero code plus the time (before
/// present) of every node in creation order. Consecutive leaves with equal
/// times form one sampling event.
#[derive(Debug, Clone, PartialEq)]
pub struct HeteroGenealogy {
    code: HeteroShapeCode,
    times: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Event {
    Coalescent,
    /// A sampling event with its number of new leaves (0 for artificial).
    Sampling(usize),
}

/// Event sequence of one tree with branches expressed as `(birth, end)`
/// event indices (1-based, root event = 1).
#[derive(Debug, Clone)]
struct Layout {
    events: Vec<Event>,
    times: Vec<f64>,
    branches: Vec<(usize, usize)>,
    label_event: Vec<usize>,
    node_event: Vec<usize>,
}

impl HeteroGenealogy {
    pub fn new(code: HeteroShapeCode, times: Vec<f64>) -> Result<Self> {
        if times.len() != code.t().len() {
            return Err(Error::InvalidTimes(format!(
                "{} times given for a code of length {}",
                times.len(),
                code.t().len()
            )));
        }
        check_times(&times)?;
        if *times.last().unwrap() != 0.0 {
            return Err(Error::InvalidTimes("the most recent sampling event must be at time 0".into()));
        }
        Ok(Self { code, times })
    }

    /// The isochronous genealogy with all leaves sampled at time 0.
    pub fn from_isochronous(g: &RankedGenealogy) -> Self {
        let code = HeteroShapeCode::from_isochronous(g.code());
        let mut times = g.times().to_vec();
        times.resize(code.t().len(), 0.0);
        Self { code, times }
    }

    pub fn leaves(&self) -> usize {
        self.code.leaves()
    }

    pub fn code(&self) -> &HeteroShapeCode {
        &self.code
    }

    /// Per-node times in creation order.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Times of the coalescent events, root first.
    pub fn coalescent_times(&self) -> Vec<f64> {
        self.times.iter().zip(self.code.sigma()).filter(|(_, &s)| s).map(|(&t, _)| t).collect()
    }

    /// Merged events in order (root first) with their times.
    pub fn events(&self) -> Vec<(Event, f64)> {
        let l = self.layout();
        l.events.into_iter().zip(l.times).collect()
    }

    /// Number of samples in each sampling event, oldest first.
    pub fn samples_per_event(&self) -> Vec<usize> {
        self.layout()
            .events
            .into_iter()
            .filter_map(|e| match e {
                Event::Sampling(k) => Some(k),
                Event::Coalescent => None,
            })
            .collect()
    }

    fn layout(&self) -> Layout {
        let t = self.code.t();
        let sigma = self.code.sigma();
        let mut events = Vec::new();
        let mut times = Vec::new();
        let mut event_of = Vec::with_capacity(t.len());
        // event index of each internal node, by label
        let mut coal_event = vec![0usize; self.leaves() + 1];
        let mut label = 1usize;
        for (&s, &time) in sigma.iter().zip(&self.times) {
            if s {
                events.push(Event::Coalescent);
                times.push(time);
                label += 1;
                coal_event[label] = events.len();
            } else {
                let merge = matches!(events.last(), Some(Event::Sampling(_))) && times.last() == Some(&time);
                if let (true, Some(Event::Sampling(k))) = (merge, events.last_mut()) {
                    *k += 1;
                } else {
                    events.push(Event::Sampling(1));
                    times.push(time);
                }
            }
            event_of.push(events.len());
        }
        let branches = (1..t.len()).map(|p| (coal_event[t[p] as usize], event_of[p])).collect();
        Layout { events, times, branches, label_event: coal_event, node_event: event_of }
    }

    /// Event index of each internal node (by label) and of each node (by
    /// position); these depend only on `sigma` and the times.
    pub(crate) fn event_indices(&self) -> (Vec<usize>, Vec<usize>) {
        let l = self.layout();
        (l.label_event, l.node_event)
    }

    /// Extended F and W matrices on this tree's own event grid.
    pub fn extended(&self) -> AlignedMatrix {
        let l = self.layout();
        AlignedMatrix::build(&l.times, &l.branches, &vec![false; l.events.len()])
    }
}

/// Extended F and W on an aligned event grid. `artificial[a - 1]` marks the
/// zero-length interval opened by an artificial event at index `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedMatrix {
    dim: usize,
    f: Vec<u32>,
    w: Vec<f64>,
    artificial: Vec<bool>,
}

impl AlignedMatrix {
    fn build(times: &[f64], branches: &[(usize, usize)], artificial_event: &[bool]) -> Self {
        let dim = times.len() - 1;
        let mut f = vec![0u32; tri_len(dim)];
        for &(birth, end) in branches {
            for j in birth..end {
                for i in j..end {
                    f[tri_index(i, j)] += 1;
                }
            }
        }
        let mut w = Vec::with_capacity(tri_len(dim));
        for i in 1..=dim {
            for j in 1..=i {
                w.push(times[j - 1] - times[i]);
            }
        }
        let artificial: Vec<bool> = artificial_event[..dim].to_vec();
        for i in 1..=dim {
            for j in 1..=i {
                if artificial[i - 1] || artificial[j - 1] {
                    let k = tri_index(i, j);
                    f[k] = 0;
                    w[k] = 0.0;
                }
            }
        }
        Self { dim, f, w, artificial }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn f(&self, i: usize, j: usize) -> u32 {
        self.f[tri_index(i, j)]
    }

    pub fn w(&self, i: usize, j: usize) -> f64 {
        self.w[tri_index(i, j)]
    }

    pub fn artificial(&self) -> &[bool] {
        &self.artificial
    }

    /// Flattened `F * W`.
    pub fn weighted(&self) -> Vec<f64> {
        self.f.iter().zip(&self.w).map(|(&f, &w)| f as f64 * w).collect()
    }

    /// Drops the rows and columns of artificial intervals, returning
    /// row-major `(F, W)`.
    pub fn reduced(&self) -> (Vec<Vec<u32>>, Vec<Vec<f64>>) {
        let keep: Vec<usize> = (1..=self.dim).filter(|&i| !self.artificial[i - 1]).collect();
        let mut fr = Vec::new();
        let mut wr = Vec::new();
        for (a, &i) in keep.iter().enumerate() {
            fr.push(keep[..=a].iter().map(|&j| self.f(i, j)).collect());
            wr.push(keep[..=a].iter().map(|&j| self.w(i, j)).collect());
        }
        (fr, wr)
    }
}

/// Aligns all trees at once and returns their extended matrices on the
/// common grid, in input order.
pub fn align_heterochronous(trees: &[HeteroGenealogy]) -> Result<Vec<AlignedMatrix>> {
    let Some(first) = trees.first() else {
        return Ok(Vec::new());
    };
    let n = first.leaves();
    for t in trees {
        check_same(n, t.leaves())?;
    }
    let layouts: Vec<Layout> = trees.iter().map(HeteroGenealogy::layout).collect();
    let counts: Vec<Vec<usize>> = layouts.iter().map(|l| block_counts(&l.events, n)).collect();
    let max: Vec<usize> = (0..n - 1).map(|k| counts.iter().map(|c| c[k]).max().unwrap()).collect();
    Ok(layouts.iter().zip(&counts).map(|(l, c)| pad(l, c, &max)).collect())
}

/// Number of sampling events after each coalescence (before the next one).
fn block_counts(events: &[Event], n: usize) -> Vec<usize> {
    let mut out = vec![0usize; n - 1];
    let mut k = 0usize;
    for e in events {
        match e {
            Event::Coalescent => k += 1,
            Event::Sampling(_) => out[k - 1] += 1,
        }
    }
    out
}

fn pad(l: &Layout, counts: &[usize], max: &[usize]) -> AlignedMatrix {
    let mut map = vec![0usize; l.events.len() + 1];
    let mut times = Vec::new();
    let mut artificial = Vec::new();
    let mut block = 0usize;
    for (e, event) in l.events.iter().enumerate() {
        times.push(l.times[e]);
        artificial.push(false);
        map[e + 1] = times.len();
        if *event == Event::Coalescent {
            let next_time = l.times[e + 1];
            for _ in counts[block]..max[block] {
                times.push(next_time);
                artificial.push(true);
            }
            block += 1;
        }
    }
    let branches: Vec<(usize, usize)> = l.branches.iter().map(|&(b, e)| (map[b], map[e])).collect();
    AlignedMatrix::build(&times, &branches, &artificial)
}

/// Lp distance between two matrices from the same alignment.
pub fn d_aligned(a: &AlignedMatrix, b: &AlignedMatrix, metric: Metric) -> Result<f64> {
    check_same(a.dim, b.dim)?;
    let (x, y) = (a.weighted(), b.weighted());
    Ok(metric.from_diffs(x.iter().zip(&y).map(|(p, q)| p - q)))
}

/// Distance between two heterochronous genealogies aligned as a pair.
pub fn d_hetero(a: &HeteroGenealogy, b: &HeteroGenealogy, metric: Metric) -> Result<f64> {
    let aligned = align_heterochronous(&[a.clone(), b.clone()])?;
    d_aligned(&aligned[0], &aligned[1], metric)
}
