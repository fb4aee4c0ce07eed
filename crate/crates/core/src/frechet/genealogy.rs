//! Fréchet means of genealogies. Under d2 the topology and the times are
//! summarized separately: times entrywise, topology as the Fréchet mean of
//! the shape marginal.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::frechet::anneal::{anneal, tie_tolerance, Landscape, SaConfig};
use crate::frechet::landscape::{HeteroLandscape, HeteroState};
use crate::frechet::mean::{frechet_mean_exact, frechet_mean_sa};
use crate::frechet::proposal::parent_caps;
use crate::frechet::target::{Objective, TargetMatrix};
use crate::metrics::{check_same, Event, HeteroGenealogy, RankedGenealogy};
use crate::shape::{HeteroShapeCode, DEFAULT_ENUMERATION_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeSummary {
    Mean,
    Median,
}

impl TimeSummary {
    pub fn summarize(self, values: &mut [f64]) -> f64 {
        match self {
            TimeSummary::Mean => values.iter().sum::<f64>() / values.len() as f64,
            TimeSummary::Median => {
                values.sort_by(f64::total_cmp);
                let k = values.len();
                if k % 2 == 1 {
                    values[k / 2]
                } else {
                    0.5 * (values[k / 2 - 1] + values[k / 2])
                }
            }
        }
    }
}

impl FromStr for TimeSummary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(TimeSummary::Mean),
            "median" => Ok(TimeSummary::Median),
            _ => Err(Error::InvalidParameter(format!("unknown time summary '{s}' (use mean or median)"))),
        }
    }
}

impl fmt::Display for TimeSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TimeSummary::Mean => "mean",
            TimeSummary::Median => "median",
        })
    }
}

/// How the topology is searched.
#[derive(Debug, Clone, PartialEq)]
pub enum SearchMethod {
    /// Exhaustive scan, refusing `n` above the cap.
    Exact { cap: usize },
    Anneal(SaConfig),
}

impl Default for SearchMethod {
    fn default() -> Self {
        SearchMethod::Exact { cap: DEFAULT_ENUMERATION_CAP }
    }
}

/// Entrywise summary of equally long time vectors.
fn summarize_columns<'a, I>(rows: I, len: usize, how: TimeSummary) -> Vec<f64>
where
    I: Iterator<Item = &'a [f64]> + Clone,
{
    (0..len)
        .map(|k| {
            let mut col: Vec<f64> = rows.clone().map(|r| r[k]).collect();
            how.summarize(&mut col)
        })
        .collect()
}

/// Fréchet mean of isochronous genealogies under d2.
pub fn frechet_mean_genealogy(
    sample: &[RankedGenealogy],
    times: TimeSummary,
    method: &SearchMethod,
) -> Result<RankedGenealogy> {
    let Some(first) = sample.first() else {
        return Err(Error::EmptySample);
    };
    let n = first.leaves();
    for g in sample {
        check_same(n, g.leaves())?;
    }
    let shapes: Vec<_> = sample.iter().map(|g| g.fmatrix().clone()).collect();
    let objective = Objective::L2(TargetMatrix::from_sample(&shapes)?);
    let code = match method {
        SearchMethod::Exact { cap } => frechet_mean_exact(&objective, *cap, true)?.first().to_code(),
        SearchMethod::Anneal(cfg) => frechet_mean_sa(&objective, None, cfg)?.best,
    };
    let u = summarize_columns(sample.iter().map(|g| g.times()), n - 1, times);
    RankedGenealogy::new(code, u)
}

/// Event pattern of a heterochronous tree: `sigma` and the sizes of its
/// sampling events.
fn pattern(g: &HeteroGenealogy) -> (Vec<bool>, Vec<Event>) {
    let events = g.events().into_iter().map(|(e, _)| e).collect();
    (g.code().sigma().to_vec(), events)
}

/// The objective for heterochronous topologies sharing one event pattern:
/// the mean extended F-matrix of the trees with the most common pattern
/// (first seen wins ties). Returns the landscape and the indices of the
/// trees it was built from.
pub fn hetero_landscape(sample: &[HeteroGenealogy]) -> Result<(HeteroLandscape, Vec<usize>)> {
    let Some(first) = sample.first() else {
        return Err(Error::EmptySample);
    };
    for g in sample {
        check_same(first.leaves(), g.leaves())?;
    }
    let patterns: Vec<_> = sample.iter().map(pattern).collect();
    let mut best = 0usize;
    let mut best_count = 0usize;
    for (i, p) in patterns.iter().enumerate() {
        let count = patterns.iter().filter(|q| *q == p).count();
        if count > best_count {
            best = i;
            best_count = count;
        }
    }
    let members: Vec<usize> = (0..sample.len()).filter(|&i| patterns[i] == patterns[best]).collect();
    let mats: Vec<Vec<u32>> = members
        .iter()
        .map(|&i| {
            let ext = sample[i].extended();
            let d = ext.dim();
            (1..=d).flat_map(|r| (1..=r).map(move |c| (r, c))).map(|(r, c)| ext.f(r, c)).collect()
        })
        .collect();
    let len = mats[0].len();
    let m = members.len() as f64;
    let target = (0..len).map(|k| mats.iter().map(|x| x[k] as f64).sum::<f64>() / m).collect();
    let (label_event, node_event) = sample[best].event_indices();
    let land = HeteroLandscape::new(patterns[best].0.clone(), label_event, node_event, target);
    Ok((land, members))
}

/// All codes with the landscape's `sigma`, one per distinct extended
/// F-matrix.
fn enumerate_hetero(land: &HeteroLandscape) -> Vec<HeteroState> {
    let sigma = land.sigma();
    let caps = parent_caps(sigma);
    let len = sigma.len();
    let n = len.div_ceil(2);
    let mut t = vec![0u32; len];
    t[0] = 1;
    let mut count = vec![0u8; n + 1];
    let mut out: Vec<HeteroState> = Vec::new();
    fn go(
        p: usize,
        t: &mut Vec<u32>,
        count: &mut Vec<u8>,
        caps: &[u32],
        land: &HeteroLandscape,
        out: &mut Vec<HeteroState>,
    ) {
        if p == t.len() {
            if count[2..].iter().all(|&c| c == 2) {
                out.push(land.state(t));
            }
            return;
        }
        let missing: usize = count[2..].iter().map(|&c| 2 - c as usize).sum();
        if missing > t.len() - p {
            return;
        }
        for v in 2..=caps[p] {
            if count[v as usize] < 2 {
                count[v as usize] += 1;
                t[p] = v;
                go(p + 1, t, count, caps, land, out);
                count[v as usize] -= 1;
            }
        }
    }
    go(1, &mut t, &mut count, &caps, land, &mut out);
    out.sort_by(|a, b| b.f.cmp(&a.f).then_with(|| a.t.cmp(&b.t)));
    out.dedup_by(|a, b| a.f == b.f);
    out
}

/// Fréchet mean topology of heterochronous trees with the landscape's
/// fixed event pattern.
pub fn hetero_topology(land: &HeteroLandscape, method: &SearchMethod) -> Result<(HeteroShapeCode, f64)> {
    let sigma = land.sigma().to_vec();
    let n = sigma.len().div_ceil(2);
    let state = match method {
        SearchMethod::Exact { cap } => {
            if n > *cap {
                return Err(Error::CapacityExceeded { n, cap: *cap });
            }
            let all = enumerate_hetero(land);
            let energies: Vec<f64> = all.iter().map(|s| land.energy(s)).collect();
            let min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
            let k = energies.iter().position(|&e| e <= min + tie_tolerance(min)).unwrap();
            all[k].clone()
        }
        SearchMethod::Anneal(cfg) => {
            let start = HeteroShapeCode::caterpillar(sigma.clone())?;
            anneal(land, &land.state(start.t()), cfg)?.best
        }
    };
    let energy = land.energy(&state);
    Ok((HeteroShapeCode::new(state.t, sigma)?, energy))
}

/// Fréchet mean of heterochronous genealogies under d2. The topology is
/// searched with the most common event pattern fixed. When all trees share
/// that pattern every node time is summarized over the whole sample;
/// otherwise coalescent times are summarized over the whole sample and
/// sampling times over the trees with the modal pattern.
pub fn frechet_mean_hetero(
    sample: &[HeteroGenealogy],
    times: TimeSummary,
    method: &SearchMethod,
) -> Result<HeteroGenealogy> {
    let (land, members) = hetero_landscape(sample)?;
    let (code, _) = hetero_topology(&land, method)?;
    let sigma = code.sigma().to_vec();
    let coal: Vec<Vec<f64>> = sample.iter().map(|g| g.coalescent_times()).collect();
    let coal = summarize_columns(coal.iter().map(|v| v.as_slice()), sigma.iter().filter(|&&s| s).count(), times);
    let own = summarize_columns(members.iter().map(|&i| sample[i].times()), sigma.len(), times);
    let mut next_coal = coal.into_iter();
    let u: Vec<f64> = sigma.iter().zip(own).map(|(&s, t)| if s { next_coal.next().unwrap() } else { t }).collect();
    let g = HeteroGenealogy::new(code, u).map_err(|e| {
        Error::Heterogeneous(format!("summarized times do not fit the modal event pattern ({e})"))
    })?;
    if pattern(&g) != pattern(&sample[members[0]]) {
        return Err(Error::Heterogeneous("summarized times merge or split sampling events".into()));
    }
    Ok(g)
}
