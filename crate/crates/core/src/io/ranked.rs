//! Conversion between labelled Newick trees and ranked genealogies.
//!
//! Node heights come from branch lengths (height = deepest tip depth minus
//! depth), or, when every tip label ends in `|YYYY-MM-DD`, from the tip
//! dates, with each internal height the largest child height plus branch
//! length.

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::io::newick::{LabelledTree, Node};
use crate::metrics::{HeteroGenealogy, RankedGenealogy};
use crate::shape::{HeteroShapeCode, RankedShapeCode};

const DAYS_PER_YEAR: f64 = 365.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankOptions {
    /// Heights closer than `tolerance * tree height` are considered equal.
    pub tolerance: f64,
    /// Separator before a tip date suffix.
    pub date_delimiter: char,
}

impl Default for RankOptions {
    fn default() -> Self {
        Self { tolerance: 1e-6, date_delimiter: '|' }
    }
}

/// A tree converted to a ranked genealogy.
#[derive(Debug, Clone, PartialEq)]
pub enum Ranked {
    Isochronous(RankedGenealogy),
    Heterochronous(HeteroGenealogy),
}

impl Ranked {
    pub fn leaves(&self) -> usize {
        match self {
            Ranked::Isochronous(g) => g.leaves(),
            Ranked::Heterochronous(g) => g.leaves(),
        }
    }

    pub fn into_hetero(self) -> HeteroGenealogy {
        match self {
            Ranked::Isochronous(g) => HeteroGenealogy::from_isochronous(&g),
            Ranked::Heterochronous(g) => g,
        }
    }
}

fn tip_date(label: &str, delimiter: char) -> Option<NaiveDate> {
    let (_, suffix) = label.rsplit_once(delimiter)?;
    NaiveDate::parse_from_str(suffix.trim(), "%Y-%m-%d").ok()
}

fn length_of(node: &Node) -> Result<f64> {
    match node.length {
        Some(l) if l >= 0.0 && l.is_finite() => Ok(l),
        Some(l) => Err(Error::InvalidTimes(format!("invalid branch length {l}"))),
        None => Err(Error::InvalidTimes(format!("missing branch length above '{}'", node.label))),
    }
}

/// Height above the most recent tip of every node.
fn heights(tree: &LabelledTree, opts: &RankOptions) -> Result<Vec<f64>> {
    let nodes = tree.nodes();
    let order = tree.preorder();
    let leaves: Vec<usize> = order.iter().copied().filter(|&i| tree.is_leaf(i)).collect();
    let dates: Vec<Option<NaiveDate>> =
        leaves.iter().map(|&i| tip_date(&nodes[i].label, opts.date_delimiter)).collect();
    let mut h = vec![0.0; nodes.len()];
    if dates.iter().any(Option::is_some) {
        if let Some(k) = dates.iter().position(Option::is_none) {
            return Err(Error::InvalidTimes(format!("tip '{}' has no date but other tips do", nodes[leaves[k]].label)));
        }
        let latest = dates.iter().flatten().max().copied().unwrap();
        for (&leaf, date) in leaves.iter().zip(&dates) {
            h[leaf] = (latest - date.unwrap()).num_days() as f64 / DAYS_PER_YEAR;
        }
        for &id in order.iter().rev() {
            if !tree.is_leaf(id) {
                let mut best = f64::NEG_INFINITY;
                for &c in &nodes[id].children {
                    best = best.max(h[c] + length_of(&nodes[c])?);
                }
                h[id] = best;
            }
        }
    } else {
        let mut depth = vec![0.0; nodes.len()];
        for &id in &order {
            for &c in &nodes[id].children {
                depth[c] = depth[id] + length_of(&nodes[c])?;
            }
        }
        let deepest = leaves.iter().map(|&i| depth[i]).fold(0.0, f64::max);
        for (hi, d) in h.iter_mut().zip(&depth) {
            *hi = (deepest - d).max(0.0);
        }
    }
    Ok(h)
}

/// Ranks a binary tree. Internal nodes are ordered by decreasing height;
/// two internal heights within tolerance are an error. Tips within
/// tolerance of each other form one sampling event, placed after any
/// coalescence at the same height and sorted by parent label. The result
/// is isochronous when all tips fall in one event at height zero.
pub fn to_ranked(tree: &LabelledTree, opts: &RankOptions) -> Result<Ranked> {
    let nodes = tree.nodes();
    if nodes.len() < 3 {
        return Err(Error::InvalidParameter("a tree needs at least two leaves".into()));
    }
    let h = heights(tree, opts)?;
    let height = h[tree.root()];
    let tol = opts.tolerance * if height > 0.0 { height } else { 1.0 };

    let mut internal: Vec<usize> = (0..nodes.len()).filter(|&i| !tree.is_leaf(i)).collect();
    internal.sort_by(|&a, &b| h[b].total_cmp(&h[a]));
    for w in internal.windows(2) {
        if h[w[0]] - h[w[1]] <= tol {
            return Err(Error::AmbiguousRanking(h[w[0]], h[w[1]]));
        }
    }
    let mut label = vec![0u32; nodes.len()];
    for (k, &id) in internal.iter().enumerate() {
        label[id] = k as u32 + 2;
    }
    let mut parent_label = vec![1u32; nodes.len()];
    for &id in &internal {
        for &c in &nodes[id].children {
            parent_label[c] = label[id];
        }
    }

    // cluster tips by height, most recent cluster snapped to zero
    let mut tips: Vec<usize> = (0..nodes.len()).filter(|&i| tree.is_leaf(i)).collect();
    tips.sort_by(|&a, &b| h[a].total_cmp(&h[b]));
    let mut tip_time = vec![0.0; nodes.len()];
    let mut anchor = 0.0;
    for (k, &id) in tips.iter().enumerate() {
        if k == 0 || h[id] - anchor > tol {
            anchor = if k == 0 { 0.0 } else { h[id] };
        }
        tip_time[id] = anchor;
    }

    if tips.iter().all(|&id| tip_time[id] == 0.0) {
        let code: Vec<u32> = internal.iter().map(|&id| parent_label[id]).collect();
        let times = internal.iter().map(|&id| h[id]).collect();
        return Ok(Ranked::Isochronous(RankedGenealogy::new(RankedShapeCode::new(code)?, times)?));
    }

    // (time, is_leaf, parent label) sorted into creation order
    let mut seq: Vec<(f64, bool, u32)> = internal.iter().map(|&id| (h[id], false, parent_label[id])).collect();
    seq.extend(tips.iter().map(|&id| (tip_time[id], true, parent_label[id])));
    seq.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    for k in 1..seq.len() {
        if !seq[k].1 && seq[k - 1].1 && seq[k - 1].0 - seq[k].0 <= tol {
            return Err(Error::AmbiguousRanking(seq[k - 1].0, seq[k].0));
        }
    }
    let t = seq.iter().map(|s| s.2).collect();
    let sigma = seq.iter().map(|s| !s.1).collect();
    let times = seq.iter().map(|s| s.0).collect();
    Ok(Ranked::Heterochronous(HeteroGenealogy::new(HeteroShapeCode::new(t, sigma)?, times)?))
}

/// Builds a tree from parent labels, node kinds and times in creation order;
/// internal nodes get labels `2..` in order of appearance.
fn build(parents: &[u32], internal: &[bool], times: &[f64]) -> LabelledTree {
    // node id == position; root is position 0
    let mut nodes: Vec<Node> =
        parents.iter().map(|_| Node { label: String::new(), length: None, children: Vec::new() }).collect();
    let mut position_of_label = vec![0usize; parents.len() + 2];
    let mut next = 2usize;
    for (p, &is_internal) in internal.iter().enumerate() {
        if is_internal {
            position_of_label[next] = p;
            next += 1;
        }
    }
    for p in 1..parents.len() {
        let parent = position_of_label[parents[p] as usize];
        nodes[parent].children.push(p);
        nodes[p].length = Some(times[parent] - times[p]);
    }
    LabelledTree::from_nodes(nodes)
}

/// The tree of a ranked genealogy, with blank labels.
pub fn genealogy_to_tree(g: &RankedGenealogy) -> LabelledTree {
    hetero_to_tree(&HeteroGenealogy::from_isochronous(g))
}

/// The tree of a heterochronous genealogy, with blank labels.
pub fn hetero_to_tree(g: &HeteroGenealogy) -> LabelledTree {
    build(g.code().t(), g.code().sigma(), g.times())
}

/// A ranked shape drawn with unit spacing between consecutive events.
pub fn shape_to_tree(code: &RankedShapeCode) -> LabelledTree {
    let n = code.leaves();
    let times = (1..n).rev().map(|k| k as f64).collect();
    genealogy_to_tree(&RankedGenealogy::new(code.clone(), times).expect("decreasing times"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::newick::parse_newick;

    #[test]
    fn isochronous_ranking() {
        let t = parse_newick("((a:1,b:1):2,(c:2,d:2):1);").unwrap();
        let Ranked::Isochronous(g) = to_ranked(&t, &RankOptions::default()).unwrap() else { panic!() };
        assert_eq!(g.code().as_slice(), &[1, 2, 2]);
        assert_eq!(g.times(), &[3.0, 2.0, 1.0]);
    }

    #[test]
    fn tied_internal_nodes_are_ambiguous() {
        let t = parse_newick("((a:1,b:1):1,(c:1,d:1):1);").unwrap();
        assert!(matches!(to_ranked(&t, &RankOptions::default()), Err(Error::AmbiguousRanking(..))));
    }

    #[test]
    fn round_trip() {
        let g = RankedGenealogy::new(RankedShapeCode::new(vec![1, 2, 2, 3]).unwrap(), vec![4.0, 3.0, 1.5, 0.5])
            .unwrap();
        let text = genealogy_to_tree(&g).to_newick();
        let back = to_ranked(&parse_newick(&text).unwrap(), &RankOptions::default()).unwrap();
        assert_eq!(back, Ranked::Isochronous(g));
    }

    #[test]
    fn heterochronous_round_trip() {
        let code = HeteroShapeCode::new(vec![1, 2, 3, 2, 3, 4, 4], vec![true, true, false, true, false, false, false])
            .unwrap();
        let g = HeteroGenealogy::new(code, vec![5.0, 4.0, 3.0, 2.0, 1.0, 0.0, 0.0]).unwrap();
        let text = hetero_to_tree(&g).to_newick();
        let back = to_ranked(&parse_newick(&text).unwrap(), &RankOptions::default()).unwrap();
        assert_eq!(back, Ranked::Heterochronous(g));
    }

    #[test]
    fn tip_dates() {
        let t = parse_newick("((a|2020-01-01:1,b|2021-01-01:2):1,c|2021-01-01:3);").unwrap();
        let Ranked::Heterochronous(g) = to_ranked(&t, &RankOptions::default()).unwrap() else { panic!() };
        let y = 366.0 / DAYS_PER_YEAR;
        assert_eq!(g.code().t(), &[1, 2, 3, 2, 3]);
        let expect = [y + 2.0, y + 1.0, y, 0.0, 0.0];
        assert!(g.times().iter().zip(expect).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}
