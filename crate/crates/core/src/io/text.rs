//! Plain-text formats.
//!
//! * F-matrix: a line `n <n>` followed by `n - 1` rows of the lower
//!   triangle, row `i` holding `i` space-separated values.
//! * Code: one ranked shape code per line as space-separated integers,
//!   optionally followed by a tab and the branching times.
//! * Heterochronous: `t: ...` and `sigma: ...` lines, optionally followed by
//!   `times: ...`.
//!
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::io::newick::parse_newick_forest;
use crate::io::ranked::{to_ranked, RankOptions, Ranked};
use crate::metrics::{HeteroGenealogy, RankedGenealogy};
use crate::shape::{FMatrix, HeteroShapeCode, RankedShapeCode};

fn join<T: ToString>(values: impl IntoIterator<Item = T>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn write_code(code: &RankedShapeCode) -> String {
    join(code.as_slice())
}

pub fn write_genealogy(g: &RankedGenealogy) -> String {
    format!("{}\t{}", write_code(g.code()), join(g.times()))
}

pub fn write_hetero(code: &HeteroShapeCode, times: Option<&[f64]>) -> String {
    let mut out = format!("t: {}\nsigma: {}\n", join(code.t()), join(code.sigma().iter().map(|&s| s as u8)));
    if let Some(times) = times {
        let _ = writeln!(out, "times: {}", join(times));
    }
    out
}

pub fn write_fmatrix(f: &FMatrix) -> String {
    let mut out = format!("n {}\n", f.leaves());
    for row in f.rows() {
        out.push_str(&join(row));
        out.push('\n');
    }
    out
}

/// Writes a real lower-triangular matrix stored row-major (`i >= j`).
pub fn write_real_matrix(n: usize, entries: &[f64]) -> String {
    let mut out = format!("n {n}\n");
    let mut k = 0;
    for i in 1..n {
        out.push_str(&join(&entries[k..k + i]));
        out.push('\n');
        k += i;
    }
    out
}

/// Non-comment lines with their 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn numbers<T: FromStr>(line: usize, text: &str) -> Result<Vec<T>> {
    text.split_whitespace()
        .map(|w| w.parse().map_err(|_| Error::Format { line, message: format!("not a number: '{w}'") }))
        .collect()
}

fn located(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Format { .. } => e,
        e => Error::Format { line, message: e.to_string() },
    }
}

/// Parses any number of F-matrix blocks.
pub fn parse_fmatrices(text: &str) -> Result<Vec<FMatrix>> {
    let mut out = Vec::new();
    let mut it = lines(text);
    while let Some((line, header)) = it.next() {
        let n: usize = header
            .strip_prefix("n ")
            .and_then(|s| s.trim().parse().ok())
            .filter(|&n| n >= 2)
            .ok_or_else(|| Error::Format { line, message: format!("expected 'n <leaves>', found '{header}'") })?;
        let mut rows = Vec::with_capacity(n - 1);
        for i in 1..n {
            let (line, row) = it.next().ok_or(Error::Format { line, message: format!("missing row {i}") })?;
            let row: Vec<i64> = numbers(line, row)?;
            if row.len() != i {
                return Err(Error::Format { line, message: format!("row {i} has {} entries", row.len()) });
            }
            rows.push(row);
        }
        out.push(FMatrix::from_rows(&rows).map_err(located(line))?);
    }
    Ok(out)
}

/// A parsed corpus.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeSet {
    Shapes(Vec<FMatrix>),
    Genealogies(Vec<RankedGenealogy>),
    Hetero(Vec<HeteroGenealogy>),
}

impl TreeSet {
    pub fn len(&self) -> usize {
        match self {
            TreeSet::Shapes(v) => v.len(),
            TreeSet::Genealogies(v) => v.len(),
            TreeSet::Hetero(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Ranked shapes of isochronous trees.
    pub fn shapes(&self) -> Result<Vec<FMatrix>> {
        match self {
            TreeSet::Shapes(v) => Ok(v.clone()),
            TreeSet::Genealogies(v) => Ok(v.iter().map(|g| g.fmatrix().clone()).collect()),
            TreeSet::Hetero(_) => {
                Err(Error::Heterogeneous("heterochronous trees have no isochronous ranked shape".into()))
            }
        }
    }

    pub fn genealogies(&self) -> Result<Vec<RankedGenealogy>> {
        match self {
            TreeSet::Genealogies(v) => Ok(v.clone()),
            TreeSet::Shapes(_) => Err(Error::InvalidParameter("input has no branching times".into())),
            TreeSet::Hetero(_) => Err(Error::Heterogeneous("input is heterochronous".into())),
        }
    }

    pub fn hetero(&self) -> Result<Vec<HeteroGenealogy>> {
        match self {
            TreeSet::Hetero(v) => Ok(v.clone()),
            TreeSet::Genealogies(v) => Ok(v.iter().map(HeteroGenealogy::from_isochronous).collect()),
            TreeSet::Shapes(_) => Err(Error::InvalidParameter("input has no branching times".into())),
        }
    }
}

fn parse_codes(text: &str) -> Result<TreeSet> {
    let mut shapes = Vec::new();
    let mut trees = Vec::new();
    for (line, l) in lines(text) {
        let (code, times) = match l.split_once('\t') {
            Some((c, t)) => (c, Some(t)),
            None => (l, None),
        };
        let code = RankedShapeCode::new(numbers(line, code)?).map_err(located(line))?;
        match times {
            Some(t) => trees.push(RankedGenealogy::new(code, numbers(line, t)?).map_err(located(line))?),
            None => shapes.push(code.to_fmatrix()),
        }
        if !shapes.is_empty() && !trees.is_empty() {
            return Err(Error::Format { line, message: "some codes have times and others do not".into() });
        }
    }
    Ok(if trees.is_empty() { TreeSet::Shapes(shapes) } else { TreeSet::Genealogies(trees) })
}

fn parse_hetero_blocks(text: &str) -> Result<TreeSet> {
    let mut out = Vec::new();
    let mut it = lines(text).peekable();
    while let Some((line, l)) = it.next() {
        let field = |l: &str, key: &str, line: usize| -> Result<String> {
            l.strip_prefix(key)
                .map(|s| s.trim().to_string())
                .ok_or_else(|| Error::Format { line, message: format!("expected '{key}'") })
        };
        let t: Vec<u32> = numbers(line, &field(l, "t:", line)?)?;
        let (sline, s) = it.next().ok_or(Error::Format { line, message: "missing 'sigma:' line".into() })?;
        let sigma = numbers::<u8>(sline, &field(s, "sigma:", sline)?)?
            .into_iter()
            .map(|v| match v {
                0 => Ok(false),
                1 => Ok(true),
                _ => Err(Error::Format { line: sline, message: "sigma entries must be 0 or 1".into() }),
            })
            .collect::<Result<Vec<bool>>>()?;
        let code = HeteroShapeCode::new(t, sigma).map_err(located(line))?;
        let Some(&(tline, tl)) = it.peek().filter(|(_, l)| l.starts_with("times:")) else {
            return Err(Error::Format { line, message: "heterochronous code without 'times:' line".into() });
        };
        it.next();
        let times = numbers(tline, &field(tl, "times:", tline)?)?;
        out.push(HeteroGenealogy::new(code, times).map_err(located(tline))?);
    }
    Ok(TreeSet::Hetero(out))
}

fn parse_newick_trees(text: &str, opts: &RankOptions) -> Result<TreeSet> {
    let ranked = parse_newick_forest(text)?
        .iter()
        .enumerate()
        .map(|(k, t)| to_ranked(t, opts).map_err(|e| Error::Format { line: k + 1, message: format!("tree {}: {e}", k + 1) }))
        .collect::<Result<Vec<Ranked>>>()?;
    if ranked.iter().all(|r| matches!(r, Ranked::Isochronous(_))) {
        let g = ranked
            .into_iter()
            .map(|r| match r {
                Ranked::Isochronous(g) => g,
                Ranked::Heterochronous(_) => unreachable!(),
            })
            .collect();
        Ok(TreeSet::Genealogies(g))
    } else {
        Ok(TreeSet::Hetero(ranked.into_iter().map(Ranked::into_hetero).collect()))
    }
}

/// Reads a corpus, detecting the format from the first non-comment line:
/// Newick, F-matrix blocks, heterochronous blocks or code lines.
pub fn parse_trees(text: &str, opts: &RankOptions) -> Result<TreeSet> {
    let first = lines(text).next().map(|(_, l)| l).unwrap_or("");
    let set = if first.starts_with('(') {
        parse_newick_trees(text, opts)?
    } else if first.starts_with("n ") {
        TreeSet::Shapes(parse_fmatrices(text)?)
    } else if first.starts_with("t:") {
        parse_hetero_blocks(text)?
    } else {
        parse_codes(text)?
    };
    if set.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmatrix_round_trip() {
        let f = FMatrix::balanced(6);
        let text = format!("# two blocks\n{}\n{}", write_fmatrix(&f), write_fmatrix(&FMatrix::unbalanced(3)));
        assert_eq!(parse_fmatrices(&text).unwrap(), vec![f, FMatrix::unbalanced(3)]);
    }

    #[test]
    fn fmatrix_errors_carry_lines() {
        let err = parse_fmatrices("n 3\n2\n1 1\n").unwrap_err();
        assert!(matches!(err, Error::Format { line: 1, .. }), "{err}");
        let err = parse_fmatrices("n 3\n2\n1 x\n").unwrap_err();
        assert!(matches!(err, Error::Format { line: 3, .. }), "{err}");
    }

    #[test]
    fn codes_and_genealogies() {
        let opts = RankOptions::default();
        let set = parse_trees("1 2 2\n1 2 3\n", &opts).unwrap();
        assert_eq!(set.len(), 2);
        assert!(matches!(set, TreeSet::Shapes(_)));
        let g = RankedGenealogy::new(RankedShapeCode::new(vec![1, 2, 2]).unwrap(), vec![3.0, 2.0, 0.5]).unwrap();
        let set = parse_trees(&write_genealogy(&g), &opts).unwrap();
        assert_eq!(set, TreeSet::Genealogies(vec![g]));
        assert!(parse_trees("1 2 2\n1 2 2\t3 2 1\n", &opts).is_err());
    }

    #[test]
    fn hetero_blocks() {
        let code = HeteroShapeCode::new(vec![1, 2, 3, 2, 3], vec![true, true, false, false, false]).unwrap();
        let text = write_hetero(&code, Some(&[3.0, 2.0, 1.0, 0.0, 0.0]));
        let TreeSet::Hetero(v) = parse_trees(&text, &RankOptions::default()).unwrap() else { panic!() };
        assert_eq!(v[0].code(), &code);
        assert_eq!(v[0].times()[2], 1.0);
    }

    #[test]
    fn newick_corpus() {
        let set = parse_trees("((:1,:1):1,:2);\n((:1,:1):1,:2);\n", &RankOptions::default()).unwrap();
        let TreeSet::Genealogies(g) = set else { panic!() };
        assert_eq!(g[0].times(), &[2.0, 1.0]);
    }
}
