//! Newick reader and writer for rooted binary trees.
//!
//! Bracketed comments (`[...]`, including BEAST `[&...]` annotations) are
//! skipped wherever whitespace is allowed. Parsing is iterative, so deeply
//! nested input cannot overflow the stack.

use std::fmt::{self, Write as _};

use thiserror::Error;

/// A parse failure with the byte offset where it was detected.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("newick error at byte {offset}: {kind}")]
pub struct NewickError {
    pub offset: usize,
    pub kind: NewickErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NewickErrorKind {
    UnexpectedEnd { expected: &'static str },
    Unexpected { found: char, expected: &'static str },
    /// An internal node with other than two children.
    NonBinary { children: usize },
    MalformedLength(String),
    UnterminatedComment,
    UnterminatedQuote,
}

impl fmt::Display for NewickErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnexpectedEnd { expected } => write!(f, "unexpected end of input, expected {expected}"),
            Self::Unexpected { found, expected } => write!(f, "unexpected '{found}', expected {expected}"),
            Self::NonBinary { children } => write!(f, "node has {children} children; only binary trees are supported"),
            Self::MalformedLength(s) => write!(f, "malformed branch length '{s}'"),
            Self::UnterminatedComment => f.write_str("unterminated comment"),
            Self::UnterminatedQuote => f.write_str("unterminated quoted label"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub label: String,
    /// Length of the branch above this node.
    pub length: Option<f64>,
    pub children: Vec<usize>,
}

/// Rooted binary tree with optional labels and branch lengths. Node 0 is
/// the root.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledTree {
    nodes: Vec<Node>,
}

impl LabelledTree {
    pub(crate) fn from_nodes(nodes: Vec<Node>) -> Self {
        Self { nodes }
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn node_mut(&mut self, id: usize) -> &mut Node {
        &mut self.nodes[id]
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        self.nodes[id].children.is_empty()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.children.is_empty()).count()
    }

    /// Node ids with every parent before its children.
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            out.push(id);
            stack.extend(self.nodes[id].children.iter().rev());
        }
        out
    }

    pub fn to_newick(&self) -> String {
        let mut out = String::new();
        // (node, next child to emit)
        let mut stack = vec![(0usize, 0usize)];
        while let Some((id, next)) = stack.pop() {
            let node = &self.nodes[id];
            if node.children.is_empty() || next == node.children.len() {
                if !node.children.is_empty() {
                    out.push(')');
                }
                write_label(&mut out, &node.label);
                if let Some(len) = node.length {
                    let _ = write!(out, ":{len}");
                }
                continue;
            }
            out.push(if next == 0 { '(' } else { ',' });
            stack.push((id, next + 1));
            stack.push((node.children[next], 0));
        }
        out.push(';');
        out
    }
}

fn write_label(out: &mut String, label: &str) {
    let needs_quotes = label.chars().any(|c| "()[]':;, \t\n".contains(c));
    if needs_quotes {
        out.push('\'');
        out.push_str(&label.replace('\'', "''"));
        out.push('\'');
    } else {
        out.push_str(label);
    }
}

/// Parses one tree terminated by `;`.
pub fn parse_newick(text: &str) -> Result<LabelledTree, NewickError> {
    let mut p = Parser { src: text.as_bytes(), text, pos: 0 };
    let tree = p.tree()?;
    p.skip_space()?;
    if p.pos < p.src.len() {
        return Err(p.unexpected("end of input"));
    }
    Ok(tree)
}

/// Parses every `;`-terminated tree in the input.
pub fn parse_newick_forest(text: &str) -> Result<Vec<LabelledTree>, NewickError> {
    let mut p = Parser { src: text.as_bytes(), text, pos: 0 };
    let mut out = Vec::new();
    loop {
        p.skip_space()?;
        if p.pos >= p.src.len() {
            return Ok(out);
        }
        out.push(p.tree()?);
    }
}

struct Parser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, kind: NewickErrorKind) -> NewickError {
        NewickError { offset: self.pos, kind }
    }

    fn unexpected(&self, expected: &'static str) -> NewickError {
        match self.text[self.pos..].chars().next() {
            Some(found) => self.err(NewickErrorKind::Unexpected { found, expected }),
            None => self.err(NewickErrorKind::UnexpectedEnd { expected }),
        }
    }

    fn skip_space(&mut self) -> Result<(), NewickError> {
        while self.pos < self.src.len() {
            match self.src[self.pos] {
                b' ' | b'\t' | b'\n' | b'\r' => self.pos += 1,
                b'[' => {
                    let start = self.pos;
                    match self.src[self.pos..].iter().position(|&b| b == b']') {
                        Some(k) => self.pos += k + 1,
                        None => {
                            return Err(NewickError {
                                offset: start,
                                kind: NewickErrorKind::UnterminatedComment,
                            })
                        }
                    }
                }
                _ => break,
            }
        }
        Ok(())
    }

    fn peek(&mut self) -> Result<Option<u8>, NewickError> {
        self.skip_space()?;
        Ok(self.src.get(self.pos).copied())
    }

    fn label(&mut self) -> Result<String, NewickError> {
        self.skip_space()?;
        if self.src.get(self.pos) == Some(&b'\'') {
            let start = self.pos;
            self.pos += 1;
            let mut out = String::new();
            loop {
                let Some(c) = self.text[self.pos..].chars().next() else {
                    return Err(NewickError { offset: start, kind: NewickErrorKind::UnterminatedQuote });
                };
                self.pos += c.len_utf8();
                if c == '\'' {
                    if self.src.get(self.pos) == Some(&b'\'') {
                        out.push('\'');
                        self.pos += 1;
                    } else {
                        return Ok(out);
                    }
                } else {
                    out.push(c);
                }
            }
        }
        let start = self.pos;
        while let Some(&b) = self.src.get(self.pos) {
            if b"()[],:; \t\n\r'".contains(&b) {
                break;
            }
            self.pos += 1;
        }
        Ok(self.text[start..self.pos].to_string())
    }

    fn length(&mut self) -> Result<Option<f64>, NewickError> {
        if self.peek()? != Some(b':') {
            return Ok(None);
        }
        self.pos += 1;
        self.skip_space()?;
        let start = self.pos;
        while let Some(&b) = self.src.get(self.pos) {
            if !(b.is_ascii_digit() || b"+-.eE".contains(&b)) {
                break;
            }
            self.pos += 1;
        }
        let raw = &self.text[start..self.pos];
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 => Ok(Some(v)),
            _ => Err(NewickError {
                offset: start,
                kind: NewickErrorKind::MalformedLength(raw.to_string()),
            }),
        }
    }

    fn tree(&mut self) -> Result<LabelledTree, NewickError> {
        let mut nodes: Vec<Node> = Vec::new();
        let mut open: Vec<usize> = Vec::new();
        let new_node = |nodes: &mut Vec<Node>, open: &[usize]| {
            let id = nodes.len();
            nodes.push(Node { label: String::new(), length: None, children: Vec::new() });
            if let Some(&parent) = open.last() {
                nodes[parent].children.push(id);
            }
            id
        };
        // Expecting the start of a subtree.
        loop {
            if self.peek()? == Some(b'(') {
                self.pos += 1;
                let id = new_node(&mut nodes, &open);
                open.push(id);
                continue;
            }
            let id = new_node(&mut nodes, &open);
            nodes[id].label = self.label()?;
            nodes[id].length = self.length()?;
            // After a complete subtree.
            loop {
                match self.peek()? {
                    Some(b',') => {
                        let Some(&top) = open.last() else {
                            return Err(self.unexpected("';'"));
                        };
                        if nodes[top].children.len() >= 2 {
                            return Err(self.err(NewickErrorKind::NonBinary {
                                children: nodes[top].children.len() + 1,
                            }));
                        }
                        self.pos += 1;
                        break;
                    }
                    Some(b')') => {
                        let Some(top) = open.pop() else {
                            return Err(self.unexpected("';'"));
                        };
                        let k = nodes[top].children.len();
                        if k != 2 {
                            return Err(self.err(NewickErrorKind::NonBinary { children: k }));
                        }
                        self.pos += 1;
                        nodes[top].label = self.label()?;
                        nodes[top].length = self.length()?;
                    }
                    Some(b';') if open.is_empty() => {
                        self.pos += 1;
                        return Ok(LabelledTree { nodes });
                    }
                    _ if open.is_empty() => return Err(self.unexpected("';'")),
                    _ => return Err(self.unexpected("',' or ')'")),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_tree() {
        let t = parse_newick("((:1,:1):1,:2);").unwrap();
        assert_eq!(t.leaf_count(), 3);
        assert_eq!(t.nodes().len(), 5);
        assert_eq!(t.node(1).length, Some(1.0));
        assert_eq!(t.node(4).length, Some(2.0));
    }

    #[test]
    fn trifurcation_rejected() {
        let err = parse_newick("(a,b,c);").unwrap_err();
        assert_eq!(err.kind, NewickErrorKind::NonBinary { children: 3 });
        assert_eq!(err.offset, 4);
        let err = parse_newick("((a),b);").unwrap_err();
        assert_eq!(err.kind, NewickErrorKind::NonBinary { children: 1 });
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_newick("((a,b),c;").unwrap_err();
        assert_eq!(err.offset, 8);
        let err = parse_newick("(a:x,b);").unwrap_err();
        assert!(matches!(err.kind, NewickErrorKind::MalformedLength(_)));
        assert_eq!(err.offset, 3);
        assert!(parse_newick("").is_err());
        assert!(parse_newick("(a,b)").is_err());
        assert!(parse_newick("(a,b);x").is_err());
        assert!(parse_newick("(a,b)[oops;").is_err());
        assert!(parse_newick("('a,b);").is_err());
    }

    #[test]
    fn comments_and_quotes() {
        let t = parse_newick("[&R] ('x y':1[&rate=1],b'':2)root;").unwrap_err();
        // unquoted labels cannot contain quotes
        assert!(matches!(t.kind, NewickErrorKind::Unexpected { .. }));
        let t = parse_newick("[&R] ('x y':1[&rate=1],'b''c':2)root;").unwrap();
        assert_eq!(t.node(1).label, "x y");
        assert_eq!(t.node(2).label, "b'c");
        assert_eq!(t.node(0).label, "root");
        assert_eq!(parse_newick(&t.to_newick()).unwrap(), t);
    }

    #[test]
    fn forest() {
        let trees = parse_newick_forest("(a,b);\n((a,b),c);\n").unwrap();
        assert_eq!(trees.len(), 2);
        assert_eq!(trees[1].leaf_count(), 3);
    }

    #[test]
    fn emit_round_trip() {
        let src = "((a:1.5,b:0.25):1,(c:1,d:1e-3):2);";
        let t = parse_newick(src).unwrap();
        assert_eq!(parse_newick(&t.to_newick()).unwrap(), t);
    }
}
