//! The `p vwg` text format.
//!
//! ```text
//! # comment
//! p vwg <n> <m>
//! v <label> <weight>        (n lines)
//! e <label> <label> [w]     (m lines, optional edge weight, default 1)
//! ```
//! Labels are arbitrary whitespace-free tokens; they are mapped to dense
//! ids in order of their `v` lines.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use bcd_core::WeightedGraph;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: duplicate edge {a} {b}")]
    DuplicateEdge { line: usize, a: String, b: String },
    #[error("line {line}: bad weight {token:?}")]
    BadWeight { line: usize, token: String },
    #[error("header announces {expected} {what} lines, found {found}")]
    CountMismatch { what: &'static str, expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFile {
    pub g: WeightedGraph,
    pub labels: Vec<String>,
    /// Edge weights keyed by `(u, v)` with `u < v`.
    pub edge_weights: BTreeMap<(usize, usize), i64>,
}

impl GraphFile {
    pub fn from_graph(g: WeightedGraph) -> Self {
        let labels = (0..g.n()).map(|v| v.to_string()).collect();
        let edge_weights = g.edges().map(|e| (e, 1)).collect();
        GraphFile { g, labels, edge_weights }
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels_of(&self, set: &[usize]) -> Vec<String> {
        set.iter().map(|&v| self.labels[v].clone()).collect()
    }

    pub fn id_map(&self) -> HashMap<&str, usize> {
        self.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect()
    }
}

fn weight(tok: Option<&str>, line: usize) -> Result<i64, ParseError> {
    let tok = tok.ok_or(ParseError::Syntax { line, msg: "missing weight".into() })?;
    match tok.parse::<i64>() {
        Ok(w) if w >= 1 => Ok(w),
        _ => Err(ParseError::BadWeight { line, token: tok.into() }),
    }
}

pub fn parse(text: &str) -> Result<GraphFile, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut labels: Vec<String> = Vec::new();
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut weights = Vec::new();
    let mut edges: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    let mut edge_lines = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let mut tok = s.split_whitespace();
        let kind = tok.next().unwrap();
        let syntax = |msg: &str| ParseError::Syntax { line, msg: msg.into() };
        match (kind, header) {
            ("p", None) => {
                if tok.next() != Some("vwg") {
                    return Err(syntax("header must be `p vwg <n> <m>`"));
                }
                let n = tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| syntax("bad vertex count"))?;
                let m = tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| syntax("bad edge count"))?;
                header = Some((n, m));
            }
            ("p", Some(_)) => return Err(syntax("second header")),
            (_, None) => return Err(syntax("expected the `p vwg` header first")),
            ("v", Some(_)) => {
                let label = tok.next().ok_or_else(|| syntax("missing label"))?;
                let w = weight(tok.next(), line)?;
                if ids.insert(label.to_string(), labels.len()).is_some() {
                    return Err(syntax(&format!("label {label} declared twice")));
                }
                labels.push(label.to_string());
                weights.push(w);
            }
            ("e", Some(_)) => {
                let a = tok.next().ok_or_else(|| syntax("missing endpoint"))?;
                let b = tok.next().ok_or_else(|| syntax("missing endpoint"))?;
                let w = match tok.next() {
                    None => 1,
                    t => weight(t, line)?,
                };
                let (&u, &v) = match (ids.get(a), ids.get(b)) {
                    (Some(u), Some(v)) => (u, v),
                    _ => return Err(syntax("edge names an undeclared label")),
                };
                if u == v {
                    return Err(syntax("self-loop"));
                }
                if edges.insert((u.min(v), u.max(v)), w).is_some() {
                    return Err(ParseError::DuplicateEdge { line, a: a.into(), b: b.into() });
                }
                edge_lines += 1;
            }
            _ => return Err(syntax(&format!("unknown line type {kind:?}"))),
        }
        if tok.next().is_some() {
            return Err(syntax("trailing tokens"));
        }
    }
    let (n, m) = header.ok_or(ParseError::Syntax { line: 0, msg: "missing `p vwg` header".into() })?;
    if labels.len() != n {
        return Err(ParseError::CountMismatch { what: "vertex", expected: n, found: labels.len() });
    }
    if edge_lines != m {
        return Err(ParseError::CountMismatch { what: "edge", expected: m, found: edge_lines });
    }
    let list: Vec<(usize, usize)> = edges.keys().copied().collect();
    let g = WeightedGraph::new(weights, &list).map_err(|e| ParseError::Syntax { line: 0, msg: e.to_string() })?;
    Ok(GraphFile { g, labels, edge_weights: edges })
}

pub fn emit(f: &GraphFile) -> String {
    let mut s = String::new();
    writeln!(s, "p vwg {} {}", f.g.n(), f.g.m()).unwrap();
    for v in 0..f.g.n() {
        writeln!(s, "v {} {}", f.labels[v], f.g.weight(v)).unwrap();
    }
    for (&(u, v), &w) in &f.edge_weights {
        if w == 1 {
            writeln!(s, "e {} {}", f.labels[u], f.labels[v]).unwrap();
        } else {
            writeln!(s, "e {} {} {w}", f.labels[u], f.labels[v]).unwrap();
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRI: &str = "# triangle\np vwg 3 3\nv x 1\nv y 1\nv z 1\ne x y\ne y z\ne x z 4\n";

    #[test]
    fn triangle() {
        let f = parse(TRI).unwrap();
        assert_eq!((f.g.n(), f.g.m()), (3, 3));
        assert_eq!(f.labels, ["x", "y", "z"]);
        assert_eq!(f.edge_weights[&(0, 2)], 4);
        assert_eq!(parse(&emit(&f)).unwrap(), f);
    }

    #[test]
    fn errors() {
        let missing = "p vwg 3 0\nv a 1\nv b 1\n";
        assert!(matches!(parse(missing), Err(ParseError::CountMismatch { what: "vertex", .. })));
        assert!(matches!(parse("p vwg 1 0\nv a 0\n"), Err(ParseError::BadWeight { line: 2, .. })));
        assert!(matches!(parse("p vwg 1 0\nv a x\n"), Err(ParseError::BadWeight { .. })));
        let dup = "p vwg 2 2\nv a 1\nv b 1\ne a b\ne b a\n";
        assert!(matches!(parse(dup), Err(ParseError::DuplicateEdge { line: 5, .. })));
        assert!(matches!(parse("v a 1\n"), Err(ParseError::Syntax { line: 1, .. })));
        assert!(matches!(parse("p vwg 1 1\nv a 1\ne a a\n"), Err(ParseError::Syntax { line: 3, .. })));
        assert!(matches!(parse("p vwg 1 0\nv a 1\nq\n"), Err(ParseError::Syntax { line: 3, .. })));
        assert!(matches!(parse("p vwg 1 1\nv a 1\n"), Err(ParseError::CountMismatch { what: "edge", .. })));
    }
}
