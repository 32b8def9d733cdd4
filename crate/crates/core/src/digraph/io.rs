use serde::{Deserialize, Serialize};

use super::Digraph;
use crate::error::{Error, Result};

/// JSON shape `{"n": 4, "edges": [[0,1],[1,2]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl From<Digraph> for GraphJson {
    fn from(g: Digraph) -> Self {
        g.to_json()
    }
}

impl TryFrom<GraphJson> for Digraph {
    type Error = Error;

    fn try_from(json: GraphJson) -> Result<Self> {
        Digraph::from_json(&json)
    }
}

impl Digraph {
    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            edges: self.edges().map(|(u, v)| [u, v]).collect(),
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Self> {
        Digraph::new(json.n, json.edges.iter().map(|e| (e[0], e[1])))
    }

    /// Canonical compact JSON; edges come out sorted.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("plain data serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }

    /// First line `n`, then one `u v` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Parses the edge-list format; blank lines and `#` comments are skipped.
    pub fn from_edge_list(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, first) = lines
            .next()
            .ok_or_else(|| Error::Parse("empty edge list".into()))?;
        let n: usize = first
            .parse()
            .map_err(|_| Error::Parse(format!("bad vertex count {first:?}")))?;
        let mut edges = Vec::new();
        for (lineno, line) in lines {
            let mut it = line.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
                _ => return Err(Error::Parse(format!("line {lineno}: expected `u v`"))),
            }
        }
        Digraph::new(n, edges)
    }

    /// Parses either format, choosing JSON when the text starts with `{`.
    pub fn parse_any(s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            Self::from_json_str(s)
        } else {
            Self::from_edge_list(s)
        }
    }
}
