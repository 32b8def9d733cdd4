use serde::{Deserialize, Serialize};

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::matching::{find_one_factor, FactorCertificate};
use crate::rational::{ceil_int, int, Rational};

/// Cycles, paths and a waste set partitioning the vertices of a digraph.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PathCyclePartition {
    pub cycles: Vec<Vec<usize>>,
    pub paths: Vec<Vec<usize>>,
    pub waste: Vec<usize>,
}

impl PathCyclePartition {
    /// Checks that the parts partition `V(r)` and follow edges of `r`.
    pub fn validate(&self, r: &Digraph) -> Result<()> {
        let mut seen = vec![false; r.n()];
        let all = self
            .cycles
            .iter()
            .flatten()
            .chain(self.paths.iter().flatten())
            .chain(self.waste.iter());
        for &v in all {
            if v >= r.n() {
                return Err(Error::VertexOutOfRange { vertex: v, n: r.n() });
            }
            if seen[v] {
                return Err(Error::InvalidPartition(format!("vertex {v} appears twice")));
            }
            seen[v] = true;
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidPartition(format!("vertex {v} is not covered")));
        }
        for c in &self.cycles {
            if c.len() < 2 {
                return Err(Error::InvalidPartition("cycle shorter than 2".into()));
            }
            for i in 0..c.len() {
                let (a, b) = (c[i], c[(i + 1) % c.len()]);
                if !r.has_edge(a, b) {
                    return Err(Error::InvalidPartition(format!("cycle edge {a}->{b} missing")));
                }
            }
        }
        for p in &self.paths {
            if p.is_empty() {
                return Err(Error::InvalidPartition("empty path".into()));
            }
            if let Some(w) = p.windows(2).find(|w| !r.has_edge(w[0], w[1])) {
                return Err(Error::InvalidPartition(format!("path edge {}->{} missing", w[0], w[1])));
            }
        }
        Ok(())
    }
}

/// `(1/2 − 2d)k`.
pub(crate) fn large_threshold(k: usize, d: Rational) -> Rational {
    (Rational::new(1, 2) - Rational::from_integer(2) * d) * int(k)
}

/// Splits `V(r)` into cycles and at most `⌈4dk⌉` paths whose initial vertices
/// have indegree and final vertices outdegree at least `(1/2 − 2d)k`.
///
/// If `r` has a 1-factor its cycles are returned. Otherwise `⌈4dk⌉` new
/// vertices are added, complete among themselves, receiving edges from every
/// vertex of large outdegree and sending edges to every vertex of large
/// indegree; the new vertices are cut out of a 1-factor of that digraph.
pub fn partition_cycles_paths(r: &Digraph, d: Rational) -> Result<PathCyclePartition> {
    let k = r.n();
    if let FactorCertificate::Factor(f) = find_one_factor(r) {
        return Ok(PathCyclePartition {
            cycles: f.cycles().to_vec(),
            ..Default::default()
        });
    }
    let extra = ceil_int(&(Rational::from_integer(4) * d * int(k))).max(0) as usize;
    let t = large_threshold(k, d);
    let total = k + extra;
    let mut edges: Vec<(usize, usize)> = r.edges().collect();
    for a in k..total {
        for b in k..total {
            if a != b {
                edges.push((a, b));
            }
        }
    }
    for v in 0..k {
        if int(r.out_degree(v)) >= t {
            edges.extend((k..total).map(|x| (v, x)));
        }
        if int(r.in_degree(v)) >= t {
            edges.extend((k..total).map(|x| (x, v)));
        }
    }
    let aug = Digraph::new(total, edges)?;
    let f = match find_one_factor(&aug) {
        FactorCertificate::Factor(f) => f,
        FactorCertificate::Violator(s) => {
            return Err(Error::contract(
                format!(
                    "augmented digraph with {extra} new vertices has no 1-factor: {} vertices have {} out-neighbours",
                    s.len(),
                    aug.neighborhood(&s, crate::digraph::Direction::Out)?.len()
                ),
                Some(s),
            ))
        }
    };
    let mut out = PathCyclePartition::default();
    for c in f.cycles() {
        let Some(start) = c.iter().position(|&v| v >= k) else {
            out.cycles.push(c.clone());
            continue;
        };
        // rotate so the cycle begins at a new vertex, then cut at new vertices
        let rotated: Vec<usize> = c[start..].iter().chain(&c[..start]).copied().collect();
        let mut current = Vec::new();
        for &v in rotated.iter().skip(1).chain(std::iter::once(&rotated[0])) {
            if v >= k {
                if !current.is_empty() {
                    out.paths.push(std::mem::take(&mut current));
                }
            } else {
                current.push(v);
            }
        }
    }
    Ok(out)
}
