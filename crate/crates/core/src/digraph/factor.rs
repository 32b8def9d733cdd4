use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Digraph;
use crate::error::{Error, Result};

/// A spanning set of vertex-disjoint directed cycles, stored both as a
/// successor permutation and as explicit cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneFactor {
    succ: Vec<usize>,
    pred: Vec<usize>,
    cycles: Vec<Vec<usize>>,
    cycle_of: Vec<usize>,
    pos: Vec<usize>,
}

/// JSON shape: `{"cycles": [[0,1,2],[3,4]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorJson {
    pub cycles: Vec<Vec<usize>>,
}

impl OneFactor {
    /// Builds from a successor permutation. Fixed points are rejected since
    /// they would need a loop. Cycles are listed starting from their smallest
    /// vertex, in order of that vertex.
    pub fn from_successors(succ: Vec<usize>) -> Result<Self> {
        let n = succ.len();
        let mut pred = vec![usize::MAX; n];
        for (v, &s) in succ.iter().enumerate() {
            if s >= n {
                return Err(Error::VertexOutOfRange { vertex: s, n });
            }
            if s == v {
                return Err(Error::InvalidFactor(format!("fixed point at {v}")));
            }
            if pred[s] != usize::MAX {
                return Err(Error::InvalidFactor(format!(
                    "{s} has two predecessors ({} and {v})",
                    pred[s]
                )));
            }
            pred[s] = v;
        }
        let mut cycle_of = vec![usize::MAX; n];
        let mut pos = vec![0; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if cycle_of[start] != usize::MAX {
                continue;
            }
            let id = cycles.len();
            let mut cyc = Vec::new();
            let mut v = start;
            while cycle_of[v] == usize::MAX {
                cycle_of[v] = id;
                pos[v] = cyc.len();
                cyc.push(v);
                v = succ[v];
            }
            cycles.push(cyc);
        }
        Ok(OneFactor {
            succ,
            pred,
            cycles,
            cycle_of,
            pos,
        })
    }

    /// Builds from explicit cycles; they must partition `[0, n)`.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut succ = vec![usize::MAX; n];
        for c in cycles {
            if c.len() < 2 {
                return Err(Error::InvalidFactor(format!(
                    "cycle {c:?} has fewer than two vertices"
                )));
            }
            for (i, &v) in c.iter().enumerate() {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                if succ[v] != usize::MAX {
                    return Err(Error::InvalidFactor(format!("{v} appears twice")));
                }
                succ[v] = c[(i + 1) % c.len()];
            }
        }
        if let Some(v) = succ.iter().position(|&s| s == usize::MAX) {
            return Err(Error::InvalidFactor(format!("{v} is not covered")));
        }
        Self::from_successors(succ)
    }

    /// Checks that every successor edge exists in `g`.
    pub fn validate_in(&self, g: &Digraph) -> Result<()> {
        if g.n() != self.n() {
            return Err(Error::InvalidFactor(format!(
                "factor has {} vertices, digraph has {}",
                self.n(),
                g.n()
            )));
        }
        for (v, &s) in self.succ.iter().enumerate() {
            if !g.has_edge(v, s) {
                return Err(Error::InvalidFactor(format!("edge {v}->{s} not in digraph")));
            }
        }
        Ok(())
    }

    /// [`OneFactor::from_successors`] followed by [`OneFactor::validate_in`].
    pub fn in_digraph(g: &Digraph, succ: Vec<usize>) -> Result<Self> {
        let f = Self::from_successors(succ)?;
        f.validate_in(g)?;
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.succ.len()
    }

    pub fn successor(&self, x: usize) -> usize {
        self.succ[x]
    }

    pub fn predecessor(&self, x: usize) -> usize {
        self.pred[x]
    }

    pub fn successors(&self) -> &[usize] {
        &self.succ
    }

    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn cycle_index(&self, x: usize) -> usize {
        self.cycle_of[x]
    }

    pub fn cycle_of(&self, x: usize) -> &[usize] {
        &self.cycles[self.cycle_of[x]]
    }

    /// Forward distance from `x` to `y` along their common cycle.
    pub fn forward_distance(&self, x: usize, y: usize) -> Option<usize> {
        if self.cycle_of[x] != self.cycle_of[y] {
            return None;
        }
        let len = self.cycles[self.cycle_of[x]].len();
        Some((self.pos[y] + len - self.pos[x]) % len)
    }

    /// `{dist(x→y), dist(y→x)}` along the common cycle, empty if `x` and `y`
    /// lie on different cycles. For `x = y` this is `{0, |C|}`.
    pub fn distances(&self, x: usize, y: usize) -> BTreeSet<usize> {
        let Some(d) = self.forward_distance(x, y) else {
            return BTreeSet::new();
        };
        let len = self.cycles[self.cycle_of[x]].len();
        if d == 0 {
            BTreeSet::from([0, len])
        } else {
            BTreeSet::from([d, len - d])
        }
    }

    /// The factor as a digraph (one edge per vertex).
    pub fn as_digraph(&self) -> Digraph {
        let out = self.succ.iter().map(|&s| vec![s]).collect();
        Digraph::from_sorted_out(self.n(), out)
    }

    pub fn to_json(&self) -> FactorJson {
        FactorJson {
            cycles: self.cycles.clone(),
        }
    }

    pub fn from_json(n: usize, json: &FactorJson) -> Result<Self> {
        Self::from_cycles(n, &json.cycles)
    }
}
