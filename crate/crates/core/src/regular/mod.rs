//! Densities, ε-regularity and super-regularity of cluster pairs, the tools
//! built on them (matchings, excision, ideals), reduced digraphs from a given
//! partition, typical-vertex pruning and hypergeometric sampling.

mod certify;
mod chernoff;
mod ideal;
mod pairs;
mod reduced;

use serde::{Deserialize, Serialize};

use crate::digraph::{BipartiteGraph, Digraph};
use crate::error::{Error, Result};
use crate::rational::{int, Rational};

pub use certify::{
    certify_regular, certify_super_regular, CertifyMode, RegularityVerdict, Side,
    SuperRegularVerdict, DEFAULT_SAMPLES, EXHAUSTIVE_LIMIT,
};
pub use chernoff::{chernoff_audit, sample_hypergeometric, ChernoffAudit};
pub use ideal::{audit_ideal, select_ideal, Ideal, IdealAudit};
pub use pairs::{
    excise_preserving, hamilton_in_super_regular, make_super_regular, regular_pair_matching,
    MAX_REDRAWS,
};
pub use reduced::{
    atypical_vertices, build_reduced, pair_densities, prune_atypical, prune_count,
    typicality_audit, PruneOutcome, PrunedView, ReducedDigraph, Typicality,
};

/// Exceptional set `V₀` and equal-size clusters `V₁ … V_k` (0-indexed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterPartition {
    n: usize,
    pub v0: Vec<usize>,
    pub clusters: Vec<Vec<usize>>,
}

/// JSON shape `{"v0": [...], "clusters": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionJson {
    pub v0: Vec<usize>,
    pub clusters: Vec<Vec<usize>>,
}

impl ClusterPartition {
    /// Validates that `v0` and the clusters partition `[0, n)` and that all
    /// clusters have the same size.
    pub fn new(n: usize, v0: Vec<usize>, clusters: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for &v in v0.iter().chain(clusters.iter().flatten()) {
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            if seen[v] {
                return Err(Error::InvalidPartition(format!("vertex {v} listed twice")));
            }
            seen[v] = true;
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidPartition(format!("vertex {v} not covered")));
        }
        if let Some(c) = clusters.iter().find(|c| c.len() != clusters[0].len()) {
            return Err(Error::InvalidPartition(format!(
                "cluster sizes differ ({} vs {})",
                c.len(),
                clusters[0].len()
            )));
        }
        Ok(ClusterPartition { n, v0, clusters })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.clusters.len()
    }

    /// Cluster size `m` (0 when there are no clusters).
    pub fn m(&self) -> usize {
        self.clusters.first().map_or(0, Vec::len)
    }

    /// Cluster index of every vertex, `None` for `V₀`.
    pub fn cluster_of(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.n];
        for (i, c) in self.clusters.iter().enumerate() {
            for &v in c {
                out[v] = Some(i);
            }
        }
        out
    }

    /// Moves `removed[i]` (a subset of cluster `i`, equal sizes) into `V₀`.
    pub fn move_to_exceptional(&self, removed: &[Vec<usize>]) -> Result<Self> {
        let mut v0 = self.v0.clone();
        let mut clusters = Vec::with_capacity(self.k());
        for (c, rem) in self.clusters.iter().zip(removed) {
            let mut drop = rem.clone();
            drop.sort_unstable();
            clusters.push(c.iter().copied().filter(|v| drop.binary_search(v).is_err()).collect());
            v0.extend_from_slice(rem);
        }
        v0.sort_unstable();
        Self::new(self.n, v0, clusters)
    }

    pub fn to_json(&self) -> PartitionJson {
        PartitionJson {
            v0: self.v0.clone(),
            clusters: self.clusters.clone(),
        }
    }

    pub fn from_json(n: usize, json: &PartitionJson) -> Result<Self> {
        Self::new(n, json.v0.clone(), json.clusters.clone())
    }
}

/// The ordered pair `(A, B)` of a host digraph, using the edges from `A` to `B`.
#[derive(Debug, Clone)]
pub struct Pair<'a> {
    pub host: &'a Digraph,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl<'a> Pair<'a> {
    pub fn new(host: &'a Digraph, a: Vec<usize>, b: Vec<usize>) -> Result<Self> {
        let mut mark = vec![0u8; host.n()];
        for (side, list) in [(1u8, &a), (2u8, &b)] {
            for &v in list.iter() {
                if v >= host.n() {
                    return Err(Error::VertexOutOfRange { vertex: v, n: host.n() });
                }
                if mark[v] != 0 {
                    return Err(Error::InvalidPartition(format!(
                        "vertex {v} repeated in pair (side {side})"
                    )));
                }
                mark[v] = side;
            }
        }
        Ok(Pair { host, a, b })
    }

    /// The bipartite graph of `A → B` edges, indexed by position in `a`/`b`.
    pub fn bipartite(&self) -> BipartiteGraph {
        let mut pos = vec![usize::MAX; self.host.n()];
        for (j, &v) in self.b.iter().enumerate() {
            pos[v] = j;
        }
        let adj = self
            .a
            .iter()
            .map(|&u| {
                let mut l: Vec<usize> = self
                    .host
                    .out_neighbors(u)
                    .iter()
                    .filter_map(|&w| (pos[w] != usize::MAX).then_some(pos[w]))
                    .collect();
                l.sort_unstable();
                l
            })
            .collect();
        BipartiteGraph::from_sorted(self.a.len(), self.b.len(), adj)
    }

    pub fn edge_count(&self) -> usize {
        self.bipartite().edge_count()
    }

    pub fn density(&self) -> Result<Rational> {
        density(self)
    }

    /// Sub-pair on the given subsets (host ids).
    pub fn sub(&self, a: Vec<usize>, b: Vec<usize>) -> Pair<'a> {
        Pair { host: self.host, a, b }
    }
}

/// `e(A, B) / (|A||B|)`, exactly.
pub fn density(p: &Pair<'_>) -> Result<Rational> {
    if p.a.is_empty() || p.b.is_empty() {
        return Err(Error::Parameter("density of a pair with an empty side".into()));
    }
    Ok(Rational::new(
        p.edge_count() as i64,
        (p.a.len() * p.b.len()) as i64,
    ))
}

pub(crate) fn check_eps(eps: &Rational) -> Result<()> {
    if *eps <= Rational::from_integer(0) {
        return Err(Error::Parameter("epsilon must be positive".into()));
    }
    Ok(())
}

/// `x ≥ c·n` for integers `x`, `n`.
pub(crate) fn at_least(x: usize, c: &Rational, n: usize) -> bool {
    int(x) >= c * int(n)
}
