//! Loop-free digraphs on `[0, n)` together with the small value types built
//! on top of them: degree sequences, 1-factors, bipartite pairs and Hamilton
//! certificates.

mod bipartite;
mod factor;
mod io;

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

pub use bipartite::BipartiteGraph;
pub use factor::{FactorJson, OneFactor};
pub use io::GraphJson;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Out,
    In,
}

/// A digraph with sorted out- and in-adjacency lists.
///
/// At most one edge per ordered pair and no self-loops; 2-cycles are fine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "GraphJson", try_from = "GraphJson")]
pub struct Digraph {
    n: usize,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Digraph {
    /// Builds a digraph, rejecting loops, duplicate edges and out-of-range
    /// endpoints.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out_adj = vec![Vec::new(); n];
        for (u, v) in edges {
            check_vertex(u, n)?;
            check_vertex(v, n)?;
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            out_adj[u].push(v);
        }
        for (u, list) in out_adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge {u}->{}",
                    w[0]
                )));
            }
        }
        Ok(Self::from_sorted_out(n, out_adj))
    }

    /// Caller guarantees sorted, loop-free, duplicate-free lists.
    pub(crate) fn from_sorted_out(n: usize, out_adj: Vec<Vec<usize>>) -> Self {
        let mut in_adj = vec![Vec::new(); n];
        let mut edge_count = 0;
        for (u, list) in out_adj.iter().enumerate() {
            edge_count += list.len();
            for &v in list {
                in_adj[v].push(u);
            }
        }
        // pushing in increasing u keeps every in-list sorted
        Digraph {
            n,
            out_adj,
            in_adj,
            edge_count,
        }
    }

    /// Builds from a boolean adjacency matrix (diagonal ignored).
    pub fn from_matrix(adj: &[Vec<bool>]) -> Self {
        let n = adj.len();
        let out_adj = adj
            .iter()
            .enumerate()
            .map(|(u, row)| (0..n).filter(|&v| v != u && row[v]).collect())
            .collect();
        Self::from_sorted_out(n, out_adj)
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_out(n, vec![Vec::new(); n])
    }

    pub fn complete(n: usize) -> Self {
        let out_adj = (0..n)
            .map(|u| (0..n).filter(|&v| v != u).collect())
            .collect();
        Self::from_sorted_out(n, out_adj)
    }

    /// The directed cycle `0 → 1 → … → n-1 → 0`.
    pub fn cycle(n: usize) -> Self {
        let edges = (0..n).map(|i| (i, (i + 1) % n));
        Self::new(n, edges).expect("cycle needs n >= 2")
    }

    /// The directed path `0 → 1 → … → n-1`.
    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    pub fn neighbors(&self, v: usize, dir: Direction) -> &[usize] {
        match dir {
            Direction::Out => &self.out_adj[v],
            Direction::In => &self.in_adj[v],
        }
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.out_adj[u].binary_search(&v).is_ok()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().map(move |&v| (u, v)))
    }

    pub fn min_out_degree(&self) -> usize {
        self.out_adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn min_in_degree(&self) -> usize {
        self.in_adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// `δ⁰`, the minimum over all vertices of min(indegree, outdegree).
    pub fn min_semidegree(&self) -> usize {
        self.min_out_degree().min(self.min_in_degree())
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count == self.n * self.n.saturating_sub(1)
    }

    pub fn degree_sequences(&self) -> DegreeSequences {
        let mut out_sorted: Vec<usize> = self.out_adj.iter().map(Vec::len).collect();
        let mut in_sorted: Vec<usize> = self.in_adj.iter().map(Vec::len).collect();
        out_sorted.sort_unstable();
        in_sorted.sort_unstable();
        DegreeSequences {
            out_sorted,
            in_sorted,
        }
    }

    /// `N⁺(A)` or `N⁻(A)`: the union of the neighbourhoods of `set`.
    pub fn neighborhood(&self, set: &[usize], dir: Direction) -> Result<BTreeSet<usize>> {
        let mut out = BTreeSet::new();
        for &v in set {
            check_vertex(v, self.n)?;
            out.extend(self.neighbors(v, dir).iter().copied());
        }
        Ok(out)
    }

    /// `G[A]`, relabelled so that the i-th smallest vertex of `A` becomes `i`.
    pub fn induced_subdigraph(&self, set: &[usize]) -> Result<Digraph> {
        let mut keep: Vec<usize> = set.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut label = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            check_vertex(v, self.n)?;
            label[v] = i;
        }
        let out_adj = keep
            .iter()
            .map(|&v| {
                self.out_adj[v]
                    .iter()
                    .filter_map(|&w| (label[w] != usize::MAX).then_some(label[w]))
                    .collect()
            })
            .collect();
        Ok(Digraph::from_sorted_out(keep.len(), out_adj))
    }

    /// `G \ A`, relabelled like [`Digraph::induced_subdigraph`] on the complement.
    pub fn remove_vertices(&self, set: &[usize]) -> Result<Digraph> {
        let mut drop = vec![false; self.n];
        for &v in set {
            check_vertex(v, self.n)?;
            drop[v] = true;
        }
        let keep: Vec<usize> = (0..self.n).filter(|&v| !drop[v]).collect();
        self.induced_subdigraph(&keep)
    }

    /// The digraph with every edge reversed.
    pub fn reverse(&self) -> Digraph {
        Digraph {
            n: self.n,
            out_adj: self.in_adj.clone(),
            in_adj: self.out_adj.clone(),
            edge_count: self.edge_count,
        }
    }

    /// Vertices reachable from `start`, optionally skipping `blocked` ones.
    pub fn reachable(&self, start: usize, dir: Direction, blocked: Option<&[bool]>) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v, dir) {
                if !seen[w] && !blocked.is_some_and(|b| b[w]) {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Strong connectivity of the digraph after deleting `removed`.
    /// Digraphs with at most one remaining vertex count as strongly connected.
    pub fn is_strongly_connected_without(&self, removed: &[bool]) -> bool {
        let Some(start) = (0..self.n).find(|&v| !removed[v]) else {
            return true;
        };
        let fwd = self.reachable(start, Direction::Out, Some(removed));
        let bwd = self.reachable(start, Direction::In, Some(removed));
        (0..self.n).all(|v| removed[v] || (fwd[v] && bwd[v]))
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.is_strongly_connected_without(&vec![false; self.n])
    }

    /// Strongly connected components in topological order of the
    /// condensation (sources first).
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        // iterative Kosaraju: finish order on G, then sweep G reversed
        let n = self.n;
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![(s, 0usize)];
            while let Some((v, i)) = stack.last_mut() {
                let v = *v;
                if let Some(&w) = self.out_adj[v].get(*i) {
                    *i += 1;
                    if !seen[w] {
                        seen[w] = true;
                        stack.push((w, 0));
                    }
                } else {
                    order.push(v);
                    stack.pop();
                }
            }
        }
        let mut comp = vec![usize::MAX; n];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for &s in order.iter().rev() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &self.in_adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        comps
    }

    /// Out-neighbourhood bitmasks; only for `n ≤ 64`.
    pub(crate) fn out_masks(&self) -> Vec<u64> {
        assert!(self.n <= 64);
        self.out_adj
            .iter()
            .map(|l| l.iter().fold(0u64, |m, &v| m | (1 << v)))
            .collect()
    }

    pub(crate) fn in_masks(&self) -> Vec<u64> {
        assert!(self.n <= 64);
        self.in_adj
            .iter()
            .map(|l| l.iter().fold(0u64, |m, &v| m | (1 << v)))
            .collect()
    }
}

pub(crate) fn check_vertex(v: usize, n: usize) -> Result<()> {
    if v >= n {
        Err(Error::VertexOutOfRange { vertex: v, n })
    } else {
        Ok(())
    }
}

/// Sorted out- and in-degree sequences.
///
/// Storage is 0-based; [`DegreeSequences::out_at`] and
/// [`DegreeSequences::in_at`] take the 1-based index `i` of `d_i` and are the
/// only place where the two conventions meet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSequences {
    pub out_sorted: Vec<usize>,
    pub in_sorted: Vec<usize>,
}

impl DegreeSequences {
    pub fn n(&self) -> usize {
        self.out_sorted.len()
    }

    /// `d_i⁺` for `1 ≤ i ≤ n`, `None` outside that range.
    pub fn out_at(&self, i: i64) -> Option<usize> {
        Self::at(&self.out_sorted, i)
    }

    /// `d_i⁻` for `1 ≤ i ≤ n`, `None` outside that range.
    pub fn in_at(&self, i: i64) -> Option<usize> {
        Self::at(&self.in_sorted, i)
    }

    pub fn at_dir(&self, dir: Direction, i: i64) -> Option<usize> {
        match dir {
            Direction::Out => self.out_at(i),
            Direction::In => self.in_at(i),
        }
    }

    fn at(seq: &[usize], i: i64) -> Option<usize> {
        if i >= 1 && (i as usize) <= seq.len() {
            Some(seq[i as usize - 1])
        } else {
            None
        }
    }
}

/// A claimed Hamilton cycle, listed in cyclic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamiltonCertificate {
    pub order: Vec<usize>,
}

impl HamiltonCertificate {
    pub fn new(order: Vec<usize>) -> Self {
        HamiltonCertificate { order }
    }
}

/// Checks that `cert` lists every vertex once and that all `n` cyclic edges
/// exist in `g`.
pub fn verify_hamilton_cycle(g: &Digraph, cert: &HamiltonCertificate) -> Result<bool> {
    let n = g.n();
    if cert.order.len() != n {
        return Err(Error::MalformedCertificate(format!(
            "order has length {} but the digraph has {n} vertices",
            cert.order.len()
        )));
    }
    if n == 0 {
        return Ok(false);
    }
    let mut seen = vec![false; n];
    for &v in &cert.order {
        if v >= n || seen[v] {
            return Ok(false);
        }
        seen[v] = true;
    }
    Ok((0..n).all(|i| g.has_edge(cert.order[i], cert.order[(i + 1) % n])))
}
