use crate::error::{Error, Result};

/// Bipartite graph with classes `A = [0, a_size)` and `B = [0, b_size)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    a_size: usize,
    b_size: usize,
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl BipartiteGraph {
    pub fn new(
        a_size: usize,
        b_size: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut adj = vec![Vec::new(); a_size];
        for (a, b) in edges {
            if a >= a_size {
                return Err(Error::VertexOutOfRange { vertex: a, n: a_size });
            }
            if b >= b_size {
                return Err(Error::VertexOutOfRange { vertex: b, n: b_size });
            }
            adj[a].push(b);
        }
        for (a, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("duplicate pair ({a}, {})", w[0])));
            }
        }
        Ok(Self::from_sorted(a_size, b_size, adj))
    }

    /// Caller guarantees sorted duplicate-free lists with entries `< b_size`.
    pub(crate) fn from_sorted(a_size: usize, b_size: usize, adj: Vec<Vec<usize>>) -> Self {
        let edge_count = adj.iter().map(Vec::len).sum();
        BipartiteGraph {
            a_size,
            b_size,
            adj,
            edge_count,
        }
    }

    pub fn complete(a_size: usize, b_size: usize) -> Self {
        Self::from_sorted(a_size, b_size, vec![(0..b_size).collect(); a_size])
    }

    pub fn a_size(&self) -> usize {
        self.a_size
    }

    pub fn b_size(&self) -> usize {
        self.b_size
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, a: usize) -> &[usize] {
        &self.adj[a]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, l)| l.iter().map(move |&b| (a, b)))
    }

    /// B-side degrees.
    pub fn b_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.b_size];
        for l in &self.adj {
            for &b in l {
                deg[b] += 1;
            }
        }
        deg
    }

    /// `|N(S)|` for `S ⊆ A` given as a list.
    pub fn neighborhood_size(&self, set: &[usize]) -> usize {
        let mut seen = vec![false; self.b_size];
        let mut count = 0;
        for &a in set {
            for &b in &self.adj[a] {
                if !seen[b] {
                    seen[b] = true;
                    count += 1;
                }
            }
        }
        count
    }
}
