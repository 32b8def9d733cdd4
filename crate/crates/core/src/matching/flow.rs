//! Vertex-capacitated flows: internally disjoint paths, local and global
//! strong connectivity, minimum separators.

use std::collections::VecDeque;

use crate::digraph::Digraph;

const INF: u32 = u32::MAX / 2;

/// Residual network of the split digraph: vertex `v` becomes `2v` (in) and
/// `2v + 1` (out) joined by a unit arc.
struct SplitNetwork {
    head: Vec<usize>,
    cap: Vec<u32>,
    adj: Vec<Vec<usize>>,
}

impl SplitNetwork {
    fn new(g: &Digraph, x: usize, y: usize) -> Self {
        let n = g.n();
        let mut net = SplitNetwork {
            head: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); 2 * n],
        };
        for v in 0..n {
            let c = if v == x || v == y { INF } else { 1 };
            net.arc(2 * v, 2 * v + 1, c);
        }
        for (u, v) in g.edges() {
            // the direct x→y edge carries one path; every other arc is
            // uncuttable so that minimum cuts consist of vertices
            let c = if u == x && v == y { 1 } else { INF };
            net.arc(2 * u + 1, 2 * v, c);
        }
        net
    }

    fn arc(&mut self, from: usize, to: usize, cap: u32) {
        self.adj[from].push(self.head.len());
        self.head.push(to);
        self.cap.push(cap);
        self.adj[to].push(self.head.len());
        self.head.push(from);
        self.cap.push(0);
    }

    /// One BFS augmentation of a single unit; returns false when saturated.
    fn augment(&mut self, s: usize, t: usize) -> bool {
        let mut parent = vec![usize::MAX; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                let w = self.head[e];
                if self.cap[e] > 0 && !seen[w] {
                    seen[w] = true;
                    parent[w] = e;
                    if w == t {
                        let mut cur = t;
                        while cur != s {
                            let e = parent[cur];
                            self.cap[e] -= 1;
                            self.cap[e ^ 1] += 1;
                            cur = self.head[e ^ 1];
                        }
                        return true;
                    }
                    queue.push_back(w);
                }
            }
        }
        false
    }

    fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                let w = self.head[e];
                if self.cap[e] > 0 && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Flow on a forward arc `e` (even index).
    fn flow(&self, e: usize) -> u32 {
        self.cap[e ^ 1]
    }
}

fn max_flow(g: &Digraph, x: usize, y: usize, limit: usize) -> (SplitNetwork, usize) {
    let mut net = SplitNetwork::new(g, x, y);
    let mut value = 0;
    while value < limit && net.augment(2 * x + 1, 2 * y) {
        value += 1;
    }
    (net, value)
}

/// Up to `count` internally disjoint `x → y` paths; fewer when fewer exist.
pub fn internally_disjoint_paths(g: &Digraph, x: usize, y: usize, count: usize) -> Vec<Vec<usize>> {
    assert_ne!(x, y, "paths need distinct endpoints");
    let (mut net, value) = max_flow(g, x, y, count);
    let mut paths = Vec::with_capacity(value);
    for _ in 0..value {
        let mut path = vec![x];
        let mut v = x;
        while v != y {
            // follow any out-arc of v_out still carrying flow
            let node = 2 * v + 1;
            let e = net.adj[node]
                .iter()
                .copied()
                .find(|&e| e % 2 == 0 && net.flow(e) > 0)
                .expect("flow conservation");
            net.cap[e ^ 1] -= 1;
            net.cap[e] += 1;
            v = net.head[e] / 2;
            path.push(v);
        }
        paths.push(path);
    }
    paths
}

/// Maximum number of internally disjoint `x → y` paths, capped at `limit`.
pub fn local_connectivity(g: &Digraph, x: usize, y: usize, limit: usize) -> usize {
    max_flow(g, x, y, limit).1
}

/// A minimum vertex set separating `y` from `x` (`x → y` must not be an edge).
fn min_vertex_cut(g: &Digraph, x: usize, y: usize) -> Vec<usize> {
    let (net, _) = max_flow(g, x, y, usize::MAX);
    let reach = net.residual_reachable(2 * x + 1);
    (0..g.n())
        .filter(|&v| v != x && v != y && reach[2 * v] && !reach[2 * v + 1])
        .collect()
}

pub fn is_strongly_connected(g: &Digraph) -> bool {
    g.is_strongly_connected()
}

/// Smallest non-adjacent ordered pair attaining the minimum local
/// connectivity, or `None` for complete digraphs.
fn weakest_pair(g: &Digraph) -> Option<(usize, usize, usize)> {
    let n = g.n();
    let mut best: Option<(usize, usize, usize)> = None;
    for x in 0..n {
        for y in 0..n {
            if x == y || g.has_edge(x, y) {
                continue;
            }
            let cap = best.map_or(n, |b| b.0);
            let k = local_connectivity(g, x, y, cap);
            if best.is_none_or(|b| k < b.0) {
                best = Some((k, x, y));
                if k == 0 {
                    return best;
                }
            }
        }
    }
    best
}

/// Largest `k` such that `g` is strongly `k`-connected; `n − 1` for complete
/// digraphs, `0` when `g` is not strongly connected or has at most one vertex.
pub fn strong_connectivity(g: &Digraph) -> usize {
    let n = g.n();
    if n <= 1 {
        return 0;
    }
    if !g.is_strongly_connected() {
        return 0;
    }
    match weakest_pair(g) {
        None => n - 1,
        Some((k, _, _)) => k.min(n - 1),
    }
}

/// A separator of size `< k`, if one exists. The empty set is returned when
/// `g` is not strongly connected.
pub fn find_separator(g: &Digraph, k: usize) -> Option<Vec<usize>> {
    if !g.is_strongly_connected() {
        return (k > 0).then(Vec::new);
    }
    let (kappa, x, y) = weakest_pair(g)?;
    (kappa < k).then(|| min_vertex_cut(g, x, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_paths() {
        let g = Digraph::complete(5);
        let paths = internally_disjoint_paths(&g, 0, 1, 4);
        assert_eq!(paths.len(), 4);
        assert!(paths.contains(&vec![0, 1]));
        let mut inner: Vec<usize> = paths.iter().flat_map(|p| p[1..p.len() - 1].to_vec()).collect();
        inner.sort_unstable();
        assert_eq!(inner, vec![2, 3, 4]);
    }

    #[test]
    fn path_graph_single_path() {
        let g = Digraph::path(5);
        assert_eq!(internally_disjoint_paths(&g, 0, 4, 2), vec![vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn connectivity_values() {
        assert_eq!(strong_connectivity(&Digraph::cycle(7)), 1);
        assert_eq!(strong_connectivity(&Digraph::complete(6)), 5);
        assert_eq!(strong_connectivity(&Digraph::path(4)), 0);
        assert_eq!(find_separator(&Digraph::path(4), 1), Some(vec![]));
        assert_eq!(find_separator(&Digraph::complete(6), 10), None);
    }

    #[test]
    fn blobs_joined_by_a_cut_vertex() {
        // {0,1,2} and {4,5,6} complete, both complete to/from vertex 3
        let mut edges = Vec::new();
        for blob in [[0, 1, 2, 3], [3, 4, 5, 6]] {
            for &u in &blob {
                for &v in &blob {
                    if u != v && !edges.contains(&(u, v)) {
                        edges.push((u, v));
                    }
                }
            }
        }
        let g = Digraph::new(7, edges).unwrap();
        assert_eq!(strong_connectivity(&g), 1);
        assert_eq!(find_separator(&g, 2), Some(vec![3]));
        assert_eq!(find_separator(&g, 1), None);
    }
}
