use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{certify_regular, check_eps, ClusterPartition, CertifyMode, Pair};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::rational::{self, ceil_sqrt, int, Rational};

/// Cluster digraph: `i → j` iff the pair `(V_i, V_j)` has density at least
/// `d` and was certified ε-regular.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedDigraph {
    pub base: Digraph,
    #[serde(with = "matrix_str")]
    pub densities: Vec<Vec<Rational>>,
    /// `Some(verdict)` for pairs dense enough to be certified.
    pub certified: Vec<Vec<Option<bool>>>,
    /// Whether every certification was exhaustive (hence exact).
    pub exact: bool,
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    #[serde(with = "rational::serde_str")]
    pub d: Rational,
}

mod matrix_str {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::rational::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(m: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(format_rational).collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        rows.iter()
            .map(|r| {
                r.iter()
                    .map(|x| parse_rational(x).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

impl ReducedDigraph {
    pub fn k(&self) -> usize {
        self.base.n()
    }

    pub fn density(&self, i: usize, j: usize) -> Rational {
        self.densities[i][j]
    }
}

/// Exact densities of all ordered cluster pairs (diagonal zero).
pub fn pair_densities(g: &Digraph, part: &ClusterPartition) -> Vec<Vec<Rational>> {
    let k = part.k();
    let m = part.m();
    let cluster_of = part.cluster_of();
    let mut counts = vec![vec![0usize; k]; k];
    for (u, v) in g.edges() {
        if let (Some(i), Some(j)) = (cluster_of[u], cluster_of[v]) {
            if i != j {
                counts[i][j] += 1;
            }
        }
    }
    let area = (m * m).max(1) as i64;
    counts
        .iter()
        .map(|row| row.iter().map(|&c| Rational::new(c as i64, area)).collect())
        .collect()
}

/// Densities are exact. Certification is exhaustive for `m ≤ 12` and sampled
/// (seeded per pair) otherwise.
pub fn build_reduced(
    g: &Digraph,
    part: &ClusterPartition,
    eps: Rational,
    d: Rational,
    seed: u64,
) -> Result<ReducedDigraph> {
    check_eps(&eps)?;
    if part.n() != g.n() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} vertices, digraph has {}",
            part.n(),
            g.n()
        )));
    }
    let k = part.k();
    let m = part.m();
    let densities = pair_densities(g, part);
    let jobs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && m > 0 && densities[i][j] >= d)
        .collect();
    let verdicts: Vec<Result<(usize, usize, bool, bool)>> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let p = Pair::new(g, part.clusters[i].clone(), part.clusters[j].clone())?;
            let mode = CertifyMode::auto(m, m, seed ^ ((i * k + j) as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let v = certify_regular(&p, eps, mode)?;
            Ok((i, j, v.regular, mode.is_exhaustive()))
        })
        .collect();
    let mut certified = vec![vec![None; k]; k];
    let mut exact = true;
    let mut out_adj = vec![Vec::new(); k];
    for v in verdicts {
        let (i, j, regular, exhaustive) = v?;
        certified[i][j] = Some(regular);
        exact &= exhaustive;
        if regular {
            out_adj[i].push(j);
        }
    }
    for l in &mut out_adj {
        l.sort_unstable();
    }
    Ok(ReducedDigraph {
        base: Digraph::from_sorted_out(k, out_adj),
        densities,
        certified,
        exact,
        epsilon: eps,
        d,
    })
}

/// `G″`: `g` without the edges of cluster pairs whose density (taken from
/// `keep_above`'s source) is at most `d′`. Edges touching `V₀` and edges
/// inside a cluster are kept.
pub struct PrunedView<'a> {
    g: &'a Digraph,
    cluster_of: Vec<Option<usize>>,
    keep: Vec<Vec<bool>>,
}

impl<'a> PrunedView<'a> {
    pub fn new(g: &'a Digraph, part: &ClusterPartition, densities: &[Vec<Rational>], dprime: Rational) -> Self {
        let keep = densities
            .iter()
            .map(|row| row.iter().map(|x| *x > dprime).collect())
            .collect();
        PrunedView {
            g,
            cluster_of: part.cluster_of(),
            keep,
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.g.has_edge(u, v) && self.keeps(u, v)
    }

    fn keeps(&self, u: usize, v: usize) -> bool {
        match (self.cluster_of[u], self.cluster_of[v]) {
            (Some(i), Some(j)) if i != j => self.keep[i][j],
            _ => true,
        }
    }

    /// Whether the pair `(i, j)` survives.
    pub fn keeps_pair(&self, i: usize, j: usize) -> bool {
        self.keep[i][j]
    }

    pub fn out_neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.g.out_neighbors(u).iter().copied().filter(move |&v| self.keeps(u, v))
    }

    pub fn in_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.g.in_neighbors(v).iter().copied().filter(move |&u| self.keeps(u, v))
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.out_neighbors(u).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_neighbors(v).count()
    }

    /// Materializes the view.
    pub fn to_digraph(&self) -> Digraph {
        let out = (0..self.g.n()).map(|u| self.out_neighbors(u).collect()).collect();
        Digraph::from_sorted_out(self.g.n(), out)
    }
}

/// Per-vertex typicality data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Typicality {
    pub vertex: usize,
    pub cluster: usize,
    /// Clusters `Y` with `x`'s out-degree into `Y` outside the window.
    pub bad_out: usize,
    pub bad_in: usize,
    /// `d^±_{G″}(x) ≥ d^±_G(x) − 4d′n` in both directions.
    pub degrees_ok: bool,
    pub typical: bool,
}

/// `window` is the relative slack `w` in `(1 ± w)·d_{XY}·m`.
fn typicality(
    g: &Digraph,
    part: &ClusterPartition,
    view: &PrunedView<'_>,
    densities: &[Vec<Rational>],
    eps: Rational,
    dprime: Rational,
    window: Rational,
) -> Vec<Vec<Typicality>> {
    let k = part.k();
    let m = int(part.m());
    let cluster_of = part.cluster_of();
    let loss = Rational::from_integer(4) * dprime * int(g.n());
    let one = Rational::from_integer(1);
    // count ≤ √ε·k  ⇔  count² ≤ ε·k²
    let few = |c: usize| int(c * c) <= eps * int(k * k);
    let in_window = |count: usize, dens: Rational| {
        let c = int(count);
        c >= (one - window) * dens * m && c <= (one + window) * dens * m
    };
    part.clusters
        .par_iter()
        .enumerate()
        .map(|(x_idx, cluster)| {
            cluster
                .iter()
                .map(|&x| {
                    let mut out_counts = vec![0usize; k];
                    let mut in_counts = vec![0usize; k];
                    for y in view.out_neighbors(x) {
                        if let Some(c) = cluster_of[y] {
                            out_counts[c] += 1;
                        }
                    }
                    for y in view.in_neighbors(x) {
                        if let Some(c) = cluster_of[y] {
                            in_counts[c] += 1;
                        }
                    }
                    let live = |i: usize, j: usize| view.keeps_pair(i, j);
                    let bad_out = (0..k)
                        .filter(|&y| y != x_idx && live(x_idx, y) && !in_window(out_counts[y], densities[x_idx][y]))
                        .count();
                    let bad_in = (0..k)
                        .filter(|&y| y != x_idx && live(y, x_idx) && !in_window(in_counts[y], densities[y][x_idx]))
                        .count();
                    let degrees_ok = int(view.out_degree(x)) >= int(g.out_degree(x)) - loss
                        && int(view.in_degree(x)) >= int(g.in_degree(x)) - loss;
                    Typicality {
                        vertex: x,
                        cluster: x_idx,
                        bad_out,
                        bad_in,
                        degrees_ok,
                        typical: degrees_ok && few(bad_out) && few(bad_in),
                    }
                })
                .collect()
        })
        .collect()
}

/// Atypical vertices of each cluster, measured with the `(1 ± 1/3)` window
/// against the densities stored in `r`.
pub fn atypical_vertices(
    g: &Digraph,
    part: &ClusterPartition,
    r: &ReducedDigraph,
    eps: Rational,
    dprime: Rational,
) -> Result<Vec<Vec<usize>>> {
    check_eps(&eps)?;
    let view = PrunedView::new(g, part, &r.densities, dprime);
    Ok(typicality(g, part, &view, &r.densities, eps, dprime, Rational::new(1, 3))
        .into_iter()
        .map(|c| c.into_iter().filter(|t| !t.typical).map(|t| t.vertex).collect())
        .collect())
}

/// Number of vertices moved per cluster: `⌈16√ε·m⌉`.
pub fn prune_count(eps: Rational, m: usize) -> usize {
    ceil_sqrt(&(Rational::from_integer(256) * eps * int(m * m))) as usize
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneOutcome {
    pub partition_v0: Vec<usize>,
    pub partition_clusters: Vec<Vec<usize>>,
    pub atypical: Vec<Vec<usize>>,
    pub removed: Vec<Vec<usize>>,
}

/// Moves exactly `⌈16√ε·m⌉` vertices from each cluster into `V₀`, atypical
/// ones first (most typicality failures first), then checks with
/// [`typicality_audit`] that every remaining vertex is typical.
pub fn prune_atypical(
    g: &Digraph,
    part: &ClusterPartition,
    r: &ReducedDigraph,
    eps: Rational,
    dprime: Rational,
) -> Result<(ClusterPartition, PruneOutcome)> {
    check_eps(&eps)?;
    let m = part.m();
    let count = prune_count(eps, m);
    if count > m {
        return Err(Error::Parameter(format!(
            "16*sqrt(eps)*m = {count} exceeds the cluster size {m}"
        )));
    }
    let view = PrunedView::new(g, part, &r.densities, dprime);
    let info = typicality(g, part, &view, &r.densities, eps, dprime, Rational::new(1, 3));
    let mut removed = Vec::with_capacity(part.k());
    let mut atypical = Vec::with_capacity(part.k());
    for (i, cluster) in info.iter().enumerate() {
        let bad: Vec<usize> = cluster.iter().filter(|t| !t.typical).map(|t| t.vertex).collect();
        if bad.len() > count {
            return Err(Error::contract(
                format!(
                    "cluster {i} has {} atypical vertices, more than the {count} allowed",
                    bad.len()
                ),
                Some(bad),
            ));
        }
        let mut order: Vec<&Typicality> = cluster.iter().collect();
        order.sort_by_key(|t| (t.typical, std::cmp::Reverse(t.bad_out + t.bad_in), t.vertex));
        removed.push(order[..count].iter().map(|t| t.vertex).collect::<Vec<_>>());
        atypical.push(bad);
    }
    let pruned = part.move_to_exceptional(&removed)?;
    let failures = typicality_audit(g, &pruned, r, eps, dprime)?;
    if !failures.is_empty() {
        return Err(Error::contract(
            format!("{} vertices fail the post-pruning typicality audit", failures.len()),
            Some(failures),
        ));
    }
    let outcome = PruneOutcome {
        partition_v0: pruned.v0.clone(),
        partition_clusters: pruned.clusters.clone(),
        atypical,
        removed,
    };
    Ok((pruned, outcome))
}

/// Vertices of `pruned` failing typicality: the deleted pairs are those of
/// `r` (density at most `d′`), the window is `(1 ± 1/2)` around densities
/// recomputed on `pruned`.
pub fn typicality_audit(
    g: &Digraph,
    pruned: &ClusterPartition,
    r: &ReducedDigraph,
    eps: Rational,
    dprime: Rational,
) -> Result<Vec<usize>> {
    check_eps(&eps)?;
    let view = PrunedView::new(g, pruned, &r.densities, dprime);
    // densities of G″ on the shrunken clusters
    let mut dens = pair_densities(g, pruned);
    for (i, row) in dens.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            if !view.keeps_pair(i, j) {
                *x = Rational::from_integer(0);
            }
        }
    }
    Ok(typicality(g, pruned, &view, &dens, eps, dprime, Rational::new(1, 2))
        .into_iter()
        .flatten()
        .filter(|t| !t.typical)
        .map(|t| t.vertex)
        .collect())
}
