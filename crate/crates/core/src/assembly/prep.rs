use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{sub_seed, AssemblyParams};
use crate::digraph::{Digraph, OneFactor};
use crate::error::{Error, Result};
use crate::regular::{
    audit_ideal, certify_super_regular, select_ideal, ClusterPartition, CertifyMode, Ideal,
    IdealAudit, Pair,
};

/// Ideals of the `F`-pairs and the reserved sets `X*`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReservedIdeals {
    /// `pairs[X]` is the ideal `(X₁, X₂⁺)` of `(X, X⁺)`.
    pub pairs: Vec<Ideal>,
    /// `star[X] = X₁ ∪ X₂`, where `X₂` comes from the ideal of `(X⁻, X)`.
    pub star: Vec<Vec<usize>>,
    /// Superset audits, one per `F`-pair; empty when auditing is off.
    pub audits: Vec<IdealAudit>,
}

impl ReservedIdeals {
    pub fn star_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in self.star.iter().flatten() {
            mask[v] = true;
        }
        mask
    }
}

pub(crate) fn check_shapes(part: &ClusterPartition, f: &OneFactor) -> Result<()> {
    if part.k() != f.n() {
        return Err(Error::Parameter(format!(
            "factor on {} clusters, partition has {}",
            f.n(),
            part.k()
        )));
    }
    Ok(())
}

/// Certifies every `F`-pair `(X, X⁺)` super-regular at `(ε, d)` and reserves
/// an ideal in each.
pub fn reserve_ideals(
    g: &Digraph,
    part: &ClusterPartition,
    f: &OneFactor,
    params: &AssemblyParams,
    seed: u64,
) -> Result<ReservedIdeals> {
    check_shapes(part, f)?;
    let k = part.k();
    let m = part.m();
    let mut pairs = Vec::with_capacity(k);
    let mut audits = Vec::new();
    for x in 0..k {
        let p = Pair::new(g, part.clusters[x].clone(), part.clusters[f.successor(x)].clone())?;
        let mode = CertifyMode::auto(m, m, sub_seed(seed, 1, x));
        let verdict = certify_super_regular(&p, params.eps, params.d, mode)?;
        if !verdict.super_regular {
            return Err(Error::Precondition {
                message: format!(
                    "F-pair ({x}, {}) is not ({}, {})-super-regular",
                    f.successor(x),
                    params.eps,
                    params.d
                ),
                witness: Some(vec![x, f.successor(x)]),
            });
        }
        let ideal = select_ideal(&p, params.theta, params.d, sub_seed(seed, 2, x))?;
        if params.ideal_supersets > 0 {
            audits.push(audit_ideal(
                &p,
                &ideal,
                params.eps,
                params.theta,
                params.d,
                params.ideal_supersets,
                sub_seed(seed, 3, x),
            )?);
        }
        pairs.push(ideal);
    }
    let star = (0..k)
        .map(|x| {
            let mut s: Vec<usize> = pairs[x]
                .a_star
                .iter()
                .chain(&pairs[f.predecessor(x)].b_star)
                .copied()
                .collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    Ok(ReservedIdeals { pairs, star, audits })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalEntry {
    pub x: usize,
    /// `x⁻ ∈ N⁻(x)`, lying in cluster `X`.
    pub x_minus: usize,
    pub x_cluster: usize,
    /// `x⁺ ∈ N⁺(x)`, lying in cluster `Y`.
    pub x_plus: usize,
    pub y_cluster: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalAssignment {
    pub entries: Vec<ExceptionalEntry>,
    /// Largest number of times a cluster may serve as some `X_i` or `Y_i`.
    pub cap: usize,
}

impl ExceptionalAssignment {
    pub fn validate(&self, g: &Digraph, part: &ClusterPartition, ideals: &ReservedIdeals) -> Result<()> {
        let cluster_of = part.cluster_of();
        let star = ideals.star_mask(g.n());
        let mut seen = vec![false; g.n()];
        let mut count = vec![0usize; part.k()];
        let mut xs: Vec<usize> = self.entries.iter().map(|e| e.x).collect();
        xs.sort_unstable();
        let mut v0 = part.v0.clone();
        v0.sort_unstable();
        if xs != v0 {
            return Err(Error::contract("assignment does not list V0 exactly once", None));
        }
        for e in &self.entries {
            let ok = g.has_edge(e.x_minus, e.x)
                && g.has_edge(e.x, e.x_plus)
                && cluster_of[e.x_minus] == Some(e.x_cluster)
                && cluster_of[e.x_plus] == Some(e.y_cluster)
                && !star[e.x_minus]
                && !star[e.x_plus];
            if !ok {
                return Err(Error::contract(format!("bad neighbours for {}", e.x), Some(vec![e.x])));
            }
            for v in [e.x_minus, e.x_plus] {
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::contract(format!("vertex {v} chosen twice"), Some(vec![v])));
                }
            }
            count[e.x_cluster] += 1;
            count[e.y_cluster] += 1;
        }
        if let Some(c) = count.iter().position(|&c| c > self.cap) {
            return Err(Error::contract(format!("cluster {c} over the cap {}", self.cap), Some(vec![c])));
        }
        Ok(())
    }
}

/// Greedy choice of `x⁻`, `x⁺` for each exceptional vertex in turn, skipping
/// used vertices, reserved ideal vertices and clusters at the `⌈m/60⌉` cap.
pub fn assign_exceptional(
    g: &Digraph,
    part: &ClusterPartition,
    ideals: &ReservedIdeals,
    seed: u64,
) -> Result<ExceptionalAssignment> {
    let n = g.n();
    let cap = part.m().div_ceil(60);
    let cluster_of = part.cluster_of();
    let star = ideals.star_mask(n);
    let mut used = vec![false; n];
    for &x in &part.v0 {
        used[x] = true;
    }
    let mut count = vec![0usize; part.k()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::with_capacity(part.v0.len());
    for &x in &part.v0 {
        let mut pick = |list: &[usize], used: &mut [bool], count: &mut [usize], side: &str| {
            let ok: Vec<usize> = list
                .iter()
                .copied()
                .filter(|&v| {
                    !used[v] && !star[v] && cluster_of[v].is_some_and(|c| count[c] < cap)
                })
                .collect();
            match ok.choose(&mut rng) {
                Some(&v) => {
                    used[v] = true;
                    let c = cluster_of[v].expect("clustered");
                    count[c] += 1;
                    Ok((v, c))
                }
                None => {
                    let exceptional = list.iter().filter(|&&v| cluster_of[v].is_none()).count();
                    let taken = list.iter().filter(|&&v| cluster_of[v].is_some() && used[v]).count();
                    let reserved = list.iter().filter(|&&v| !used[v] && star[v]).count();
                    let capped = list.len() - exceptional - taken - reserved;
                    Err(Error::contract(
                        format!(
                            "no available {side}-neighbour for {x}: {} neighbours, {exceptional} exceptional, \
                             {taken} already chosen, {reserved} reserved, {capped} in clusters at cap {cap}",
                            list.len()
                        ),
                        Some(vec![x]),
                    ))
                }
            }
        };
        let (x_minus, x_cluster) = pick(g.in_neighbors(x), &mut used, &mut count, "in")?;
        let (x_plus, y_cluster) = pick(g.out_neighbors(x), &mut used, &mut count, "out")?;
        entries.push(ExceptionalEntry {
            x,
            x_minus,
            x_cluster,
            x_plus,
            y_cluster,
        });
    }
    Ok(ExceptionalAssignment { entries, cap })
}
