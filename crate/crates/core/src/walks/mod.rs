//! Shifted walks with respect to a reduced digraph `R` and a 1-factor `F`,
//! the shifted digraph `H`, and the decomposition of `H` into shifted
//! components.

mod components;
mod disjoint;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::digraph::{Digraph, OneFactor};
use crate::error::{Error, Result};

pub use components::{
    decompose_components, verify_decomposition_bounds, BoundCheck, ComponentDecomposition,
    DecompositionReport,
};
pub use disjoint::disjoint_shifted_walks;

/// `X₁ C₁ X₁⁻ X₂ … X_t C_t X_t⁻ X_{t+1}`, stored by its entrance clusters
/// `X₁, …, X_{t+1}`; everything else follows from `F`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShiftedWalk {
    pub entrances: Vec<usize>,
}

impl ShiftedWalk {
    /// The walk `a` with `t = 0`.
    pub fn trivial(a: usize) -> Self {
        ShiftedWalk { entrances: vec![a] }
    }

    /// From an `H`-path `a = X₁, …, X_{t+1} = b`.
    pub fn from_h_path(path: Vec<usize>) -> Result<Self> {
        if path.is_empty() {
            return Err(Error::Parameter("a shifted walk needs a start cluster".into()));
        }
        Ok(ShiftedWalk { entrances: path })
    }

    pub fn start(&self) -> usize {
        self.entrances[0]
    }

    pub fn end(&self) -> usize {
        *self.entrances.last().expect("non-empty")
    }

    /// Number of cycles traversed.
    pub fn t(&self) -> usize {
        self.entrances.len() - 1
    }

    /// `X₁⁻, …, X_t⁻`.
    pub fn exits(&self, f: &OneFactor) -> Vec<usize> {
        self.entrances[..self.t()].iter().map(|&x| f.predecessor(x)).collect()
    }

    /// The full cluster sequence, each cycle walked from `X_i` round to `X_i⁻`.
    pub fn clusters(&self, f: &OneFactor) -> Vec<usize> {
        let mut out = Vec::new();
        for &x in &self.entrances[..self.t()] {
            let mut v = x;
            loop {
                out.push(v);
                if f.successor(v) == x {
                    break;
                }
                v = f.successor(v);
            }
        }
        out.push(self.end());
        out
    }

    /// Checks that every connecting edge `X_i⁻ X_{i+1}` lies in `r`.
    pub fn validate(&self, r: &Digraph, f: &OneFactor) -> Result<()> {
        if f.n() != r.n() {
            return Err(Error::Parameter(format!(
                "factor on {} vertices, digraph on {}",
                f.n(),
                r.n()
            )));
        }
        if let Some(&x) = self.entrances.iter().find(|&&x| x >= r.n()) {
            return Err(Error::VertexOutOfRange { vertex: x, n: r.n() });
        }
        for w in self.entrances.windows(2) {
            let exit = f.predecessor(w[0]);
            if !r.has_edge(exit, w[1]) {
                return Err(Error::contract(
                    format!("connecting edge {exit}->{} missing", w[1]),
                    Some(vec![exit, w[1]]),
                ));
            }
        }
        Ok(())
    }

    /// `self` followed by `other`; the end of `self` must be the start of `other`.
    pub fn concat(&self, other: &ShiftedWalk) -> Result<ShiftedWalk> {
        if self.end() != other.start() {
            return Err(Error::Parameter(format!(
                "cannot join a walk ending at {} to one starting at {}",
                self.end(),
                other.start()
            )));
        }
        let mut entrances = self.entrances.clone();
        entrances.extend_from_slice(&other.entrances[1..]);
        Ok(ShiftedWalk { entrances })
    }
}

/// `a → b` in `H` iff `a⁻ → b` in `r`; loops are dropped.
pub fn build_h(r: &Digraph, f: &OneFactor) -> Result<Digraph> {
    if f.n() != r.n() {
        return Err(Error::Parameter(format!(
            "factor on {} vertices, digraph on {}",
            f.n(),
            r.n()
        )));
    }
    let out = (0..r.n())
        .map(|a| {
            r.out_neighbors(f.predecessor(a))
                .iter()
                .copied()
                .filter(|&b| b != a)
                .collect()
        })
        .collect();
    Ok(Digraph::from_sorted_out(r.n(), out))
}

/// The `r` whose shifted digraph is `h`: `a⁻ → b` for every `a → b` in `h`.
/// Fails if some `h`-edge `a → a⁻` would need a loop.
pub fn unshift(h: &Digraph, f: &OneFactor) -> Result<Digraph> {
    if f.n() != h.n() {
        return Err(Error::Parameter(format!(
            "factor on {} vertices, digraph on {}",
            f.n(),
            h.n()
        )));
    }
    Digraph::new(h.n(), h.edges().map(|(a, b)| (f.predecessor(a), b)))
}

/// Shortest walk (fewest traversed cycles) from `a` to `b` in the shifted
/// digraph `h`, never internally using a cluster in `forbidden`.
pub fn find_shifted_walk_in(
    h: &Digraph,
    f: &OneFactor,
    a: usize,
    b: usize,
    forbidden: &[usize],
) -> Result<ShiftedWalk> {
    let k = h.n();
    for &v in [a, b].iter().chain(forbidden) {
        if v >= k {
            return Err(Error::VertexOutOfRange { vertex: v, n: k });
        }
    }
    let mut blocked = vec![false; k];
    for &v in forbidden {
        blocked[v] = true;
    }
    if blocked[a] || blocked[b] {
        return Err(Error::precondition("forbidden set contains an endpoint"));
    }
    if a == b {
        return Ok(ShiftedWalk::trivial(a));
    }
    // an intermediate X_i is internally used both as an entrance and, via
    // X_i⁻, as an exit
    let usable = |v: usize| !blocked[v] && !blocked[f.predecessor(v)];
    let mut parent = vec![usize::MAX; k];
    parent[a] = a;
    let mut queue = VecDeque::from([a]);
    while let Some(v) = queue.pop_front() {
        for &w in h.out_neighbors(v) {
            if parent[w] != usize::MAX {
                continue;
            }
            if w == b {
                parent[w] = v;
                let mut path = vec![b];
                let mut x = b;
                while x != a {
                    x = parent[x];
                    path.push(x);
                }
                path.reverse();
                return ShiftedWalk::from_h_path(path);
            }
            if usable(w) {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    Err(Error::Unreachable(format!("no shifted walk from {a} to {b}")))
}

pub fn find_shifted_walk(
    r: &Digraph,
    f: &OneFactor,
    a: usize,
    b: usize,
    forbidden: &[usize],
) -> Result<ShiftedWalk> {
    find_shifted_walk_in(&build_h(r, f)?, f, a, b, forbidden)
}

/// Removes repeated entrances and repeated exits by cutting out the segment
/// between the two occurrences; a closed walk collapses to its start.
pub fn shorten_walk(w: &ShiftedWalk) -> ShiftedWalk {
    if w.start() == w.end() {
        return ShiftedWalk::trivial(w.start());
    }
    let mut e = w.entrances.clone();
    // entrances are e[1..=t], exits are the predecessors of e[0..t], so a
    // repeat e[i] = e[j] (i < j) is removable when i >= 1 or j < t
    'outer: loop {
        let t = e.len() - 1;
        for i in 0..t {
            if let Some(j) = (i + 1..=t).rev().find(|&j| e[j] == e[i] && (i >= 1 || j < t)) {
                e.drain(i + 1..=j);
                continue 'outer;
            }
        }
        break;
    }
    ShiftedWalk { entrances: e }
}

/// Per-cluster usage counts of a collection of walks.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkUsage {
    pub uses: Vec<usize>,
    pub internal_uses: Vec<usize>,
    pub entrance_uses: Vec<usize>,
    pub exit_uses: Vec<usize>,
    /// Non-`F` edges ending at the cluster.
    pub entered: Vec<usize>,
    /// Non-`F` edges starting at the cluster.
    pub exited: Vec<usize>,
}

impl WalkUsage {
    pub fn zeros(k: usize) -> Self {
        WalkUsage {
            uses: vec![0; k],
            internal_uses: vec![0; k],
            entrance_uses: vec![0; k],
            exit_uses: vec![0; k],
            entered: vec![0; k],
            exited: vec![0; k],
        }
    }

    pub fn total_uses(&self) -> usize {
        self.uses.iter().sum()
    }

    pub fn add(&mut self, other: &WalkUsage) {
        let pairs = [
            (&mut self.uses, &other.uses),
            (&mut self.internal_uses, &other.internal_uses),
            (&mut self.entrance_uses, &other.entrance_uses),
            (&mut self.exit_uses, &other.exit_uses),
            (&mut self.entered, &other.entered),
            (&mut self.exited, &other.exited),
        ];
        for (mine, theirs) in pairs {
            for (a, b) in mine.iter_mut().zip(theirs) {
                *a += b;
            }
        }
    }

    fn record(&mut self, w: &ShiftedWalk, f: &OneFactor) {
        let t = w.t();
        let e = &w.entrances;
        for i in 0..t {
            let exit = f.predecessor(e[i]);
            let next = e[i + 1];
            self.exit_uses[exit] += 1;
            self.entrance_uses[next] += 1;
            self.uses[exit] += 1;
            self.uses[next] += 1;
            if i >= 1 {
                self.internal_uses[exit] += 1;
            }
            if i + 1 < t {
                self.internal_uses[next] += 1;
            }
            if f.successor(exit) != next {
                self.exited[exit] += 1;
                self.entered[next] += 1;
            }
        }
    }
}

pub fn account(walks: &[ShiftedWalk], f: &OneFactor) -> WalkUsage {
    let mut usage = WalkUsage::zeros(f.n());
    for w in walks {
        usage.record(w, f);
    }
    usage
}
