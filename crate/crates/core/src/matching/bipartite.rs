use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::digraph::BipartiteGraph;
use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

/// A set of disjoint `(a, b)` pairs, sorted by `a`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Checks disjointness and that every pair is an edge of `b`.
    pub fn is_valid_in(&self, b: &BipartiteGraph) -> bool {
        let mut used_a = vec![false; b.a_size()];
        let mut used_b = vec![false; b.b_size()];
        self.pairs.iter().all(|&(x, y)| {
            let ok = x < b.a_size()
                && y < b.b_size()
                && !used_a[x]
                && !used_b[y]
                && b.has_edge(x, y);
            if ok {
                used_a[x] = true;
                used_b[y] = true;
            }
            ok
        })
    }
}

/// A vertex cover split by class.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Cover {
    pub a_side: Vec<usize>,
    pub b_side: Vec<usize>,
}

impl Cover {
    pub fn len(&self) -> usize {
        self.a_side.len() + self.b_side.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn covers(&self, b: &BipartiteGraph) -> bool {
        let mut in_a = vec![false; b.a_size()];
        let mut in_b = vec![false; b.b_size()];
        self.a_side.iter().for_each(|&x| in_a[x] = true);
        self.b_side.iter().for_each(|&y| in_b[y] = true);
        b.edges().all(|(x, y)| in_a[x] || in_b[y])
    }
}

/// Mate arrays from Hopcroft–Karp; `usize::MAX` marks unmatched vertices.
pub(crate) struct Mates {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl Mates {
    pub fn size(&self) -> usize {
        self.a.iter().filter(|&&m| m != NONE).count()
    }

    pub fn to_matching(&self) -> Matching {
        Matching {
            pairs: self
                .a
                .iter()
                .enumerate()
                .filter(|(_, &m)| m != NONE)
                .map(|(x, &m)| (x, m))
                .collect(),
        }
    }
}

pub(crate) fn hopcroft_karp(g: &BipartiteGraph) -> Mates {
    let (na, nb) = (g.a_size(), g.b_size());
    let mut mate_a = vec![NONE; na];
    let mut mate_b = vec![NONE; nb];
    let mut dist = vec![0usize; na];
    loop {
        // layered BFS from free A vertices
        let mut queue = VecDeque::new();
        for a in 0..na {
            if mate_a[a] == NONE {
                dist[a] = 0;
                queue.push_back(a);
            } else {
                dist[a] = NONE;
            }
        }
        let mut found = false;
        while let Some(a) = queue.pop_front() {
            for &b in g.neighbors(a) {
                let next = mate_b[b];
                if next == NONE {
                    found = true;
                } else if dist[next] == NONE {
                    dist[next] = dist[a] + 1;
                    queue.push_back(next);
                }
            }
        }
        if !found {
            break;
        }
        let mut it = vec![0usize; na];
        for a in 0..na {
            if mate_a[a] == NONE {
                augment(g, a, &mut mate_a, &mut mate_b, &mut dist, &mut it);
            }
        }
    }
    Mates {
        a: mate_a,
        b: mate_b,
    }
}

/// Iterative DFS along the BFS layers.
fn augment(
    g: &BipartiteGraph,
    root: usize,
    mate_a: &mut [usize],
    mate_b: &mut [usize],
    dist: &mut [usize],
    it: &mut [usize],
) -> bool {
    let mut stack = vec![root];
    while let Some(&a) = stack.last() {
        let nbrs = g.neighbors(a);
        if it[a] == nbrs.len() {
            dist[a] = NONE;
            stack.pop();
            continue;
        }
        let b = nbrs[it[a]];
        it[a] += 1;
        let next = mate_b[b];
        if next == NONE {
            // flip the path recorded on the stack
            let mut b = b;
            while let Some(a) = stack.pop() {
                let prev = mate_a[a];
                mate_a[a] = b;
                mate_b[b] = a;
                b = prev;
            }
            return true;
        }
        if dist[next] == dist[a].wrapping_add(1) {
            stack.push(next);
        }
    }
    false
}

pub fn max_matching(g: &BipartiteGraph) -> Matching {
    hopcroft_karp(g).to_matching()
}

/// König cover from a maximum matching: with `Z` the vertices reachable from
/// unmatched A-vertices by alternating paths, the cover is `(A∖Z) ∪ (B∩Z)`.
pub(crate) fn konig_cover(g: &BipartiteGraph, mates: &Mates) -> Cover {
    let (na, nb) = (g.a_size(), g.b_size());
    let mut za = vec![false; na];
    let mut zb = vec![false; nb];
    let mut queue: VecDeque<usize> = (0..na).filter(|&a| mates.a[a] == NONE).collect();
    for &a in &queue {
        za[a] = true;
    }
    while let Some(a) = queue.pop_front() {
        for &b in g.neighbors(a) {
            if !zb[b] && mates.a[a] != b {
                zb[b] = true;
                let next = mates.b[b];
                if next != NONE && !za[next] {
                    za[next] = true;
                    queue.push_back(next);
                }
            }
        }
    }
    Cover {
        a_side: (0..na).filter(|&a| !za[a]).collect(),
        b_side: (0..nb).filter(|&b| zb[b]).collect(),
    }
}

pub fn min_cover(g: &BipartiteGraph) -> Cover {
    konig_cover(g, &hopcroft_karp(g))
}

/// `S = A ∖ C_A` for a minimum cover `C`; `N(S) ⊆ C_B`, so
/// `|S| − |N(S)| ≥ |A| − ν`, the maximum deficiency.
pub fn hall_violator(g: &BipartiteGraph) -> Vec<usize> {
    let cover = min_cover(g);
    let mut in_cover = vec![false; g.a_size()];
    cover.a_side.iter().for_each(|&a| in_cover[a] = true);
    (0..g.a_size()).filter(|&a| !in_cover[a]).collect()
}

/// Largest `|S| − |N(S)|` over all `S ⊆ A` by enumeration (`|A| ≤ 20`),
/// together with a maximizing `S`.
pub fn exhaustive_deficiency(g: &BipartiteGraph) -> Result<(usize, Vec<usize>)> {
    let na = g.a_size();
    if na > 20 {
        return Err(Error::Scale(format!("deficiency enumeration needs |A| <= 20, got {na}")));
    }
    let masks: Vec<u128> = (0..na)
        .map(|a| g.neighbors(a).iter().fold(0u128, |m, &b| m | (1 << b)))
        .collect();
    if g.b_size() > 128 {
        return Err(Error::Scale("deficiency enumeration needs |B| <= 128".into()));
    }
    let mut nb = vec![0u128; 1 << na];
    let mut best = (0usize, 0usize);
    for s in 1usize..(1 << na) {
        let low = s.trailing_zeros() as usize;
        nb[s] = nb[s & (s - 1)] | masks[low];
        let def = (s.count_ones() as usize).saturating_sub(nb[s].count_ones() as usize);
        if def > best.0 {
            best = (def, s);
        }
    }
    Ok((best.0, (0..na).filter(|&a| best.1 >> a & 1 == 1).collect()))
}

/// A matching of size at least `|A| − D`, assuming `|N(S)| ≥ |S| − D` for all
/// `S ⊆ A`. The assumption is checked exhaustively when `|A| ≤ 14`.
pub fn defect_hall_matching(g: &BipartiteGraph, defect: usize) -> Result<Matching> {
    if g.a_size() <= 14 {
        let (worst, witness) = exhaustive_deficiency(g)?;
        if worst > defect {
            return Err(Error::Precondition {
                message: format!(
                    "set of size {} has only {} neighbours (defect {defect} allowed)",
                    witness.len(),
                    g.neighborhood_size(&witness)
                ),
                witness: Some(witness),
            });
        }
    }
    let mates = hopcroft_karp(g);
    let need = g.a_size().saturating_sub(defect);
    if mates.size() < need {
        let s = hall_violator(g);
        return Err(Error::contract(
            format!(
                "maximum matching has size {} < {need}; violating set of size {} has {} neighbours",
                mates.size(),
                s.len(),
                g.neighborhood_size(&s)
            ),
            Some(s),
        ));
    }
    Ok(mates.to_matching())
}
