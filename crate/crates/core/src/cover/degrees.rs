use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::digraph::{DegreeSequences, Digraph, Direction};
use crate::error::{Error, Result};
use crate::rational::{self, ceil_int, int, Rational};
use crate::regular::ClusterPartition;

/// Largest reduced digraph swept exhaustively by [`check_outexpansion`].
pub const EXPANSION_EXHAUSTIVE_LIMIT: usize = 22;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseMargin {
    /// `"i"` … `"vi"`.
    pub clause: String,
    pub holds: bool,
    /// Smallest margin over all indices; `None` when every index is vacuous.
    #[serde(with = "rational::serde_opt_str")]
    pub margin: Option<Rational>,
    pub worst_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InheritedDegreeReport {
    pub k: usize,
    pub m: usize,
    pub clauses: Vec<ClauseMargin>,
    pub holds: bool,
}

impl InheritedDegreeReport {
    pub fn clause(&self, name: &str) -> Option<&ClauseMargin> {
        self.clauses.iter().find(|c| c.clause == name)
    }
}

fn at(seq: &DegreeSequences, dir: Direction, i: i64) -> Option<usize> {
    seq.at_dir(dir, i)
}

fn flip(dir: Direction) -> Direction {
    match dir {
        Direction::Out => Direction::In,
        Direction::In => Direction::Out,
    }
}

fn summarize(clause: &str, margins: impl Iterator<Item = (usize, Option<Rational>)>) -> ClauseMargin {
    let mut worst: Option<(Rational, usize)> = None;
    for (i, m) in margins {
        if let Some(m) = m {
            if worst.as_ref().is_none_or(|w| m < w.0) {
                worst = Some((m, i));
            }
        }
    }
    ClauseMargin {
        clause: clause.to_string(),
        holds: worst.as_ref().is_none_or(|w| w.0 >= Rational::from_integer(0)),
        margin: worst.as_ref().map(|w| w.0),
        worst_index: worst.map(|w| w.1),
    }
}

/// Evaluates the six inherited-degree clauses for the reduced digraph `r` of
/// `g` with respect to `part`, reporting the smallest margin of each.
///
/// Clauses (v) and (vi) are evaluated for `1 ≤ i < k/2`; the alternative
/// index `(1 − β/2)k − i` is rounded up.
pub fn verify_inherited_degrees(
    g: &Digraph,
    part: &ClusterPartition,
    r: &Digraph,
    d: Rational,
    beta: Rational,
) -> Result<InheritedDegreeReport> {
    if part.n() != g.n() || part.k() != r.n() {
        return Err(Error::InvalidPartition(format!(
            "partition has n={}, k={}; digraph n={}, reduced k={}",
            part.n(),
            part.k(),
            g.n(),
            r.n()
        )));
    }
    let k = r.n();
    let m = part.m();
    if k == 0 || m == 0 {
        return Err(Error::InvalidPartition("no clusters".into()));
    }
    let gs = g.degree_sequences();
    let rs = r.degree_sequences();
    let kk = int(k);
    let two = Rational::from_integer(2);
    let slack = two * d * kk;
    let half_beta_k = beta * kk / two;
    let cap = (Rational::new(1, 2) - two * d) * kk;
    let mut clauses = Vec::with_capacity(6);
    for (name, dir) in [("i", Direction::Out), ("ii", Direction::In)] {
        clauses.push(summarize(
            name,
            (1..=k).map(|i| {
                let lhs = int(at(&rs, dir, i as i64).expect("index in range"));
                let gdeg = at(&gs, dir, (i * m) as i64).expect("im <= n");
                (i, Some(lhs - int(gdeg) / int(m) + slack))
            }),
        ));
    }
    for (name, dir) in [("iii", Direction::Out), ("iv", Direction::In)] {
        let min = int(at(&rs, dir, 1).expect("k >= 1"));
        clauses.push(summarize(name, std::iter::once((1, Some(min - half_beta_k)))));
    }
    for (name, dir) in [("v", Direction::Out), ("vi", Direction::In)] {
        clauses.push(summarize(
            name,
            (1..k).take_while(|&i| 2 * i < k).map(|i| {
                let first = int(at(&rs, dir, i as i64).unwrap()) - (int(i) + half_beta_k).min(cap);
                let j = ceil_int(&((Rational::from_integer(1) - beta / two) * kk - int(i)));
                let second = at(&rs, flip(dir), j).map(|x| int(x) - (kk - int(i) - slack));
                // an out-of-range alternative index is vacuously satisfied
                let margin = match second {
                    Some(s) => first.max(s),
                    None => return (i, None),
                };
                (i, Some(margin))
            }),
        ));
    }
    let holds = clauses.iter().all(|c| c.holds);
    Ok(InheritedDegreeReport { k, m, clauses, holds })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum ExpansionMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

/// A set `S` with `|S| ≤ (1/2 − 2d)k` or `|S| > (1/2 + 2d)k` and
/// `|N⁺(S)| < |S|` or `|N⁻(S)| < |S|`, if one exists (exhaustive mode), or
/// was drawn (sampled mode). Exhaustive mode returns the violator with the
/// smallest bitmask.
pub fn check_outexpansion(r: &Digraph, d: Rational, mode: ExpansionMode) -> Result<Option<Vec<usize>>> {
    let k = r.n();
    let kk = int(k);
    let two = Rational::from_integer(2);
    let small = (Rational::new(1, 2) - two * d) * kk;
    let large = (Rational::new(1, 2) + two * d) * kk;
    let qualifies = |s: usize| int(s) <= small || int(s) > large;
    match mode {
        ExpansionMode::Exhaustive => {
            if k > EXPANSION_EXHAUSTIVE_LIMIT {
                return Err(Error::Scale(format!(
                    "exhaustive expansion sweep needs k <= {EXPANSION_EXHAUSTIVE_LIMIT}, got {k}"
                )));
            }
            let out: Vec<u32> = r.out_masks().into_iter().map(|m| m as u32).collect();
            let inn: Vec<u32> = r.in_masks().into_iter().map(|m| m as u32).collect();
            let mut n_out = vec![0u32; 1 << k];
            let mut n_in = vec![0u32; 1 << k];
            for s in 1usize..(1 << k) {
                let low = s.trailing_zeros() as usize;
                let rest = s & (s - 1);
                n_out[s] = n_out[rest] | out[low];
                n_in[s] = n_in[rest] | inn[low];
                let size = s.count_ones();
                if qualifies(size as usize) && (n_out[s].count_ones() < size || n_in[s].count_ones() < size) {
                    return Ok(Some((0..k).filter(|&v| s >> v & 1 == 1).collect()));
                }
            }
            Ok(None)
        }
        ExpansionMode::Sampled { samples, seed } => {
            let sizes: Vec<usize> = (1..=k).filter(|&s| qualifies(s)).collect();
            if sizes.is_empty() {
                return Ok(None);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let all: Vec<usize> = (0..k).collect();
            for _ in 0..samples {
                let size = sizes[rng.gen_range(0..sizes.len())];
                let mut s: Vec<usize> = all.choose_multiple(&mut rng, size).copied().collect();
                s.sort_unstable();
                if r.neighborhood(&s, Direction::Out)?.len() < size || r.neighborhood(&s, Direction::In)?.len() < size {
                    return Ok(Some(s));
                }
            }
            Ok(None)
        }
    }
}

/// Numbers of vertices with outdegree, resp. indegree, at least `(1/2 − 2d)k`.
pub fn large_degree_census(r: &Digraph, d: Rational) -> (usize, usize) {
    let t = (Rational::new(1, 2) - Rational::from_integer(2) * d) * int(r.n());
    let out = (0..r.n()).filter(|&v| int(r.out_degree(v)) >= t).count();
    let inn = (0..r.n()).filter(|&v| int(r.in_degree(v)) >= t).count();
    (out, inn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn singletons(k: usize) -> ClusterPartition {
        ClusterPartition::new(k, vec![], (0..k).map(|i| vec![i]).collect()).unwrap()
    }

    #[test]
    fn complete_reduced_digraph() {
        // blow-up: all edges between distinct clusters
        let edges = (0..30)
            .flat_map(|u| (0..30).map(move |v| (u, v)))
            .filter(|&(u, v)| u / 5 != v / 5);
        let g = Digraph::new(30, edges).unwrap();
        let part = ClusterPartition::new(30, vec![], (0..6).map(|i| (5 * i..5 * i + 5).collect()).collect()).unwrap();
        let r = Digraph::complete(6);
        let rep = verify_inherited_degrees(&g, &part, &r, ratio(1, 100), ratio(3, 10)).unwrap();
        assert!(rep.holds, "{rep:?}");
        // d_i(R) = 5 and d_{5i}(G)/5 = 25/5, so the margin is 2dk
        assert_eq!(rep.clause("i").unwrap().margin, Some(ratio(12, 100)));
    }

    #[test]
    fn low_outdegree_cluster() {
        // vertex 0 of a complete digraph keeps a single out-edge
        let k = 10;
        let edges = (0..k)
            .flat_map(|u| (0..k).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v && (u != 0 || v == 1));
        let r = Digraph::new(k, edges).unwrap();
        let rep = verify_inherited_degrees(&r, &singletons(k), &r, ratio(1, 100), ratio(3, 10)).unwrap();
        let c = rep.clause("iii").unwrap();
        assert!(!c.holds);
        assert_eq!(c.margin, Some(ratio(1, 1) - ratio(3, 2)));
        assert!(rep.clause("i").unwrap().holds);
    }

    #[test]
    fn expansion() {
        assert_eq!(check_outexpansion(&Digraph::complete(8), ratio(1, 100), ExpansionMode::Exhaustive).unwrap(), None);
        // {0, 1, 2} only reach {0, 1}
        let mut edges = vec![(0, 1), (1, 0), (2, 0), (2, 1)];
        for u in 3..8 {
            for v in 0..8 {
                if u != v {
                    edges.push((u, v));
                }
            }
        }
        let r = Digraph::new(8, edges).unwrap();
        let s = check_outexpansion(&r, ratio(1, 100), ExpansionMode::Exhaustive).unwrap().unwrap();
        assert!(r.neighborhood(&s, Direction::Out).unwrap().len() < s.len() || r.neighborhood(&s, Direction::In).unwrap().len() < s.len());
        assert!(s.len() <= 3);
        let c = Digraph::cycle(10);
        assert!(check_outexpansion(&c, ratio(1, 100), ExpansionMode::Sampled { samples: 100, seed: 0 }).unwrap().is_none());
    }

    #[test]
    fn census() {
        assert_eq!(large_degree_census(&Digraph::complete(10), ratio(1, 50)), (10, 10));
        assert_eq!(large_degree_census(&Digraph::cycle(10), ratio(1, 50)), (0, 0));
    }
}
