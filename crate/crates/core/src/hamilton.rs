//! Hamilton-cycle search: an exact subset DP for small digraphs and a
//! factor-merging heuristic with random restarts for larger ones.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::digraph::{verify_hamilton_cycle, BipartiteGraph, Digraph, HamiltonCertificate};
use crate::error::{Error, Result};
use crate::matching::max_matching;

/// Largest order handled by [`held_karp`].
pub const HELD_KARP_LIMIT: usize = 20;

/// Order up to which [`find_hamilton_cycle`] uses the exact search.
pub const EXACT_LIMIT: usize = 18;

/// Exact search. `dp[S]` (over sets `S ∋ 0`) is the bitmask of vertices `w`
/// such that some path from 0 visits exactly `S` and ends at `w`.
pub fn held_karp(g: &Digraph) -> Result<Option<HamiltonCertificate>> {
    let n = g.n();
    if n > HELD_KARP_LIMIT {
        return Err(Error::Scale(format!(
            "exact Hamilton search handles n <= {HELD_KARP_LIMIT}, got {n}"
        )));
    }
    if n < 2 {
        return Ok(None);
    }
    let in_mask: Vec<u32> = g.in_masks().into_iter().map(|m| m as u32).collect();
    let out_mask: Vec<u32> = g.out_masks().into_iter().map(|m| m as u32).collect();
    // index by S >> 1, since bit 0 is always set
    let size = 1usize << (n - 1);
    let mut dp = vec![0u32; size];
    dp[0] = 1;
    for idx in 1..size {
        let set = (idx << 1) | 1;
        let mut ends = 0u32;
        let mut rest = idx << 1;
        while rest != 0 {
            let w = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if dp[(set ^ (1 << w)) >> 1] & in_mask[w] != 0 {
                ends |= 1 << w;
            }
        }
        dp[idx] = ends;
    }
    let full = (1usize << n) - 1;
    let closing = dp[full >> 1] & in_mask[0];
    if closing == 0 {
        return Ok(None);
    }
    // walk back from an end with an edge into 0
    let mut order = Vec::with_capacity(n);
    let mut set = full;
    let mut w = closing.trailing_zeros() as usize;
    while w != 0 {
        order.push(w);
        let prev_set = set ^ (1 << w);
        let cands = dp[prev_set >> 1] & in_mask[w];
        let v = cands.trailing_zeros() as usize;
        debug_assert!(out_mask[v] >> w & 1 == 1);
        set = prev_set;
        w = v;
    }
    order.push(0);
    order.reverse();
    Ok(Some(HamiltonCertificate::new(order)))
}

/// Exact for `n ≤ EXACT_LIMIT`; otherwise the heuristic runs until `deadline`
/// elapses. Exact failure is [`Error::NotHamiltonian`]; heuristic failure is
/// [`Error::SearchFailure`].
pub fn find_hamilton_cycle(g: &Digraph, deadline: Duration, seed: u64) -> Result<HamiltonCertificate> {
    if g.n() <= EXACT_LIMIT {
        return held_karp(g)?.ok_or(Error::NotHamiltonian);
    }
    merge_heuristic(g, deadline, seed)
}

/// Draws random 1-factors (maximum matchings of the doubled bipartite graph
/// with shuffled adjacency) and merges their cycles by successor swaps: for
/// `a`, `b` on different cycles with `a → b⁺` and `b → a⁺`, exchanging the
/// successors of `a` and `b` joins the two cycles.
pub fn merge_heuristic(g: &Digraph, deadline: Duration, seed: u64) -> Result<HamiltonCertificate> {
    let n = g.n();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut restarts = 0usize;
    loop {
        if restarts > 0 && start.elapsed() > deadline {
            return Err(Error::SearchFailure(format!(
                "no Hamilton cycle found within {deadline:?} ({restarts} restarts)"
            )));
        }
        restarts += 1;
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let mut pos = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            pos[p] = i;
        }
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|u| {
                let mut l: Vec<usize> = g.out_neighbors(perm[u]).iter().map(|&v| pos[v]).collect();
                l.sort_unstable();
                l
            })
            .collect();
        let gamma = BipartiteGraph::from_sorted(n, n, adj);
        let m = max_matching(&gamma);
        if m.len() < n {
            if restarts == 1 {
                // no 1-factor at all, hence no Hamilton cycle, but only the
                // exact search may claim that
                return Err(Error::SearchFailure("digraph has no 1-factor".into()));
            }
            continue;
        }
        let mut succ = vec![0; n];
        for &(a, b) in &m.pairs {
            succ[perm[a]] = perm[b];
        }
        if let Some(order) = merge_cycles(g, &mut succ, &mut rng) {
            let cert = HamiltonCertificate::new(order);
            debug_assert!(verify_hamilton_cycle(g, &cert).unwrap_or(false));
            return Ok(cert);
        }
    }
}

/// Repeatedly merges cycles of the factor `succ`; returns the Hamilton cycle
/// when a single cycle remains.
pub(crate) fn merge_cycles(g: &Digraph, succ: &mut [usize], rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    let n = succ.len();
    loop {
        let cyc = cycle_labels(succ);
        let count = cyc.iter().max().map_or(0, |&c| c + 1);
        if count == 1 {
            let mut order = vec![0];
            let mut v = succ[0];
            while v != 0 {
                order.push(v);
                v = succ[v];
            }
            return Some(order);
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut merged = false;
        'outer: for &a in &order {
            let a_next = succ[a];
            for &b_next in g.out_neighbors(a) {
                if cyc[b_next] == cyc[a] {
                    continue;
                }
                let b = pred_of(succ, b_next);
                if g.has_edge(b, a_next) {
                    succ[a] = b_next;
                    succ[b] = a_next;
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            return None;
        }
    }
}

fn pred_of(succ: &[usize], v: usize) -> usize {
    let mut u = v;
    while succ[u] != v {
        u = succ[u];
    }
    u
}

/// Cycle label of every vertex of the permutation `succ`.
pub(crate) fn cycle_labels(succ: &[usize]) -> Vec<usize> {
    let mut label = vec![usize::MAX; succ.len()];
    let mut next = 0;
    for s in 0..succ.len() {
        if label[s] != usize::MAX {
            continue;
        }
        let mut v = s;
        while label[v] == usize::MAX {
            label[v] = next;
            v = succ[v];
        }
        next += 1;
    }
    label
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_small_families() {
        let c6 = Digraph::cycle(6);
        let cert = held_karp(&c6).unwrap().unwrap();
        assert!(verify_hamilton_cycle(&c6, &cert).unwrap());
        assert!(held_karp(&Digraph::path(6)).unwrap().is_none());
        let k8 = Digraph::complete(8);
        assert!(verify_hamilton_cycle(&k8, &held_karp(&k8).unwrap().unwrap()).unwrap());
        assert!(held_karp(&Digraph::complete(1)).unwrap().is_none());
        let two = Digraph::complete(2);
        assert_eq!(held_karp(&two).unwrap().unwrap().order, vec![0, 1]);
        assert!(matches!(held_karp(&Digraph::complete(21)), Err(Error::Scale(_))));
    }

    #[test]
    fn heuristic_on_complete_digraph() {
        let g = Digraph::complete(40);
        let cert = merge_heuristic(&g, Duration::from_secs(5), 1).unwrap();
        assert!(verify_hamilton_cycle(&g, &cert).unwrap());
    }

    #[test]
    fn heuristic_reports_missing_factor() {
        let g = Digraph::path(30);
        assert!(matches!(
            merge_heuristic(&g, Duration::from_millis(10), 0),
            Err(Error::SearchFailure(_))
        ));
    }
}
