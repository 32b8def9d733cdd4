use crate::digraph::{Digraph, HamiltonCertificate};
use crate::error::{Error, Result};
use crate::hamilton::held_karp;

pub const BRUTE_FORCE_LIMIT: usize = 20;
pub const COVERAGE_LIMIT: usize = 16;

/// Exact Hamilton cycle search by subset DP.
pub fn brute_force_hamiltonian(g: &Digraph) -> Result<Option<HamiltonCertificate>> {
    if g.n() > BRUTE_FORCE_LIMIT {
        return Err(Error::Scale(format!(
            "brute force handles n <= {BRUTE_FORCE_LIMIT}, got {}",
            g.n()
        )));
    }
    held_karp(g)
}

/// Largest number of vertices covered by disjoint cycles: the largest `S`
/// whose induced subdigraph has a 1-factor, found by trying vertex sets in
/// decreasing size.
pub fn max_cycle_cover_coverage(g: &Digraph) -> Result<usize> {
    let n = g.n();
    if n > COVERAGE_LIMIT {
        return Err(Error::Scale(format!(
            "cycle cover coverage handles n <= {COVERAGE_LIMIT}, got {n}"
        )));
    }
    let out = g.out_masks();
    let mut masks: Vec<u32> = (1..1u32 << n).collect();
    masks.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
    Ok(masks
        .into_iter()
        .find(|&s| s.count_ones() >= 2 && has_factor(&out, s))
        .map_or(0, |s| s.count_ones() as usize))
}

/// Perfect matching of the doubled bipartite graph on `set` by Kuhn's
/// augmenting paths.
fn has_factor(out: &[u64], set: u32) -> bool {
    let n = out.len();
    let mut mate = vec![usize::MAX; n];
    fn augment(u: usize, out: &[u64], set: u32, seen: &mut u32, mate: &mut [usize]) -> bool {
        let mut cand = out[u] as u32 & set & !*seen;
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            *seen |= 1 << v;
            if mate[v] == usize::MAX || augment(mate[v], out, set, seen, mate) {
                mate[v] = u;
                return true;
            }
        }
        false
    }
    (0..n)
        .filter(|&u| set >> u & 1 == 1)
        .all(|u| augment(u, out, set, &mut 0, &mut mate))
}
