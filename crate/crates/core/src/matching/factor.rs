use crate::digraph::{BipartiteGraph, Digraph, Direction, OneFactor};

use super::bipartite::{hopcroft_karp, konig_cover};

/// Either a 1-factor or a set `S` with `|N⁺(S)| < |S|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorCertificate {
    Factor(OneFactor),
    Violator(Vec<usize>),
}

impl FactorCertificate {
    pub fn factor(&self) -> Option<&OneFactor> {
        match self {
            FactorCertificate::Factor(f) => Some(f),
            FactorCertificate::Violator(_) => None,
        }
    }

    pub fn into_factor(self) -> Option<OneFactor> {
        match self {
            FactorCertificate::Factor(f) => Some(f),
            FactorCertificate::Violator(_) => None,
        }
    }
}

/// The doubled bipartite graph Γ: `A = B = V`, with `(u, v)` an edge iff
/// `u → v` in `g`.
pub fn doubled_bipartite(g: &Digraph) -> BipartiteGraph {
    let adj = (0..g.n()).map(|v| g.out_neighbors(v).to_vec()).collect();
    BipartiteGraph::from_sorted(g.n(), g.n(), adj)
}

/// Perfect matchings of Γ are exactly the 1-factors of `g`. When none
/// exists, the A-vertices outside a König cover form a violator.
pub fn find_one_factor(g: &Digraph) -> FactorCertificate {
    let gamma = doubled_bipartite(g);
    let mates = hopcroft_karp(&gamma);
    if g.n() > 0 && mates.size() == g.n() {
        let f = OneFactor::from_successors(mates.a).expect("perfect matching is a permutation");
        return FactorCertificate::Factor(f);
    }
    let cover = konig_cover(&gamma, &mates);
    let mut in_cover = vec![false; g.n()];
    cover.a_side.iter().for_each(|&a| in_cover[a] = true);
    let s: Vec<usize> = (0..g.n()).filter(|&v| !in_cover[v]).collect();
    debug_assert!(
        g.n() == 0 || g.neighborhood(&s, Direction::Out).unwrap().len() < s.len()
    );
    FactorCertificate::Violator(s)
}
