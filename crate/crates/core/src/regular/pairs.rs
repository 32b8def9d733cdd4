use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    at_least, certify_regular, certify_super_regular, check_eps, ClusterPartition, CertifyMode, Pair,
    ReducedDigraph, EXHAUSTIVE_LIMIT,
};
use crate::digraph::{Digraph, HamiltonCertificate};
use crate::error::{Error, Result};
use crate::hamilton::find_hamilton_cycle;
use crate::matching::{hall_violator, max_matching, Matching};
use crate::rational::{ceil_int, int, Rational};

/// Redraw cap for the randomized constructions.
pub const MAX_REDRAWS: usize = 100;

/// A maximum matching of a balanced pair, in host vertex ids, checked against
/// `(1 − ε)n`, or against `n` when the pair is asserted super-regular.
pub fn regular_pair_matching(p: &Pair<'_>, eps: Rational, super_regular: bool) -> Result<Matching> {
    check_eps(&eps)?;
    let n = p.a.len();
    if p.b.len() != n {
        return Err(Error::Parameter(format!(
            "pair sides differ: {} vs {}",
            n,
            p.b.len()
        )));
    }
    let bip = p.bipartite();
    let m = max_matching(&bip);
    let need = if super_regular {
        n
    } else {
        ceil_int(&((Rational::from_integer(1) - eps) * int(n))).max(0) as usize
    };
    if m.len() < need {
        let s = hall_violator(&bip);
        let witness: Vec<usize> = s.iter().map(|&i| p.a[i]).collect();
        return Err(Error::contract(
            format!(
                "maximum matching has size {} < {need}; {} vertices of A have {} neighbours",
                m.len(),
                s.len(),
                bip.neighborhood_size(&s)
            ),
            Some(witness),
        ));
    }
    Ok(Matching {
        pairs: m.pairs.iter().map(|&(i, j)| (p.a[i], p.b[j])).collect(),
    })
}

/// Maximum total degree `d⁺ + d⁻` of `h`.
fn max_total_degree(h: &Digraph) -> usize {
    (0..h.n()).map(|v| h.out_degree(v) + h.in_degree(v)).max().unwrap_or(0)
}

/// Moves exactly `⌈Δεm⌉` vertices out of every cluster, including every
/// vertex with fewer than `(d − ε)m` out-neighbours in some `h`-out-neighbour
/// cluster (or in-neighbours in some `h`-in-neighbour cluster).
///
/// When the new clusters have at most 12 vertices, `h`-pairs are certified
/// `(2ε, d/2)`-super-regular and `r`-pairs `(2ε, d − ε)`-regular.
pub fn make_super_regular(
    g: &Digraph,
    part: &ClusterPartition,
    r: &ReducedDigraph,
    h: &Digraph,
    eps: Rational,
    d: Rational,
) -> Result<ClusterPartition> {
    check_eps(&eps)?;
    let k = part.k();
    if h.n() != k || r.k() != k {
        return Err(Error::Parameter(format!(
            "partition has {k} clusters, reduced digraph {} and h {}",
            r.k(),
            h.n()
        )));
    }
    if let Some((u, v)) = h.edges().find(|&(u, v)| !r.base.has_edge(u, v)) {
        return Err(Error::Parameter(format!("h-edge {u}->{v} is not an edge of r")));
    }
    let delta = max_total_degree(h);
    let de = int(delta) * eps;
    if de > Rational::new(1, 2) {
        return Err(Error::Parameter(format!("Delta*eps = {de} exceeds 1/2")));
    }
    let m = part.m();
    let count = ceil_int(&(de * int(m))) as usize;
    let cluster_of = part.cluster_of();
    let floor = (d - eps) * int(m);
    let mut removed = Vec::with_capacity(k);
    for (i, cluster) in part.clusters.iter().enumerate() {
        // the smallest relevant degree, scaled so that < 0 marks A(V)
        let slack: Vec<(Rational, usize)> = cluster
            .iter()
            .map(|&x| {
                let mut out_c = vec![0usize; k];
                let mut in_c = vec![0usize; k];
                for &y in g.out_neighbors(x) {
                    if let Some(c) = cluster_of[y] {
                        out_c[c] += 1;
                    }
                }
                for &y in g.in_neighbors(x) {
                    if let Some(c) = cluster_of[y] {
                        in_c[c] += 1;
                    }
                }
                let worst = h
                    .out_neighbors(i)
                    .iter()
                    .map(|&w| out_c[w])
                    .chain(h.in_neighbors(i).iter().map(|&w| in_c[w]))
                    .min()
                    .map_or(Rational::from_integer(i64::MAX / 4), |c| int(c) - floor);
                (worst, x)
            })
            .collect();
        let low: Vec<usize> = slack.iter().filter(|(s, _)| *s < Rational::from_integer(0)).map(|&(_, x)| x).collect();
        if low.len() > count {
            return Err(Error::contract(
                format!(
                    "cluster {i} has {} low-degree vertices, more than Delta*eps*m = {count}",
                    low.len()
                ),
                Some(low),
            ));
        }
        let mut order = slack;
        order.sort();
        removed.push(order[..count].iter().map(|&(_, x)| x).collect::<Vec<_>>());
    }
    let out = part.move_to_exceptional(&removed)?;
    if out.m() > 0 && out.m() <= EXHAUSTIVE_LIMIT {
        let two_eps = eps * Rational::from_integer(2);
        for (i, j) in r.base.edges() {
            let p = Pair::new(g, out.clusters[i].clone(), out.clusters[j].clone())?;
            if h.has_edge(i, j) {
                let v = certify_super_regular(&p, two_eps, d / Rational::from_integer(2), CertifyMode::Exhaustive)?;
                if !v.super_regular {
                    return Err(Error::contract(
                        format!("h-pair ({i}, {j}) is not (2eps, d/2)-super-regular after the move"),
                        v.low_degree.map(|(_, x)| vec![x]),
                    ));
                }
            } else {
                let v = certify_regular(&p, two_eps, CertifyMode::Exhaustive)?;
                if !v.regular || v.density < d - eps {
                    return Err(Error::contract(
                        format!("r-pair ({i}, {j}) is not (2eps, d-eps)-regular after the move"),
                        v.witness.map(|(x, _)| x),
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Given `X ⊆ A` with `|X| ≤ |A|/3`, picks `Y ⊆ B` with `|Y| = |X|` so that in
/// `(A ∖ X, B ∖ Y)` every vertex keeps at least half of the `d`-fraction of
/// the other side. `Y` is the set `B₁` of vertices with fewer than
/// `½·d·|A ∖ X|` neighbours in `A ∖ X`, topped up at random; the random part
/// is redrawn until the degree audit passes.
pub fn excise_preserving(p: &Pair<'_>, x: &[usize], eps: Rational, d: Rational, seed: u64) -> Result<Vec<usize>> {
    check_eps(&eps)?;
    let n = p.a.len();
    if 3 * x.len() > n {
        return Err(Error::Precondition {
            message: format!("|X| = {} exceeds |A|/3 = {n}/3", x.len()),
            witness: Some(x.to_vec()),
        });
    }
    let mut in_x = vec![false; n];
    for &v in x {
        match p.a.iter().position(|&a| a == v) {
            Some(i) if !in_x[i] => in_x[i] = true,
            Some(_) => return Err(Error::Parameter(format!("vertex {v} repeated in X"))),
            None => return Err(Error::Parameter(format!("vertex {v} of X is not in A"))),
        }
    }
    let bip = p.bipartite();
    let rest_a: Vec<usize> = (0..n).filter(|&i| !in_x[i]).collect();
    let half_d = d / Rational::from_integer(2);
    let mut b_deg_rest = vec![0usize; p.b.len()];
    for &i in &rest_a {
        for &j in bip.neighbors(i) {
            b_deg_rest[j] += 1;
        }
    }
    let b1: Vec<usize> = (0..p.b.len()).filter(|&j| !at_least(b_deg_rest[j], &half_d, rest_a.len())).collect();
    if b1.len() > x.len() {
        return Err(Error::contract(
            format!(
                "{} vertices of B have low degree into A \\ X, more than |X| = {}",
                b1.len(),
                x.len()
            ),
            Some(b1.iter().map(|&j| p.b[j]).collect()),
        ));
    }
    let mut in_b1 = vec![false; p.b.len()];
    b1.iter().for_each(|&j| in_b1[j] = true);
    let pool: Vec<usize> = (0..p.b.len()).filter(|&j| !in_b1[j]).collect();
    let keep_b = p.b.len() - x.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REDRAWS {
        let mut in_y = in_b1.clone();
        for &j in pool.choose_multiple(&mut rng, x.len() - b1.len()) {
            in_y[j] = true;
        }
        let ok = rest_a.iter().all(|&i| {
            let deg = bip.neighbors(i).iter().filter(|&&j| !in_y[j]).count();
            at_least(deg, &half_d, keep_b)
        });
        if ok {
            let mut y: Vec<usize> = (0..p.b.len()).filter(|&j| in_y[j]).map(|j| p.b[j]).collect();
            y.sort_unstable();
            return Ok(y);
        }
    }
    Err(Error::RandomizedConstruction {
        attempts: MAX_REDRAWS,
        message: "no Y keeps every vertex of A \\ X above d/2".into(),
    })
}

/// Hamilton cycle in a digraph asserted `(ε, d)`-super-regular. Only the
/// minimum semidegree part `δ± ≥ dn` of the assertion is checked.
pub fn hamilton_in_super_regular(
    g: &Digraph,
    eps: Rational,
    d: Rational,
    deadline: Duration,
    seed: u64,
) -> Result<HamiltonCertificate> {
    check_eps(&eps)?;
    if let Some(v) = (0..g.n()).find(|&v| !at_least(g.out_degree(v).min(g.in_degree(v)), &d, g.n())) {
        return Err(Error::Precondition {
            message: format!("vertex {v} has semidegree below d*n"),
            witness: Some(vec![v]),
        });
    }
    find_hamilton_cycle(g, deadline, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::verify_hamilton_cycle;
    use crate::rational::ratio;
    use crate::regular::build_reduced;

    #[test]
    fn complete_pair_matches_perfectly() {
        let g = Digraph::complete(20);
        let p = Pair::new(&g, (0..10).collect(), (10..20).collect()).unwrap();
        let m = regular_pair_matching(&p, ratio(1, 10), true).unwrap();
        assert_eq!(m.len(), 10);
        assert!(m.pairs.iter().all(|&(a, b)| a < 10 && b >= 10));
    }

    #[test]
    fn short_matching_is_a_contract_error() {
        // a single vertex of A sees all of B, the others see nothing
        let g = Digraph::new(8, (4..8).map(|b| (0, b))).unwrap();
        let p = Pair::new(&g, (0..4).collect(), (4..8).collect()).unwrap();
        match regular_pair_matching(&p, ratio(1, 4), false) {
            Err(Error::Contract { witness: Some(w), .. }) => assert_eq!(w, vec![1, 2, 3]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn excise_on_complete_pair() {
        let g = Digraph::complete(18);
        let p = Pair::new(&g, (0..9).collect(), (9..18).collect()).unwrap();
        let y = excise_preserving(&p, &[0, 1, 2], ratio(1, 10), ratio(1, 2), 0).unwrap();
        assert_eq!(y.len(), 3);
        assert!(y.iter().all(|&v| v >= 9));
        assert!(matches!(
            excise_preserving(&p, &[0, 1, 2, 3], ratio(1, 10), ratio(1, 2), 0),
            Err(Error::Precondition { .. })
        ));
    }

    #[test]
    fn super_regular_on_complete_blowup() {
        let k = 3;
        let m = 6;
        let mut edges = Vec::new();
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    for a in 0..m {
                        for b in 0..m {
                            edges.push((i * m + a, j * m + b));
                        }
                    }
                }
            }
        }
        let g = Digraph::new(k * m, edges).unwrap();
        let part = ClusterPartition::new(k * m, vec![], (0..k).map(|i| (i * m..(i + 1) * m).collect()).collect()).unwrap();
        let r = build_reduced(&g, &part, ratio(1, 10), ratio(1, 2), 0).unwrap();
        let h = Digraph::cycle(3);
        let out = make_super_regular(&g, &part, &r, &h, ratio(1, 8), ratio(1, 2)).unwrap();
        // Δ = 2, ⌈2·(1/8)·6⌉ = 2
        assert_eq!(out.m(), 4);
        assert_eq!(out.v0.len(), 6);
        assert!(matches!(
            make_super_regular(&g, &part, &r, &h, ratio(1, 3), ratio(1, 2)),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn hamilton_in_complete() {
        let g = Digraph::complete(10);
        let c = hamilton_in_super_regular(&g, ratio(1, 10), ratio(1, 2), Duration::from_secs(1), 0).unwrap();
        assert!(verify_hamilton_cycle(&g, &c).unwrap());
        let cyc = Digraph::cycle(12);
        assert!(hamilton_in_super_regular(&cyc, ratio(1, 10), ratio(1, 12), Duration::from_secs(1), 0).is_ok());
    }
}
