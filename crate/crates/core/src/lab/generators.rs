use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conditions::check_semi_exact;
use crate::digraph::{Digraph, Direction, OneFactor};
use crate::error::{Error, Result};
use crate::rational::{ceil_int, int, Rational};
use crate::regular::{certify_super_regular, CertifyMode, ClusterPartition, Pair};

/// Redraws allowed per `F`-pair before giving up.
pub const BLOWUP_RETRIES: usize = 100;

/// The `(ε, d)` at which generated `F`-pairs are audited.
pub fn blowup_audit_params() -> (Rational, Rational) {
    (Rational::new(1, 2), Rational::new(2, 5))
}

#[derive(Debug, Clone)]
pub struct Blowup {
    pub g: Digraph,
    pub partition: ClusterPartition,
    pub factor: OneFactor,
}

/// Replaces every cluster of `r0` by `m` vertices and every edge `i → j` of
/// `r0` by a random bipartite pair of density `pair_density`. Pairs along
/// `f0` are redrawn until they certify super-regular. Exceptional vertices
/// come last, each joined to and from every clustered vertex independently
/// with probability `pair_density`.
pub fn gen_blowup(
    r0: &Digraph,
    f0: &OneFactor,
    m: usize,
    pair_density: f64,
    v0_count: usize,
    seed: u64,
) -> Result<Blowup> {
    let k = r0.n();
    if f0.n() != k {
        return Err(Error::Parameter(format!("factor on {} vertices, r0 on {k}", f0.n())));
    }
    if let Some(c) = f0.cycles().iter().find(|c| c.len() < 4) {
        return Err(Error::Parameter(format!("factor cycle {c:?} is shorter than 4")));
    }
    if m == 0 || m % 2 == 1 {
        return Err(Error::Parameter(format!("cluster size must be even and positive, got {m}")));
    }
    if !(0.0..=1.0).contains(&pair_density) {
        return Err(Error::Parameter(format!("pair density {pair_density} outside [0, 1]")));
    }
    if let Some(x) = (0..k).find(|&x| !r0.has_edge(x, f0.successor(x))) {
        return Err(Error::Parameter(format!("F-edge ({x}, {}) missing from r0", f0.successor(x))));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (eps, d) = blowup_audit_params();
    let mut edges = Vec::new();
    for (i, j) in r0.edges() {
        let bits = if f0.successor(i) == j {
            audited_pair(m, pair_density, eps, d, &mut rng).ok_or_else(|| {
                Error::Generation(format!(
                    "F-pair ({i}, {j}) failed the super-regularity audit {BLOWUP_RETRIES} times"
                ))
            })?
        } else {
            random_pair(m, pair_density, &mut rng)
        };
        edges.extend(bits.into_iter().map(|(a, b)| (i * m + a, j * m + b)));
    }
    let clustered = k * m;
    for x in clustered..clustered + v0_count {
        for v in 0..clustered {
            if rng.gen_bool(pair_density) {
                edges.push((v, x));
            }
            if rng.gen_bool(pair_density) {
                edges.push((x, v));
            }
        }
    }
    let n = clustered + v0_count;
    let g = Digraph::new(n, edges)?;
    let clusters = (0..k).map(|i| (i * m..(i + 1) * m).collect()).collect();
    let partition = ClusterPartition::new(n, (clustered..n).collect(), clusters)?;
    Ok(Blowup {
        g,
        partition,
        factor: f0.clone(),
    })
}

fn random_pair(m: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..m {
        for b in 0..m {
            if rng.gen_bool(p) {
                out.push((a, b));
            }
        }
    }
    out
}

fn audited_pair(m: usize, p: f64, eps: Rational, d: Rational, rng: &mut ChaCha8Rng) -> Option<Vec<(usize, usize)>> {
    for _ in 0..BLOWUP_RETRIES {
        let bits = random_pair(m, p, rng);
        let host = Digraph::new(2 * m, bits.iter().map(|&(a, b)| (a, m + b))).expect("bipartite edges");
        let pair = Pair::new(&host, (0..m).collect(), (m..2 * m).collect()).expect("disjoint sides");
        let mode = CertifyMode::auto(m, m, rng.gen());
        if certify_super_regular(&pair, eps, d, mode).is_ok_and(|v| v.super_regular) {
            return Some(bits);
        }
    }
    None
}

/// `r0` complete on `k` clusters with `F` the 4-cycles `(4i, …, 4i+3)`.
pub fn standard_blowup_frame(k: usize) -> Result<(Digraph, OneFactor)> {
    if k == 0 || !k.is_multiple_of(4) {
        return Err(Error::Parameter(format!("k must be a positive multiple of 4, got {k}")));
    }
    let cycles: Vec<Vec<usize>> = (0..k / 4).map(|i| (4 * i..4 * i + 4).collect()).collect();
    Ok((Digraph::complete(k), OneFactor::from_cycles(k, &cycles)?))
}

/// A `G(n, 0.3)` digraph repaired until it passes the semi-exact condition
/// at `beta`. Each repair adds one edge at the vertex of smallest degree in
/// the failing direction (ties to the lowest id), towards a random
/// non-neighbour. The result is not uniform among digraphs satisfying the
/// condition.
pub fn gen_random_condition(n: usize, beta: Rational, seed: u64) -> Result<Digraph> {
    if beta <= Rational::from_integer(0) || beta >= Rational::new(1, 2) {
        return Err(Error::Parameter(format!("need 0 < beta < 1/2, got {beta}")));
    }
    if n < 2 {
        return Err(Error::Parameter(format!("need n >= 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj = vec![vec![false; n]; n];
    for (u, row) in adj.iter_mut().enumerate() {
        for (v, cell) in row.iter_mut().enumerate() {
            *cell = u != v && rng.gen_bool(0.3);
        }
    }
    for _ in 0..=n * n {
        let g = Digraph::from_matrix(&adj);
        let report = check_semi_exact(&g, beta)?;
        let Some(w) = report.witness else {
            return Ok(g);
        };
        let dir = match w.clause {
            crate::conditions::Clause::In => Direction::In,
            _ => Direction::Out,
        };
        let degree = |v: usize| match dir {
            Direction::Out => g.out_degree(v),
            Direction::In => g.in_degree(v),
        };
        let v = (0..n)
            .filter(|&v| degree(v) < n - 1)
            .min_by_key(|&v| (degree(v), v))
            .ok_or_else(|| Error::Generation("complete digraph still fails the condition".into()))?;
        let free: Vec<usize> = (0..n)
            .filter(|&u| {
                u != v
                    && !match dir {
                        Direction::Out => adj[v][u],
                        Direction::In => adj[u][v],
                    }
            })
            .collect();
        let &u = free.choose(&mut rng).expect("degree below n-1");
        match dir {
            Direction::Out => adj[v][u] = true,
            Direction::In => adj[u][v] = true,
        }
    }
    Err(Error::Generation("repair loop exceeded n^2 additions".into()))
}

/// A reduced digraph for the cycle-cover algorithm: an independent set `I`
/// of size just above `k/2` and a complete digraph on the rest `K`, with all
/// edges between them in both directions except random deletions that keep
/// every degree at least `(1/2 − 2d)k`. Vertices are relabelled randomly.
pub fn gen_cover_instance(k: usize, d: Rational, seed: u64) -> Result<Digraph> {
    let floor = ceil_int(&((Rational::new(1, 2) - int(2) * d) * int(k)));
    if floor < 1 || k < 4 {
        return Err(Error::Parameter(format!("degenerate cover instance k={k}, d={d}")));
    }
    let floor = floor as usize;
    let lo = k.div_ceil(2);
    let hi = k - floor;
    if lo > hi {
        return Err(Error::Parameter(format!("d={d} leaves no room for |I| > k/2 at k={k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let i_size = rng.gen_range(lo..=hi);
    let kset: Vec<usize> = (i_size..k).collect();
    let slack = kset.len() - floor;
    let mut edges = Vec::new();
    for u in i_size..k {
        for v in i_size..k {
            if u != v {
                edges.push((u, v));
            }
        }
    }
    for u in 0..i_size {
        for dir in [Direction::Out, Direction::In] {
            let drop = rng.gen_range(0..=slack);
            let mut keep = kset.clone();
            keep.shuffle(&mut rng);
            for &x in &keep[drop..] {
                edges.push(match dir {
                    Direction::Out => (u, x),
                    Direction::In => (x, u),
                });
            }
        }
    }
    let mut perm: Vec<usize> = (0..k).collect();
    perm.shuffle(&mut rng);
    let g = Digraph::new(k, edges.into_iter().map(|(u, v)| (perm[u], perm[v])))?;
    if (0..k).any(|v| g.out_degree(v) < floor || g.in_degree(v) < floor) {
        return Err(Error::Generation("cover instance fell below the degree floor".into()));
    }
    Ok(g)
}

/// Singleton clusters, for treating a digraph as its own reduced digraph.
pub fn singleton_partition(n: usize) -> Result<ClusterPartition> {
    ClusterPartition::new(n, Vec::new(), (0..n).map(|v| vec![v]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::check_ghouila_houri;
    use crate::rational::ratio;
    use crate::regular::pair_densities;

    #[test]
    fn complete_density_blowup() {
        let (r0, f0) = standard_blowup_frame(8).unwrap();
        let b = gen_blowup(&r0, &f0, 10, 1.0, 0, 1).unwrap();
        assert_eq!(b.g.n(), 80);
        let dens = pair_densities(&b.g, &b.partition);
        for i in 0..8 {
            for j in 0..8 {
                let want = if i == j { 0 } else { 1 };
                assert_eq!(dens[i][j], Rational::from_integer(want), "pair ({i}, {j})");
            }
        }
    }

    #[test]
    fn dense_f_pairs_certify() {
        let (r0, f0) = standard_blowup_frame(8).unwrap();
        let b = gen_blowup(&r0, &f0, 12, 0.8, 2, 7).unwrap();
        assert_eq!(b.partition.v0, vec![96, 97]);
        for x in 0..8 {
            let p = Pair::new(
                &b.g,
                b.partition.clusters[x].clone(),
                b.partition.clusters[f0.successor(x)].clone(),
            )
            .unwrap();
            let v = certify_super_regular(&p, ratio(1, 2), ratio(2, 5), CertifyMode::Exhaustive).unwrap();
            assert!(v.super_regular, "F-pair at {x}");
        }
    }

    #[test]
    fn blowup_parameter_errors() {
        let r0 = Digraph::complete(6);
        let f0 = OneFactor::from_cycles(6, &[vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        assert!(matches!(gen_blowup(&r0, &f0, 10, 0.9, 0, 0), Err(Error::Parameter(_))));
        let (r0, f0) = standard_blowup_frame(4).unwrap();
        assert!(matches!(gen_blowup(&r0, &f0, 9, 0.9, 0, 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn random_condition_passes() {
        for seed in 0..5 {
            let g = gen_random_condition(16, ratio(1, 4), seed).unwrap();
            assert!(check_semi_exact(&g, ratio(1, 4)).unwrap().holds);
        }
        assert!(matches!(gen_random_condition(16, ratio(1, 2), 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn near_half_is_near_ghouila_houri() {
        let hits = (0..10)
            .filter(|&s| check_ghouila_houri(&gen_random_condition(14, ratio(12, 25), s).unwrap()).holds)
            .count();
        assert!(hits >= 5, "{hits}/10");
    }

    #[test]
    fn cover_instance_shape() {
        let g = gen_cover_instance(40, ratio(1, 40), 3).unwrap();
        // floor = ceil((1/2 - 1/20) * 40) = 18
        assert!((0..40).all(|v| g.out_degree(v) >= 18 && g.in_degree(v) >= 18));
    }
}
