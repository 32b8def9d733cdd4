use hamlab_core::assembly::coarsens;
use hamlab_core::lab::brute_force_hamiltonian;
use hamlab_core::matching::{find_one_factor, find_separator, max_matching, min_cover, strong_connectivity, FactorCertificate};
use hamlab_core::rational::{parse_rational, ratio};
use hamlab_core::walks::{account, build_h, shorten_walk, unshift, ShiftedWalk};
use hamlab_core::{verify_hamilton_cycle, BipartiteGraph, Digraph, OneFactor};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_digraph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Digraph {
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| u != v)
        .filter(|_| rng.gen_bool(p))
        .collect();
    Digraph::new(n, edges).unwrap()
}

fn random_factor(k: usize, rng: &mut ChaCha8Rng) -> OneFactor {
    loop {
        let mut succ: Vec<usize> = (0..k).collect();
        succ.shuffle(rng);
        if let Ok(f) = OneFactor::from_successors(succ) {
            return f;
        }
    }
}

/// Hamiltonicity by trying every cyclic order starting at 0.
fn hamiltonian_by_permutations(g: &Digraph) -> bool {
    fn extend(g: &Digraph, path: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let n = used.len();
        if path.len() == n {
            return g.has_edge(path[n - 1], path[0]);
        }
        for v in 1..n {
            if !used[v] && g.has_edge(path[path.len() - 1], v) {
                used[v] = true;
                path.push(v);
                if extend(g, path, used) {
                    return true;
                }
                path.pop();
                used[v] = false;
            }
        }
        false
    }
    let mut used = vec![false; g.n()];
    used[0] = true;
    extend(g, &mut vec![0], &mut used)
}

fn connectivity_by_subsets(g: &Digraph) -> usize {
    let n = g.n();
    (0u32..1 << n)
        .filter(|&s| {
            let removed: Vec<bool> = (0..n).map(|v| s >> v & 1 == 1).collect();
            !g.is_strongly_connected_without(&removed)
        })
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap_or(n - 1)
        .min(n - 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn h_degrees_follow_predecessors(seed in any::<u64>(), k in 2usize..12, p in 0.1f64..0.9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_digraph(k, p, &mut rng);
        let f = random_factor(k, &mut rng);
        let h = build_h(&r, &f).unwrap();
        for a in 0..k {
            let x = f.predecessor(a);
            let loop_edge = usize::from(r.has_edge(x, a));
            prop_assert_eq!(h.out_neighbors(a).len(), r.out_neighbors(x).len() - loop_edge);
        }
        // in-degrees: b is entered from a whenever a⁻ → b, except a = b
        for b in 0..k {
            let in_r = (0..k).filter(|&x| r.has_edge(x, b)).count();
            let in_h = (0..k).filter(|&a| h.has_edge(a, b)).count();
            prop_assert_eq!(in_h, in_r - usize::from(r.has_edge(f.predecessor(b), b)));
        }
    }

    #[test]
    fn unshift_inverts_build_h_off_f(seed in any::<u64>(), k in 2usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_digraph(k, 0.5, &mut rng);
        let f = random_factor(k, &mut rng);
        let back = unshift(&build_h(&r, &f).unwrap(), &f).unwrap();
        let expect: Vec<(usize, usize)> = r.edges().filter(|&(u, v)| f.successor(u) != v).collect();
        prop_assert_eq!(back.edges().collect::<Vec<_>>(), expect);
    }

    #[test]
    fn shortened_walks_keep_ends_and_drop_repeats(seed in any::<u64>(), k in 3usize..10, len in 0usize..16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_digraph(k, 0.6, &mut rng);
        let f = random_factor(k, &mut rng);
        let h = build_h(&r, &f).unwrap();
        let mut e = vec![rng.gen_range(0..k)];
        for _ in 0..len {
            let out = h.out_neighbors(*e.last().unwrap());
            if out.is_empty() {
                break;
            }
            e.push(out[rng.gen_range(0..out.len())]);
        }
        let w = ShiftedWalk { entrances: e };
        prop_assert!(w.validate(&r, &f).is_ok());
        let s = shorten_walk(&w);
        prop_assert_eq!(s.start(), w.start());
        prop_assert_eq!(s.end(), w.end());
        prop_assert!(s.t() <= w.t());
        prop_assert!(s.validate(&r, &f).is_ok());
        let t = s.t();
        let mut entrances = s.entrances[1..].to_vec();
        entrances.sort_unstable();
        entrances.dedup();
        prop_assert_eq!(entrances.len(), t);
        let mut exits = s.exits(&f);
        exits.sort_unstable();
        exits.dedup();
        prop_assert_eq!(exits.len(), t);
    }

    #[test]
    fn walk_accounting_balances(seed in any::<u64>(), k in 3usize..10, walks in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_factor(k, &mut rng);
        let ws: Vec<ShiftedWalk> = (0..walks)
            .map(|_| ShiftedWalk { entrances: (0..rng.gen_range(1..8)).map(|_| rng.gen_range(0..k)).collect() })
            .collect();
        let u = account(&ws, &f);
        let t: usize = ws.iter().map(|w| w.t()).sum();
        prop_assert_eq!(u.entrance_uses.iter().sum::<usize>(), t);
        prop_assert_eq!(u.exit_uses.iter().sum::<usize>(), t);
        prop_assert_eq!(u.total_uses(), 2 * t);
        prop_assert_eq!(u.entered.iter().sum::<usize>(), u.exited.iter().sum::<usize>());
        prop_assert!(u.internal_uses.iter().zip(&u.uses).all(|(i, a)| i <= a));
    }

    #[test]
    fn konig_on_small_bipartite_graphs(seed in any::<u64>(), a in 1usize..15, b in 1usize..15, p in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges: Vec<(usize, usize)> = (0..a).flat_map(|x| (0..b).map(move |y| (x, y))).filter(|_| rng.gen_bool(p)).collect();
        let g = BipartiteGraph::new(a, b, edges).unwrap();
        let m = max_matching(&g);
        let c = min_cover(&g);
        prop_assert!(m.is_valid_in(&g));
        prop_assert!(c.covers(&g));
        prop_assert_eq!(m.len(), c.len());
    }

    #[test]
    fn one_factor_iff_hall(seed in any::<u64>(), n in 2usize..9, p in 0.05f64..0.6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_digraph(n, p, &mut rng);
        let nbhd = |s: u32| (0..n).filter(|&u| s >> u & 1 == 1).fold(0u32, |m, u| {
            g.out_neighbors(u).iter().fold(m, |m, &v| m | 1 << v)
        });
        let hall = (1u32..1 << n).all(|s| nbhd(s).count_ones() >= s.count_ones());
        match find_one_factor(&g) {
            FactorCertificate::Factor(f) => {
                prop_assert!(hall);
                prop_assert!((0..n).all(|u| g.has_edge(u, f.successor(u))));
            }
            FactorCertificate::Violator(s) => {
                prop_assert!(!hall);
                let mask = s.iter().fold(0u32, |m, &v| m | 1 << v);
                prop_assert!(nbhd(mask).count_ones() < mask.count_ones());
            }
        }
    }

    #[test]
    fn brute_force_agrees_with_permutations(seed in any::<u64>(), n in 2usize..9, p in 0.2f64..0.8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_digraph(n, p, &mut rng);
        let found = brute_force_hamiltonian(&g).unwrap();
        prop_assert_eq!(found.is_some(), hamiltonian_by_permutations(&g));
        if let Some(cert) = found {
            prop_assert!(verify_hamilton_cycle(&g, &cert).unwrap());
        }
    }

    #[test]
    fn connectivity_matches_subset_search(seed in any::<u64>(), n in 2usize..8, p in 0.3f64..1.0, k in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_digraph(n, p, &mut rng);
        let kappa = connectivity_by_subsets(&g);
        prop_assert_eq!(strong_connectivity(&g), kappa);
        match find_separator(&g, k) {
            Some(sep) => {
                prop_assert!(sep.len() < k);
                let mut removed = vec![false; n];
                sep.iter().for_each(|&v| removed[v] = true);
                prop_assert!(!g.is_strongly_connected_without(&removed));
            }
            None => prop_assert!(kappa >= k || kappa == n - 1),
        }
    }

    #[test]
    fn rationals_round_trip(num in -1000i64..1000, den in 1i64..1000) {
        let x = ratio(num, den);
        prop_assert_eq!(parse_rational(&x.to_string()).unwrap(), x);
    }

    #[test]
    fn coarsening_is_reflexive_and_trivial_partition_is_coarsest(labels in prop::collection::vec(0usize..5, 1..20)) {
        prop_assert!(coarsens(&labels, &labels));
        prop_assert!(coarsens(&labels, &vec![0; labels.len()]));
    }
}
