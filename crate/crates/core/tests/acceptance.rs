//! Acceptance run: one line per criterion, nonzero exit if a gating criterion
//! fails. Criterion 10 is exploratory and only logged.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hamlab_core::assembly::{coarsens, merge_matching, assemble_hamilton, AssemblyParams};
use hamlab_core::conditions::{check_nash_williams_chvatal, check_semi_exact, gen_extremal_chvatal};
use hamlab_core::cover::{cover_by_cycles, verify_inherited_degrees};
use hamlab_core::lab::{
    brute_force_hamiltonian, gen_blowup, gen_cover_instance, gen_random_condition,
    singleton_partition, standard_blowup_frame,
};
use hamlab_core::matching::{find_one_factor, find_separator, max_matching, min_cover, FactorCertificate};
use hamlab_core::rational::ratio;
use hamlab_core::regular::{
    certify_regular, certify_super_regular, chernoff_audit, regular_pair_matching, CertifyMode, Pair,
};
use hamlab_core::walks::{account, build_h, disjoint_shifted_walks, unshift};
use hamlab_core::{verify_hamilton_cycle, BipartiteGraph, Digraph, Error, OneFactor};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_digraph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Digraph {
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| u != v)
        .filter(|_| rng.gen_bool(p))
        .collect();
    Digraph::new(n, edges).unwrap()
}

fn reach_all(n: usize, adj: &dyn Fn(usize) -> Vec<usize>) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for v in adj(u) {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn strongly_connected(g: &Digraph) -> bool {
    let n = g.n();
    let rev: Vec<Vec<usize>> = (0..n).map(|v| (0..n).filter(|&u| g.has_edge(u, v)).collect()).collect();
    reach_all(n, &|u| g.out_neighbors(u).to_vec()) && reach_all(n, &|u| rev[u].clone())
}

/// Labels of the cycles of a successor permutation.
fn cycle_labels(succ: &[usize]) -> Vec<usize> {
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

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut bad = 0;
    for i in 0..500 {
        let a = rng.gen_range(1..=40);
        let b = rng.gen_range(1..=40);
        let p = [0.1, 0.3, 0.7][i % 3];
        let edges: Vec<(usize, usize)> = (0..a)
            .flat_map(|x| (0..b).map(move |y| (x, y)))
            .filter(|_| rng.gen_bool(p))
            .collect();
        let g = BipartiteGraph::new(a, b, edges.iter().copied()).unwrap();
        let m = max_matching(&g);
        let c = min_cover(&g);
        let mut in_a = vec![false; a];
        let mut in_b = vec![false; b];
        c.a_side.iter().for_each(|&x| in_a[x] = true);
        c.b_side.iter().for_each(|&y| in_b[y] = true);
        let covered = edges.iter().all(|&(x, y)| in_a[x] || in_b[y]);
        // a valid matching and a valid cover of equal size are both optimal
        if !(m.is_valid_in(&g) && covered && m.len() == c.len()) {
            bad += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        bad == 0 && secs < 5.0,
        format!("500 bipartite graphs, {bad} mismatches, {secs:.2} s (limit 5 s)"),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut bad, mut factors, mut violators) = (0, 0, 0);
    for i in 0..500 {
        let n = rng.gen_range(2..=12);
        let p = [0.1, 0.15, 0.2, 0.3, 0.5][i % 5];
        let g = random_digraph(n, p, &mut rng);
        let out: Vec<u32> = (0..n).map(|u| g.out_neighbors(u).iter().fold(0, |m, &v| m | 1 << v)).collect();
        let nbhd = |s: u32| (0..n).filter(|&u| s >> u & 1 == 1).fold(0u32, |m, u| m | out[u]);
        let hall = (1u32..1 << n).all(|s| nbhd(s).count_ones() >= s.count_ones());
        let ok = match find_one_factor(&g) {
            FactorCertificate::Factor(f) => {
                factors += 1;
                let succ = f.successors();
                let mut hit = vec![false; n];
                hall && succ.iter().enumerate().all(|(u, &v)| g.has_edge(u, v) && !std::mem::replace(&mut hit[v], true))
            }
            FactorCertificate::Violator(s) => {
                violators += 1;
                let mask = s.iter().fold(0u32, |m, &v| m | 1 << v);
                !hall && !s.is_empty() && nbhd(mask).count_ones() < mask.count_ones()
            }
        };
        if !ok {
            bad += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        bad == 0 && secs < 30.0,
        format!("500 digraphs ({factors} factors, {violators} violators), {bad} disagreements with exhaustive Hall, {secs:.2} s"),
    )
}

fn criterion_3() -> Outcome {
    let mut bad = Vec::new();
    let mut count = 0;
    for n in 6..=18 {
        for k in (1..).take_while(|&k| 2 * k < n) {
            count += 1;
            let g = gen_extremal_chvatal(n, k).unwrap();
            let mut expect = vec![k; k];
            expect.extend(vec![n - 1 - k; n - 2 * k]);
            expect.extend(vec![n - 1; k]);
            let seq = g.degree_sequences();
            let ok = strongly_connected(&g)
                && brute_force_hamiltonian(&g).unwrap().is_none()
                && seq.out_sorted == expect
                && seq.in_sorted == expect
                && check_nash_williams_chvatal(&g).first_violation == Some(k);
            if !ok {
                bad.push((n, k));
            }
        }
    }
    outcome(bad.is_empty(), format!("{count} extremal instances, failures {bad:?}"))
}

fn criterion_4() -> Outcome {
    let d = ratio(1, 400);
    let mut bad = Vec::new();
    let mut worst_waste = 0;
    let mut worst_secs = 0f64;
    for seed in 0..50 {
        let start = Instant::now();
        let g = gen_cover_instance(400, d, seed).unwrap();
        let part = singleton_partition(400).unwrap();
        let inherited = verify_inherited_degrees(&g, &part, &g, d, ratio(1, 4)).unwrap().holds;
        let res = cover_by_cycles(&g, d, Some(seed));
        let secs = start.elapsed().as_secs_f64();
        worst_secs = worst_secs.max(secs);
        let ok = match res {
            Ok(c) => {
                worst_waste = worst_waste.max(c.waste.len());
                c.validate(&g).is_ok() && c.waste.len() <= 140 && c.trace.iter().all(|s| s.endpoint_invariant)
            }
            Err(_) => false,
        };
        if !(inherited && ok && secs < 10.0) {
            bad.push(seed);
        }
    }
    outcome(
        bad.is_empty(),
        format!("50 instances k=400, worst waste {worst_waste} (limit 140), slowest {worst_secs:.2} s, failing seeds {bad:?}"),
    )
}

/// Host on `2n` vertices, `A = 0..n`, `B = n..2n`, `A → B` edges at density
/// `p`; the first `isolated` vertices of `A` get no edges.
fn pair_host(n: usize, p: f64, isolated: usize, rng: &mut ChaCha8Rng) -> Digraph {
    let edges: Vec<(usize, usize)> = (isolated..n)
        .flat_map(|a| (n..2 * n).map(move |b| (a, b)))
        .filter(|_| rng.gen_bool(p))
        .collect();
    Digraph::new(2 * n, edges).unwrap()
}

fn matching_is_valid(host: &Digraph, n: usize, pairs: &[(usize, usize)]) -> bool {
    let mut used = vec![false; 2 * n];
    pairs.iter().all(|&(a, b)| {
        a < n && (n..2 * n).contains(&b) && host.has_edge(a, b) && !std::mem::replace(&mut used[a], true)
            && !std::mem::replace(&mut used[b], true)
    })
}

fn criterion_5() -> Outcome {
    let n = 64;
    let eps = ratio(1, 4);
    let half = ratio(1, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut regular, mut smallest, mut bad_regular, mut drawn) = (0, usize::MAX, 0, 0);
    while regular < 100 && drawn < 1000 {
        drawn += 1;
        let host = pair_host(n, rng.gen_range(0.55..0.9), rng.gen_range(0..=3), &mut rng);
        let pair = Pair::new(&host, (0..n).collect(), (n..2 * n).collect()).unwrap();
        let verdict = certify_regular(&pair, eps, CertifyMode::Sampled { samples: 2000, seed: drawn }).unwrap();
        if !verdict.regular || verdict.density < half {
            continue;
        }
        regular += 1;
        match regular_pair_matching(&pair, eps, false) {
            Ok(m) if matching_is_valid(&host, n, &m.pairs) && m.len() >= 48 => smallest = smallest.min(m.len()),
            _ => bad_regular += 1,
        }
    }
    let (mut superreg, mut bad_super, mut drawn_super) = (0, 0, 0);
    while superreg < 100 && drawn_super < 1000 {
        drawn_super += 1;
        let host = pair_host(n, rng.gen_range(0.7..0.9), 0, &mut rng);
        let pair = Pair::new(&host, (0..n).collect(), (n..2 * n).collect()).unwrap();
        let mode = CertifyMode::Sampled { samples: 2000, seed: drawn_super };
        if !certify_super_regular(&pair, eps, half, mode).unwrap().super_regular {
            continue;
        }
        superreg += 1;
        match regular_pair_matching(&pair, eps, true) {
            Ok(m) if matching_is_valid(&host, n, &m.pairs) && m.len() == n => {}
            _ => bad_super += 1,
        }
    }
    outcome(
        regular == 100 && superreg == 100 && bad_regular == 0 && bad_super == 0,
        format!(
            "{regular} regular pairs (smallest matching {smallest}, need 48, {bad_regular} short), \
             {superreg} super-regular pairs ({bad_super} without a perfect matching)"
        ),
    )
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

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut done, mut bad, mut redraws, mut fewest) = (0, Vec::new(), 0, usize::MAX);
    while done < 50 {
        let k = rng.gen_range(12..=40);
        let c = if done % 2 == 0 { ratio(1, 5) } else { ratio(2, 5) };
        let kappa = (c * hamlab_core::rational::int(k)).ceil().to_integer() as usize;
        let s = kappa + 2;
        let f = random_factor(k, &mut rng);
        let mut label: Vec<usize> = (0..k).collect();
        label.shuffle(&mut rng);
        let edges: Vec<(usize, usize)> = (0..k)
            .flat_map(|a| (1..=s).map(move |j| (a, (a + j) % k)))
            .map(|(a, b)| (label[a], label[b]))
            .filter(|&(a, b)| f.predecessor(a) != b)
            .collect();
        let h = Digraph::new(k, edges).unwrap();
        if s >= k || find_separator(&h, kappa).is_some() {
            redraws += 1;
            continue;
        }
        done += 1;
        let r = unshift(&h, &f).unwrap();
        let round_trip = build_h(&r, &f).unwrap().edges().eq(h.edges());
        let a = rng.gen_range(0..k);
        let b = (a + rng.gen_range(1..k)) % k;
        let need = (c * c * hamlab_core::rational::int(k) / ratio(16, 1)).ceil().to_integer() as usize;
        let max_t = (ratio(2, 1) / c).floor().to_integer() as usize;
        let mut return_mismatch = false;
        let ok = match disjoint_shifted_walks(&r, &f, a, b, c) {
            Ok(walks) => {
                // clusters internally used by each walk, once per walk
                let mut owners = vec![0; k];
                for w in &walks {
                    let mut mine = vec![false; k];
                    for &x in &w.entrances[1..w.t()] {
                        mine[x] = true;
                        mine[f.predecessor(x)] = true;
                    }
                    let usage = account(std::slice::from_ref(w), &f);
                    if (0..k).any(|x| mine[x] != (usage.internal_uses[x] > 0)) {
                        return_mismatch = true;
                    }
                    (0..k).filter(|&x| mine[x]).for_each(|x| owners[x] += 1);
                }
                fewest = fewest.min(walks.len());
                walks.len() >= need
                    && walks.iter().all(|w| {
                        w.t() <= max_t && w.validate(&r, &f).is_ok() && w.start() == a && w.end() == b
                    })
                    && owners.iter().all(|&o| o <= 1)
                    && !return_mismatch
            }
            Err(_) => false,
        };
        if !(ok && round_trip) {
            bad.push((k, a, b));
        }
    }
    outcome(
        bad.is_empty(),
        format!("50 shifted-walk instances ({redraws} redraws), fewest walks {fewest}, failures {bad:?}"),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut merged, mut refused, mut bad) = (0, 0, 0);
    for _ in 0..100 {
        let m = rng.gen_range(1..=10);
        let n = 2 * m + rng.gen_range(0..=6);
        let succ = loop {
            let mut succ = vec![0; n];
            let mut up: Vec<usize> = (m..2 * m).collect();
            up.shuffle(&mut rng);
            succ[..m].copy_from_slice(&up);
            let mut from: Vec<usize> = (m..n).collect();
            let mut to: Vec<usize> = (0..m).chain(2 * m..n).collect();
            from.shuffle(&mut rng);
            to.shuffle(&mut rng);
            for (&a, &b) in from.iter().zip(&to) {
                succ[a] = b;
            }
            if (0..n).all(|v| succ[v] != v) {
                break succ;
            }
        };
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v)
            .filter(|&(u, v)| succ[u] == v || (u < m && (m..2 * m).contains(&v) && rng.gen_bool(0.8)))
            .collect();
        let g = Digraph::new(n, edges).unwrap();
        // J on the upper side, built here from scratch
        let first_return = |u: usize| {
            let mut v = u;
            while v >= m {
                v = succ[v];
            }
            v
        };
        let j_hamiltonian = if m == 1 {
            g.has_edge(first_return(m), m)
        } else {
            let j_edges: Vec<(usize, usize)> = (0..m)
                .flat_map(|i| (0..m).map(move |t| (i, t)))
                .filter(|&(i, t)| i != t && g.has_edge(first_return(m + i), m + t))
                .collect();
            brute_force_hamiltonian(&Digraph::new(m, j_edges).unwrap()).unwrap().is_some()
        };
        let lower: Vec<usize> = (0..m).collect();
        let upper: Vec<usize> = (m..2 * m).collect();
        let mut after = succ.clone();
        match merge_matching(&g, &mut after, &lower, &upper, Duration::from_secs(2), 7) {
            Ok(_) => {
                let before = cycle_labels(&succ);
                let labels = cycle_labels(&after);
                let mut hit = vec![false; n];
                let perm = after.iter().all(|&v| !std::mem::replace(&mut hit[v], true));
                let in_g = (0..n).all(|u| g.has_edge(u, after[u]));
                if j_hamiltonian && perm && in_g && coarsens(&before, &labels) && (0..2 * m).all(|v| labels[v] == labels[0]) {
                    merged += 1;
                } else {
                    bad += 1;
                }
            }
            Err(Error::NotHamiltonian) if !j_hamiltonian => refused += 1,
            Err(_) => bad += 1,
        }
    }
    outcome(
        bad == 0,
        format!("100 merges: {merged} merged, {refused} correctly refused (J non-Hamiltonian), {bad} wrong"),
    )
}

fn criterion_8() -> Outcome {
    let mut bad = Vec::new();
    let mut slowest = 0f64;
    for i in 0..20u64 {
        let k = [8, 12][i as usize % 2];
        let m = [10, 12][i as usize / 2 % 2];
        let density = [0.7, 0.8][i as usize / 4 % 2];
        let v0 = i as usize % 3;
        let start = Instant::now();
        let (r0, f0) = standard_blowup_frame(k).unwrap();
        let b = gen_blowup(&r0, &f0, m, density, v0, 800 + i).unwrap();
        let res = assemble_hamilton(&b.g, &b.partition, &b.factor, &AssemblyParams::default(), 800 + i);
        let secs = start.elapsed().as_secs_f64();
        slowest = slowest.max(secs);
        let ok = match res {
            Ok(cert) => verify_hamilton_cycle(&b.g, &cert).unwrap_or(false) && cert.order.len() == b.g.n(),
            Err(e) => {
                eprintln!("  blow-up {i} (k={k}, m={m}, p={density}, |V0|={v0}): {e}");
                false
            }
        };
        if !(ok && secs < 30.0) {
            bad.push(i);
        }
    }
    outcome(bad.is_empty(), format!("20 blow-ups, slowest {slowest:.2} s (limit 30 s), failures {bad:?}"))
}

fn criterion_9() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (num, den) in [(1, 10), (1, 2), (1, 1)] {
        let audit = chernoff_audit(1000, 300, 200, 100_000, ratio(num, den), 9).unwrap();
        let bound = 2.0 * (-(num as f64 / den as f64).powi(2) * 60.0 / 3.0).exp();
        let ok = audit.passes && audit.empirical_tail <= bound && (audit.bound - bound).abs() < 1e-12;
        pass &= ok;
        parts.push(format!("a={num}/{den}: tail {:.5} <= {:.5}", audit.empirical_tail, bound));
    }
    outcome(pass, parts.join(", "))
}

fn criterion_10() -> Outcome {
    let beta = ratio(1, 4);
    let (mut hamiltonian, mut condition) = (0, 0);
    let mut counterexamples = Vec::new();
    for i in 0..200u64 {
        let n = 12 + i as usize % 7;
        let g = gen_random_condition(n, beta, 1000 + i).unwrap();
        if check_semi_exact(&g, beta).unwrap().holds {
            condition += 1;
        }
        if brute_force_hamiltonian(&g).unwrap().is_some() {
            hamiltonian += 1;
        } else {
            counterexamples.push((n, 1000 + i));
        }
    }
    outcome(
        true,
        format!("{condition}/200 satisfy the condition, {hamiltonian}/200 Hamiltonian, non-Hamiltonian (n, seed): {counterexamples:?}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(u8, &str, fn() -> Outcome); 10] = [
        (1, "max matching equals min vertex cover", criterion_1),
        (2, "1-factor or Hall violator, checked exhaustively", criterion_2),
        (3, "extremal family is tight", criterion_3),
        (4, "cycle cover waste and endpoint invariant", criterion_4),
        (5, "matchings in regular and super-regular pairs", criterion_5),
        (6, "disjoint shifted walks", criterion_6),
        (7, "merge puts G_U on one cycle", criterion_7),
        (8, "Hamilton cycles in blow-ups", criterion_8),
        (9, "hypergeometric tail bound", criterion_9),
        (10, "random condition instances (exploratory)", criterion_10),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let status = match (id, o.pass) {
            (10, _) => "LOG ",
            (_, true) => "PASS",
            (_, false) => "FAIL",
        };
        if id != 10 && !o.pass {
            failed += 1;
        }
        println!("criterion {id:>2} [{status}] {name}: {} ({:.1} s)", o.detail, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of 9 gating criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
