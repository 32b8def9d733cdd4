use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::digraph::{Digraph, Direction, OneFactor};
use crate::error::{Error, Result};
use crate::matching::{find_separator, strong_connectivity};
use crate::rational::{self, ceil_int, floor_int, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentDecomposition {
    pub s: Vec<usize>,
    pub c: Vec<usize>,
    pub d: Vec<usize>,
    pub c_small: Vec<usize>,
    pub d_small: Vec<usize>,
    pub l: Vec<usize>,
    pub r: Vec<usize>,
    pub m_v: Vec<usize>,
    pub t: Vec<usize>,
    pub b: Vec<usize>,
    pub m_h: Vec<usize>,
    pub m_v_lr: Vec<usize>,
    pub m_v_rl: Vec<usize>,
    pub m_h_lr: Vec<usize>,
    pub m_h_rl: Vec<usize>,
    #[serde(with = "rational::serde_str")]
    pub eta: Rational,
    #[serde(with = "rational::serde_str")]
    pub eta_prime: Rational,
    #[serde(with = "rational::serde_str")]
    pub beta: Rational,
}

impl ComponentDecomposition {
    pub fn c_prime(&self) -> Vec<usize> {
        minus(&self.c, &self.c_small)
    }

    pub fn d_prime(&self) -> Vec<usize> {
        minus(&self.d, &self.d_small)
    }
}

fn minus(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| !b.contains(x)).collect()
}

fn count_in(list: &[usize], mask: &[bool]) -> usize {
    list.iter().filter(|&&v| mask[v]).count()
}

fn mask_of(k: usize, set: &[usize]) -> Vec<bool> {
    let mut m = vec![false; k];
    for &v in set {
        m[v] = true;
    }
    m
}

/// Splits a digraph that is not strongly `⌈ηk⌉`-connected into shifted
/// components `L`, `R` and the middle sets.
pub fn decompose_components(
    h: &Digraph,
    f: &OneFactor,
    eta: Rational,
    eta_prime: Rational,
    beta: Rational,
) -> Result<ComponentDecomposition> {
    let k = h.n();
    if f.n() != k {
        return Err(Error::Parameter(format!("factor on {} vertices, H on {k}", f.n())));
    }
    let zero = Rational::from_integer(0);
    if eta <= zero || eta_prime <= zero || beta <= zero {
        return Err(Error::Parameter("eta, eta', beta must be positive".into()));
    }
    let bound = ceil_int(&(eta * int(k))) as usize;
    let Some(s) = find_separator(h, bound) else {
        return Err(Error::WrongPipeline {
            message: format!("H is strongly {bound}-connected; use the highly connected pipeline"),
            separator: None,
        });
    };
    let s_mask = mask_of(k, &s);
    let rest: Vec<usize> = (0..k).filter(|&v| !s_mask[v]).collect();
    let sub = h.remove_vertices(&s)?;
    let comps = sub.strongly_connected_components();
    // sources first, so any prefix receives no edge from the suffix
    let half = int(rest.len()) / Rational::from_integer(2);
    let mut size = 0;
    let mut best = (None::<Rational>, 1);
    for (p, comp) in comps.iter().enumerate().take(comps.len().saturating_sub(1)) {
        size += comp.len();
        let gap = (int(size) - half).abs();
        if best.0.is_none_or(|g| gap < g) {
            best = (Some(gap), p + 1);
        }
    }
    if comps.len() < 2 {
        return Err(Error::contract("H minus the separator is strongly connected", Some(s)));
    }
    let mut d: Vec<usize> = comps[..best.1].iter().flatten().map(|&i| rest[i]).collect();
    let mut c: Vec<usize> = comps[best.1..].iter().flatten().map(|&i| rest[i]).collect();
    d.sort_unstable();
    c.sort_unstable();
    let c_mask = mask_of(k, &c);
    let d_mask = mask_of(k, &d);
    let small = Rational::from_integer(10);
    let c_small: Vec<usize> = c
        .iter()
        .copied()
        .filter(|&v| int(count_in(h.in_neighbors(v), &c_mask)) <= beta * int(k) / small)
        .collect();
    let d_small: Vec<usize> = d
        .iter()
        .copied()
        .filter(|&v| int(count_in(h.out_neighbors(v), &d_mask)) <= beta * int(k) / small)
        .collect();
    let cp = mask_of(k, &minus(&c, &c_small));
    let dp = mask_of(k, &minus(&d, &d_small));
    let mut s_prime: Vec<usize> = s.iter().chain(&c_small).chain(&d_small).copied().collect();
    s_prime.sort_unstable();
    let thr = eta_prime * int(k);
    let deg = |v: usize, dir: Direction, m: &[bool]| int(count_in(h.neighbors(v, dir), m));
    let joins = |v: usize, m: &[bool]| deg(v, Direction::Out, m) >= thr && deg(v, Direction::In, m) >= thr;
    let mut l_mask = cp.clone();
    let mut r_mask = dp.clone();
    let mut m_v = Vec::new();
    for &v in &s_prime {
        if joins(v, &cp) {
            l_mask[v] = true;
        } else if joins(v, &dp) {
            r_mask[v] = true;
        } else {
            m_v.push(v);
        }
    }
    let mut m_v_lr = Vec::new();
    let mut m_v_rl = Vec::new();
    for &v in &m_v {
        let lr = deg(v, Direction::Out, &cp) < thr && deg(v, Direction::In, &dp) < thr;
        let rl = deg(v, Direction::Out, &dp) < thr && deg(v, Direction::In, &cp) < thr;
        let to_lr = if lr || rl {
            lr
        } else {
            // neither side of the dichotomy holds; take the lesser violation
            deg(v, Direction::Out, &cp) + deg(v, Direction::In, &dp)
                <= deg(v, Direction::Out, &dp) + deg(v, Direction::In, &cp)
        };
        if to_lr {
            m_v_lr.push(v);
        } else {
            m_v_rl.push(v);
        }
    }
    let by_succ = |m: &[bool]| -> Vec<usize> { (0..k).filter(|&x| m[f.successor(x)]).collect() };
    let mv_mask = mask_of(k, &m_v);
    let l: Vec<usize> = (0..k).filter(|&v| l_mask[v]).collect();
    let r: Vec<usize> = (0..k).filter(|&v| r_mask[v]).collect();
    Ok(ComponentDecomposition {
        t: by_succ(&l_mask),
        b: by_succ(&r_mask),
        m_h: by_succ(&mv_mask),
        m_h_lr: by_succ(&mask_of(k, &m_v_lr)),
        m_h_rl: by_succ(&mask_of(k, &m_v_rl)),
        s,
        c,
        d,
        c_small,
        d_small,
        l,
        r,
        m_v,
        m_v_lr,
        m_v_rl,
        eta,
        eta_prime,
        beta,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub holds: bool,
    /// Slack of the bound; negative when violated, absent when vacuous.
    #[serde(with = "rational::serde_opt_str")]
    pub margin: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub checks: Vec<BoundCheck>,
    pub holds: bool,
}

impl DecompositionReport {
    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &str, margin: Option<Rational>, strict: bool) -> BoundCheck {
    let zero = Rational::from_integer(0);
    let holds = margin.is_none_or(|m| if strict { m > zero } else { m >= zero });
    BoundCheck {
        name: name.into(),
        holds,
        margin,
    }
}

fn connectivity_margin(h: &Digraph, set: &[usize], need: Rational) -> Result<Rational> {
    let kappa = strong_connectivity(&h.induced_subdigraph(set)?);
    Ok(int(kappa) - need)
}

/// Report-only checks of the size, connectivity, dichotomy and expansion
/// bounds. Expansion is tested on `samples` random sets `X` with
/// `|X| ≤ (1−β)k/2`.
pub fn verify_decomposition_bounds(
    dec: &ComponentDecomposition,
    h: &Digraph,
    f: &OneFactor,
    samples: usize,
    seed: u64,
) -> Result<DecompositionReport> {
    let k = h.n();
    if f.n() != k {
        return Err(Error::Parameter(format!("factor on {} vertices, H on {k}", f.n())));
    }
    let kr = int(k);
    let (eta, etap, beta) = (dec.eta, dec.eta_prime, dec.beta);
    let two = Rational::from_integer(2);
    let mut checks = Vec::new();

    let cd = |len: usize| two * eta * kr - (int(len) - kr / two).abs();
    checks.push(check("cd-size", Some(cd(dec.c.len()).min(cd(dec.d.len()))), false));
    let small = int(dec.c_small.len().max(dec.d_small.len()));
    checks.push(check("small-sets", Some(Rational::from_integer(8) * eta * kr - small), false));
    checks.push(check("c-prime-connectivity", Some(connectivity_margin(h, &dec.c_prime(), etap * kr)?), false));
    checks.push(check("d-prime-connectivity", Some(connectivity_margin(h, &dec.d_prime(), etap * kr)?), false));
    checks.push(check("l-connectivity", Some(connectivity_margin(h, &dec.l, etap * kr / two)?), false));
    checks.push(check("r-connectivity", Some(connectivity_margin(h, &dec.r, etap * kr / two)?), false));

    let c_mask = mask_of(k, &dec.c);
    let d_mask = mask_of(k, &dec.d);
    let crossing = h.edges().filter(|&(u, v)| c_mask[u] && d_mask[v]).count();
    checks.push(check("no-c-to-d-edges", Some(-int(crossing)), false));

    let mut seen = vec![0usize; k];
    for &v in dec.l.iter().chain(&dec.m_v).chain(&dec.r) {
        seen[v] += 1;
    }
    let bad = seen.iter().filter(|&&c| c != 1).count();
    checks.push(check("l-mv-r-partition", Some(-int(bad)), false));
    checks.push(check(
        "mh-equals-mv",
        Some(-(int(dec.m_h.len()) - int(dec.m_v.len())).abs()),
        false,
    ));

    // |N⁺(V) ∩ L|, |N⁻(V) ∩ R| < 2η′k on M_V^LR, mirrored on M_V^RL
    let l_mask = mask_of(k, &dec.l);
    let r_mask = mask_of(k, &dec.r);
    let cap = two * etap * kr;
    let mut dich: Option<Rational> = None;
    let sides = [(&dec.m_v_lr, &l_mask, &r_mask), (&dec.m_v_rl, &r_mask, &l_mask)];
    for (set, out_side, in_side) in sides {
        for &v in set {
            let worst = count_in(h.out_neighbors(v), out_side).max(count_in(h.in_neighbors(v), in_side));
            let m = cap - int(worst);
            dich = Some(dich.map_or(m, |d| d.min(m)));
        }
    }
    checks.push(check("mv-dichotomy", dich, true));

    let max_x = floor_int(&((Rational::from_integer(1) - beta) * kr / two)).max(0) as usize;
    let mut expand: Option<Rational> = None;
    if max_x >= 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all: Vec<usize> = (0..k).collect();
        for _ in 0..samples {
            let size = rng.gen_range(1..=max_x);
            let x: Vec<usize> = all.choose_multiple(&mut rng, size).copied().collect();
            for dir in [Direction::Out, Direction::In] {
                let nb = h.neighborhood(&x, dir)?.len();
                let m = int(nb) - int(size) - beta * kr / Rational::from_integer(4);
                expand = Some(expand.map_or(m, |e| e.min(m)));
            }
        }
    }
    checks.push(check("expansion", expand, false));

    let holds = checks.iter().all(|c| c.holds);
    Ok(DecompositionReport { checks, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    /// Two complete blobs `D = 0..dn`, `C = dn..k` with every `D → C` edge.
    fn blobs(k: usize, dn: usize) -> Digraph {
        let mut edges = Vec::new();
        for u in 0..k {
            for v in 0..k {
                let same = (u < dn) == (v < dn);
                if u != v && (same || u < dn) {
                    edges.push((u, v));
                }
            }
        }
        Digraph::new(k, edges).unwrap()
    }

    fn rotation(k: usize) -> OneFactor {
        OneFactor::from_successors((0..k).map(|i| (i + 1) % k).collect()).unwrap()
    }

    #[test]
    fn two_blobs_recovered() {
        let h = blobs(20, 10);
        let f = rotation(20);
        let dec = decompose_components(&h, &f, ratio(1, 20), ratio(1, 10), ratio(1, 2)).unwrap();
        assert!(dec.s.is_empty());
        assert_eq!(dec.d, (0..10).collect::<Vec<_>>());
        assert_eq!(dec.c, (10..20).collect::<Vec<_>>());
        assert!(dec.c_small.is_empty() && dec.d_small.is_empty());
        assert_eq!(dec.l, dec.c);
        assert_eq!(dec.r, dec.d);
        assert!(dec.m_v.is_empty());
        assert_eq!(dec.t, (9..19).collect::<Vec<_>>());
        let report = verify_decomposition_bounds(&dec, &h, &f, 200, 1).unwrap();
        assert!(report.holds, "{report:?}");
        assert_eq!(report.check("mv-dichotomy").unwrap().margin, None);
    }

    #[test]
    fn planted_low_indegree_vertex() {
        let base = blobs(20, 10);
        // vertex 19 keeps a single in-neighbour inside C
        let h = Digraph::new(20, base.edges().filter(|&(u, v)| !(v == 19 && u >= 11))).unwrap();
        let dec = decompose_components(&h, &rotation(20), ratio(1, 20), ratio(1, 10), ratio(1, 2)).unwrap();
        assert_eq!(dec.c_small, vec![19]);
    }

    #[test]
    fn shrunken_d_has_negative_margin() {
        let h = blobs(20, 4);
        let f = rotation(20);
        let dec = decompose_components(&h, &f, ratio(1, 20), ratio(1, 10), ratio(1, 2)).unwrap();
        let report = verify_decomposition_bounds(&dec, &h, &f, 50, 1).unwrap();
        let cd = report.check("cd-size").unwrap();
        assert!(!cd.holds);
        assert_eq!(cd.margin, Some(ratio(-4, 1)));
    }

    #[test]
    fn connected_h_is_wrong_pipeline() {
        let h = Digraph::complete(10);
        let err = decompose_components(&h, &rotation(10), ratio(1, 5), ratio(1, 5), ratio(1, 2)).unwrap_err();
        assert!(err.is_wrong_pipeline());
    }
}
