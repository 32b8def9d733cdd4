use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{certify_super_regular, CertifyMode, Pair, DEFAULT_SAMPLES, MAX_REDRAWS};
use crate::digraph::BipartiteGraph;
use crate::error::{Error, Result};
use crate::rational::{self, ceil_int, int, Rational};

/// `(A*, B*)`, in host vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ideal {
    pub a_star: Vec<usize>,
    pub b_star: Vec<usize>,
    /// The degree floor `θdn/4` that was enforced.
    #[serde(with = "rational::serde_str")]
    pub floor: Rational,
}

fn draw_side<R: Rng>(
    len: usize,
    size: usize,
    rng: &mut R,
    ok: impl Fn(&[bool]) -> bool,
) -> Option<Vec<usize>> {
    let all: Vec<usize> = (0..len).collect();
    for _ in 0..MAX_REDRAWS {
        let mut chosen = vec![false; len];
        for &i in all.choose_multiple(rng, size) {
            chosen[i] = true;
        }
        if ok(&chosen) {
            return Some((0..len).filter(|&i| chosen[i]).collect());
        }
    }
    None
}

/// Random `A*`, `B*` of size `⌈θn⌉` (`n` the larger side), each side redrawn
/// until every vertex of the other side has at least `θdn/4` neighbours in it.
pub fn select_ideal(p: &Pair<'_>, theta: Rational, d: Rational, seed: u64) -> Result<Ideal> {
    if theta <= Rational::from_integer(0) || theta > Rational::from_integer(1) {
        return Err(Error::Parameter(format!("theta must lie in (0, 1], got {theta}")));
    }
    let n = p.a.len().max(p.b.len());
    let size = ceil_int(&(theta * int(n))) as usize;
    if size > p.a.len().min(p.b.len()) {
        return Err(Error::Parameter(format!(
            "ideal size {size} exceeds a side of the pair"
        )));
    }
    let floor = theta * d * int(n) / Rational::from_integer(4);
    let bip = p.bipartite();
    let rev = reverse(&bip);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let enough = |g: &BipartiteGraph, chosen: &[bool]| {
        (0..g.a_size()).all(|i| int(g.neighbors(i).iter().filter(|&&j| chosen[j]).count()) >= floor)
    };
    let b_star = draw_side(p.b.len(), size, &mut rng, |c| enough(&bip, c)).ok_or_else(|| {
        Error::RandomizedConstruction {
            attempts: MAX_REDRAWS,
            message: "no B* meets the degree floor".into(),
        }
    })?;
    let a_star = draw_side(p.a.len(), size, &mut rng, |c| enough(&rev, c)).ok_or_else(|| {
        Error::RandomizedConstruction {
            attempts: MAX_REDRAWS,
            message: "no A* meets the degree floor".into(),
        }
    })?;
    Ok(Ideal {
        a_star: a_star.into_iter().map(|i| p.a[i]).collect(),
        b_star: b_star.into_iter().map(|j| p.b[j]).collect(),
        floor,
    })
}

fn reverse(g: &BipartiteGraph) -> BipartiteGraph {
    let mut adj = vec![Vec::new(); g.b_size()];
    for (a, b) in g.edges() {
        adj[b].push(a);
    }
    BipartiteGraph::from_sorted(g.b_size(), g.a_size(), adj)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealAudit {
    pub supersets: usize,
    /// Supersets `(A′, B′)` that failed, in host ids.
    pub failures: Vec<(Vec<usize>, Vec<usize>)>,
}

impl IdealAudit {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Samples `supersets` random `(A′, B′) ⊇ (A*, B*)` and certifies each
/// `(ε/θ, θd/4)`-super-regular in sampled mode.
pub fn audit_ideal(
    p: &Pair<'_>,
    ideal: &Ideal,
    eps: Rational,
    theta: Rational,
    d: Rational,
    supersets: usize,
    seed: u64,
) -> Result<IdealAudit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps_star = eps / theta;
    let d_star = theta * d / Rational::from_integer(4);
    let grow = |star: &[usize], side: &[usize], rng: &mut ChaCha8Rng| {
        let mut rest: Vec<usize> = side.iter().copied().filter(|v| !star.contains(v)).collect();
        rest.shuffle(rng);
        let extra = rng.gen_range(0..=rest.len());
        let mut out: Vec<usize> = star.iter().copied().chain(rest.into_iter().take(extra)).collect();
        out.sort_unstable();
        out
    };
    let mut failures = Vec::new();
    for _ in 0..supersets {
        let a = grow(&ideal.a_star, &p.a, &mut rng);
        let b = grow(&ideal.b_star, &p.b, &mut rng);
        let sub = p.sub(a, b);
        let mode = CertifyMode::Sampled {
            samples: DEFAULT_SAMPLES / 10,
            seed: rng.gen(),
        };
        if !certify_super_regular(&sub, eps_star, d_star, mode)?.super_regular {
            failures.push((sub.a, sub.b));
        }
    }
    Ok(IdealAudit { supersets, failures })
}
