use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{at_least, check_eps, density, Pair};
use crate::error::{Error, Result};
use crate::rational::{self, ceil_int, int, Rational};

/// Largest side handled by exhaustive certification.
pub const EXHAUSTIVE_LIMIT: usize = 12;

/// Default number of sampled sub-pairs.
pub const DEFAULT_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum CertifyMode {
    /// Every qualifying `X ⊆ A`; exact.
    Exhaustive,
    /// Random qualifying `X`, each paired with its worst `Y`; can only refute.
    Sampled { samples: usize, seed: u64 },
}

impl CertifyMode {
    /// Exhaustive when both sides fit, sampled otherwise.
    pub fn auto(a_len: usize, b_len: usize, seed: u64) -> Self {
        if a_len <= EXHAUSTIVE_LIMIT && b_len <= EXHAUSTIVE_LIMIT {
            CertifyMode::Exhaustive
        } else {
            CertifyMode::Sampled {
                samples: DEFAULT_SAMPLES,
                seed,
            }
        }
    }

    pub fn is_exhaustive(&self) -> bool {
        matches!(self, CertifyMode::Exhaustive)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityVerdict {
    pub mode: CertifyMode,
    pub regular: bool,
    #[serde(with = "rational::serde_str")]
    pub density: Rational,
    #[serde(with = "rational::serde_str")]
    pub worst_deviation: Rational,
    /// `(X, Y)` in host vertex ids attaining `worst_deviation`.
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperRegularVerdict {
    pub regularity: RegularityVerdict,
    pub degrees_ok: bool,
    /// A vertex below the degree floor.
    pub low_degree: Option<(Side, usize)>,
    pub super_regular: bool,
}

/// Column bitsets: `cols[j]` holds the positions in `A` of in-neighbours of
/// `b_j`.
struct Columns {
    words: usize,
    cols: Vec<Vec<u64>>,
}

impl Columns {
    fn new(p: &Pair<'_>) -> Self {
        let bip = p.bipartite();
        let words = p.a.len().div_ceil(64).max(1);
        let mut cols = vec![vec![0u64; words]; p.b.len()];
        for (i, j) in bip.edges() {
            cols[j][i / 64] |= 1 << (i % 64);
        }
        Columns { words, cols }
    }

    fn counts(&self, x: &[u64]) -> Vec<usize> {
        self.cols
            .iter()
            .map(|c| c.iter().zip(x).map(|(a, b)| (a & b).count_ones() as usize).sum())
            .collect()
    }

    fn mask(&self, positions: &[usize]) -> Vec<u64> {
        let mut m = vec![0u64; self.words];
        for &i in positions {
            m[i / 64] |= 1 << (i % 64);
        }
        m
    }
}

/// Worst `|d(X, Y) − d|` over all `Y` with `|Y| ≥ min_y`, given the column
/// counts of `X`: for a fixed size, the extremes are the `s` largest and the
/// `s` smallest counts.
fn worst_for_x(counts: &[usize], x_len: usize, min_y: usize, d: &Rational) -> Option<(Rational, Vec<usize>)> {
    let nb = counts.len();
    let mut order: Vec<usize> = (0..nb).collect();
    order.sort_by(|&i, &j| counts[j].cmp(&counts[i]).then(i.cmp(&j)));
    let mut prefix = vec![0i128; nb + 1];
    for s in 0..nb {
        prefix[s + 1] = prefix[s] + counts[order[s]] as i128;
    }
    let (dn, dd) = (*d.numer() as i128, *d.denom() as i128);
    // deviation = num / (x·s·dd), compared by cross-multiplication
    let mut best: Option<(i128, i128, usize, bool)> = None;
    for s in min_y.max(1)..=nb {
        let den = x_len as i128 * s as i128 * dd;
        let target = dn * x_len as i128 * s as i128;
        let top = prefix[s];
        let bottom = prefix[nb] - prefix[nb - s];
        for (sum, high) in [(top, true), (bottom, false)] {
            let num = (sum * dd - target).abs();
            if best.is_none_or(|(bn, bd, _, _)| num * bd > bn * den) {
                best = Some((num, den, s, high));
            }
        }
    }
    best.map(|(num, den, s, high)| {
        let y = if high {
            order[..s].to_vec()
        } else {
            order[nb - s..].to_vec()
        };
        (Rational::new(num as i64, den as i64), y)
    })
}

fn min_size(eps: &Rational, len: usize) -> usize {
    ceil_int(&(eps * int(len))).max(1) as usize
}

pub fn certify_regular(p: &Pair<'_>, eps: Rational, mode: CertifyMode) -> Result<RegularityVerdict> {
    check_eps(&eps)?;
    let d = density(p)?;
    let (na, nb) = (p.a.len(), p.b.len());
    let min_x = min_size(&eps, na);
    let min_y = min_size(&eps, nb);
    let cols = Columns::new(p);
    let evaluate = |xs: &[usize]| -> Option<(Rational, Vec<usize>, Vec<usize>)> {
        let counts = cols.counts(&cols.mask(xs));
        worst_for_x(&counts, xs.len(), min_y, &d).map(|(dev, ys)| (dev, xs.to_vec(), ys))
    };
    let best = match mode {
        CertifyMode::Exhaustive => {
            if na > EXHAUSTIVE_LIMIT || nb > EXHAUSTIVE_LIMIT {
                return Err(Error::Scale(format!(
                    "exhaustive certification needs sides <= {EXHAUSTIVE_LIMIT}, got {na}x{nb}"
                )));
            }
            (1u32..(1 << na))
                .into_par_iter()
                .filter(|m| m.count_ones() as usize >= min_x)
                .filter_map(|m| {
                    let xs: Vec<usize> = (0..na).filter(|i| m >> i & 1 == 1).collect();
                    evaluate(&xs)
                })
                .reduce_with(pick_worse)
        }
        CertifyMode::Sampled { samples, seed } => {
            if min_x > na || min_y > nb {
                None
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let all: Vec<usize> = (0..na).collect();
                let draws: Vec<Vec<usize>> = (0..samples)
                    .map(|_| {
                        let size = rng.gen_range(min_x..=na);
                        let mut xs: Vec<usize> = all.choose_multiple(&mut rng, size).copied().collect();
                        xs.sort_unstable();
                        xs
                    })
                    .collect();
                draws
                    .par_iter()
                    .filter_map(|xs| evaluate(xs))
                    .reduce_with(pick_worse)
            }
        }
    };
    let (worst, witness) = match best {
        Some((dev, xs, ys)) => {
            let x_host = xs.iter().map(|&i| p.a[i]).collect();
            let mut y_host: Vec<usize> = ys.iter().map(|&j| p.b[j]).collect();
            y_host.sort_unstable();
            (dev, Some((x_host, y_host)))
        }
        None => (Rational::from_integer(0), None),
    };
    Ok(RegularityVerdict {
        mode,
        regular: worst < eps,
        density: d,
        worst_deviation: worst,
        witness,
    })
}

type Candidate = (Rational, Vec<usize>, Vec<usize>);

/// Larger deviation wins; ties go to the lexicographically smaller `X`, so
/// the parallel reduction is deterministic.
fn pick_worse(a: Candidate, b: Candidate) -> Candidate {
    match a.0.cmp(&b.0) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if (&a.1, &a.2) <= (&b.1, &b.2) {
                a
            } else {
                b
            }
        }
    }
}

/// ε-regularity plus `d_G(a) ≥ d|B|` on `A` and `d_G(b) ≥ d|A|` on `B`.
pub fn certify_super_regular(
    p: &Pair<'_>,
    eps: Rational,
    d: Rational,
    mode: CertifyMode,
) -> Result<SuperRegularVerdict> {
    let regularity = certify_regular(p, eps, mode)?;
    let bip = p.bipartite();
    let b_deg = bip.b_degrees();
    let low_a = (0..p.a.len())
        .find(|&i| !at_least(bip.neighbors(i).len(), &d, p.b.len()))
        .map(|i| (Side::A, p.a[i]));
    let low_b = (0..p.b.len())
        .find(|&j| !at_least(b_deg[j], &d, p.a.len()))
        .map(|j| (Side::B, p.b[j]));
    let low_degree = low_a.or(low_b);
    Ok(SuperRegularVerdict {
        super_regular: regularity.regular && low_degree.is_none(),
        degrees_ok: low_degree.is_none(),
        low_degree,
        regularity,
    })
}
