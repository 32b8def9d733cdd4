//! Degree-sequence Hamiltonicity conditions and the two extremal families.
//!
//! Every threshold is compared in exact rational arithmetic. Where a clause
//! consults `d_j` at the non-integral index `n − i − βn`, we use
//! `j = ⌈n − i − βn⌉`. Degree sequences are nondecreasing, so the larger
//! index asks for less; a checker that says "holds" with this rounding is the
//! most permissive reading of the condition. Any statement about `d_j` with
//! `j ∉ [1, n]` counts as true.

mod generators;

use serde::{Deserialize, Serialize};

use crate::digraph::{DegreeSequences, Digraph, Direction};
use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};

pub use generators::{gen_concluding_example, gen_extremal_chvatal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionName {
    GhouilaHouri,
    Posa,
    NashWilliamsChvatal,
    SemiExact,
    PosaMin,
    Kot,
}

impl ConditionName {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "gh" | "ghouila-houri" => ConditionName::GhouilaHouri,
            "posa" => ConditionName::Posa,
            "nwc" | "nash-williams-chvatal" => ConditionName::NashWilliamsChvatal,
            "semi-exact" => ConditionName::SemiExact,
            "posa-min" => ConditionName::PosaMin,
            "kot" => ConditionName::Kot,
            _ => return Err(Error::Parse(format!("unknown condition {s:?}"))),
        })
    }

    pub fn needs_beta(self) -> bool {
        matches!(
            self,
            ConditionName::SemiExact | ConditionName::PosaMin | ConditionName::Kot
        )
    }
}

/// Which part of a condition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    /// `min(δ⁺, δ⁻) ≥ n/2`.
    Semidegree,
    /// Strong connectivity, reported with index 0.
    StrongConnectivity,
    /// Clause (i): outdegree at `i`, alternative on indegree at `j`.
    Out,
    /// Clause (ii): indegree at `i`, alternative on outdegree at `j`.
    In,
    /// The `d_{⌈n/2⌉} ≥ ⌈n/2⌉` clause.
    Middle,
}

/// The numbers behind a violation, all re-derivable from the degree
/// sequences. `degree` is `d_i` in the clause's direction and `threshold`
/// the bound it missed; `alt_*` describe the alternative `d_j ≥ n − i` when
/// the clause has one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub i: usize,
    pub clause: Clause,
    pub degree: usize,
    #[serde(with = "rational::serde_str")]
    pub threshold: Rational,
    pub alt_index: Option<i64>,
    pub alt_degree: Option<usize>,
    pub alt_threshold: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: ConditionName,
    pub holds: bool,
    pub first_violation: Option<usize>,
    pub witness: Option<Witness>,
    pub n: usize,
    #[serde(with = "rational::serde_opt_str")]
    pub beta: Option<Rational>,
}

impl ConditionReport {
    fn new(condition: ConditionName, n: usize, beta: Option<Rational>, witness: Option<Witness>) -> Self {
        ConditionReport {
            condition,
            holds: witness.is_none(),
            first_violation: witness.as_ref().map(|w| w.i),
            witness,
            n,
            beta,
        }
    }
}

/// Dispatches on `name`; `beta` is required by the β-conditions.
pub fn check(g: &Digraph, name: ConditionName, beta: Option<Rational>) -> Result<ConditionReport> {
    let need = || {
        beta.ok_or_else(|| Error::Parameter(format!("condition {name:?} needs a beta value")))
    };
    Ok(match name {
        ConditionName::GhouilaHouri => check_ghouila_houri(g),
        ConditionName::Posa => check_posa_digraph(g),
        ConditionName::NashWilliamsChvatal => check_nash_williams_chvatal(g),
        ConditionName::SemiExact => check_semi_exact(g, need()?)?,
        ConditionName::PosaMin => check_posa_min(g, need()?)?,
        ConditionName::Kot => check_kot(g, need()?)?,
    })
}

pub fn check_ghouila_houri(g: &Digraph) -> ConditionReport {
    let n = g.n();
    let half = Rational::new(n as i64, 2);
    let delta = g.min_semidegree();
    let witness = (int(delta) < half).then_some(Witness {
        i: 1,
        clause: Clause::Semidegree,
        degree: delta,
        threshold: half,
        alt_index: None,
        alt_degree: None,
        alt_threshold: None,
    });
    ConditionReport::new(ConditionName::GhouilaHouri, n, None, witness)
}

fn degree_at(seq: &DegreeSequences, dir: Direction, i: usize) -> usize {
    seq.at_dir(dir, i as i64).expect("index within [1, n]")
}

fn opposite(dir: Direction) -> Direction {
    match dir {
        Direction::Out => Direction::In,
        Direction::In => Direction::Out,
    }
}

fn clause_of(dir: Direction) -> Clause {
    match dir {
        Direction::Out => Clause::Out,
        Direction::In => Clause::In,
    }
}

pub fn check_posa_digraph(g: &Digraph) -> ConditionReport {
    let n = g.n();
    let seq = g.degree_sequences();
    let mut witness = None;
    'scan: for i in (1..).take_while(|&i| 2 * i + 1 < n) {
        for dir in [Direction::Out, Direction::In] {
            let d = degree_at(&seq, dir, i);
            if d < i + 1 {
                witness = Some(Witness {
                    i,
                    clause: clause_of(dir),
                    degree: d,
                    threshold: int(i + 1),
                    alt_index: None,
                    alt_degree: None,
                    alt_threshold: None,
                });
                break 'scan;
            }
        }
    }
    if witness.is_none() && n > 0 {
        let c = n.div_ceil(2);
        for dir in [Direction::Out, Direction::In] {
            let d = degree_at(&seq, dir, c);
            if d < c {
                witness = Some(Witness {
                    i: c,
                    clause: Clause::Middle,
                    degree: d,
                    threshold: int(c),
                    alt_index: None,
                    alt_degree: None,
                    alt_threshold: None,
                });
                break;
            }
        }
    }
    ConditionReport::new(ConditionName::Posa, n, None, witness)
}

/// Scans clauses (i) and (ii) of the Chvátal-type conditions for every
/// `1 ≤ i` with `i < limit`. `required(i)` is the bound on `d_i`; `shift` is
/// subtracted from `n − i` to get the alternative index (`βn`, or 0).
fn scan_chvatal(
    seq: &DegreeSequences,
    limit: &Rational,
    required: impl Fn(usize) -> Rational,
    shift: &Rational,
) -> Option<Witness> {
    let n = seq.n();
    for i in (1..).take_while(|&i| int(i) < *limit) {
        let t = required(i);
        for dir in [Direction::Out, Direction::In] {
            let d = degree_at(seq, dir, i);
            if int(d) >= t {
                continue;
            }
            let j = rational::ceil_int(&(int(n) - int(i) - shift));
            let alt = seq.at_dir(opposite(dir), j);
            // out-of-range j makes the alternative vacuous
            if alt.is_none_or(|a| a >= n - i) {
                continue;
            }
            return Some(Witness {
                i,
                clause: clause_of(dir),
                degree: d,
                threshold: t,
                alt_index: Some(j),
                alt_degree: alt,
                alt_threshold: Some(n - i),
            });
        }
    }
    None
}

pub fn check_nash_williams_chvatal(g: &Digraph) -> ConditionReport {
    let n = g.n();
    if !g.is_strongly_connected() {
        let witness = Witness {
            i: 0,
            clause: Clause::StrongConnectivity,
            degree: 0,
            threshold: Rational::from_integer(0),
            alt_index: None,
            alt_degree: None,
            alt_threshold: None,
        };
        return ConditionReport::new(ConditionName::NashWilliamsChvatal, n, None, Some(witness));
    }
    let seq = g.degree_sequences();
    let witness = scan_chvatal(
        &seq,
        &Rational::new(n as i64, 2),
        |i| int(i + 1),
        &Rational::from_integer(0),
    );
    ConditionReport::new(ConditionName::NashWilliamsChvatal, n, None, witness)
}

fn check_beta(beta: &Rational) -> Result<()> {
    if *beta <= Rational::from_integer(0) || *beta > Rational::from_integer(1) {
        return Err(Error::Parameter(format!(
            "beta must lie in (0, 1], got {}",
            rational::format_rational(beta)
        )));
    }
    Ok(())
}

fn semi_exact_witness(seq: &DegreeSequences, beta: &Rational, limit: &Rational) -> Option<Witness> {
    let n = seq.n();
    let bn = beta * int(n);
    let half = Rational::new(n as i64, 2);
    scan_chvatal(seq, limit, |i| (int(i) + bn).min(half), &bn)
}

pub fn check_semi_exact(g: &Digraph, beta: Rational) -> Result<ConditionReport> {
    check_beta(&beta)?;
    let n = g.n();
    let witness = semi_exact_witness(&g.degree_sequences(), &beta, &Rational::new(n as i64, 2));
    Ok(ConditionReport::new(ConditionName::SemiExact, n, Some(beta), witness))
}

pub fn check_kot(g: &Digraph, beta: Rational) -> Result<ConditionReport> {
    check_beta(&beta)?;
    let n = g.n();
    let bn = beta * int(n);
    let witness = scan_chvatal(
        &g.degree_sequences(),
        &Rational::new(n as i64, 2),
        |i| int(i) + bn,
        &bn,
    );
    Ok(ConditionReport::new(ConditionName::Kot, n, Some(beta), witness))
}

pub fn check_posa_min(g: &Digraph, beta: Rational) -> Result<ConditionReport> {
    check_beta(&beta)?;
    let n = g.n();
    let seq = g.degree_sequences();
    let bn = beta * int(n);
    let half = Rational::new(n as i64, 2);
    let mut witness = None;
    'scan: for i in (1..).take_while(|&i| int(i) < half) {
        let t = (int(i) + bn).min(half);
        for dir in [Direction::Out, Direction::In] {
            let d = degree_at(&seq, dir, i);
            if int(d) < t {
                witness = Some(Witness {
                    i,
                    clause: clause_of(dir),
                    degree: d,
                    threshold: t,
                    alt_index: None,
                    alt_degree: None,
                    alt_threshold: None,
                });
                break 'scan;
            }
        }
    }
    Ok(ConditionReport::new(ConditionName::PosaMin, n, Some(beta), witness))
}

/// Outcome of checking `δ⁺, δ⁻ ≥ βn` on an instance of the semi-exact
/// condition. `witness` is a vertex of too small semidegree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemidegreeCheck {
    pub holds: bool,
    pub min_out: usize,
    pub min_in: usize,
    pub witness: Option<usize>,
}

/// Asserts the minimum-semidegree consequence of the semi-exact condition.
pub fn derive_min_semidegree(g: &Digraph, beta: Rational) -> Result<SemidegreeCheck> {
    let report = check_semi_exact(g, beta)?;
    if !report.holds {
        return Err(Error::Precondition {
            message: format!(
                "semi-exact condition fails at i = {}",
                report.first_violation.unwrap_or(0)
            ),
            witness: report.first_violation.map(|i| vec![i]),
        });
    }
    let bn = beta * int(g.n());
    let witness = (0..g.n()).find(|&v| {
        int(g.out_degree(v)) < bn || int(g.in_degree(v)) < bn
    });
    Ok(SemidegreeCheck {
        holds: witness.is_none(),
        min_out: g.min_out_degree(),
        min_in: g.min_in_degree(),
        witness,
    })
}

/// Whether the semi-exact clauses over `i < n/2` agree with the same clauses
/// over `i < n − βn`.
pub fn full_range_equivalence(g: &Digraph, beta: Rational) -> Result<bool> {
    check_beta(&beta)?;
    let seq = g.degree_sequences();
    let n = int(g.n());
    let half = semi_exact_witness(&seq, &beta, &(n / 2)).is_none();
    let full = semi_exact_witness(&seq, &beta, &(n - beta * n)).is_none();
    Ok(half == full)
}

/// Re-evaluates a witness against fresh degree sequences.
pub fn witness_reproduces(seq: &DegreeSequences, w: &Witness) -> bool {
    let n = seq.n();
    match w.clause {
        Clause::StrongConnectivity => w.i == 0,
        Clause::Semidegree => {
            let d = seq.out_sorted.first().copied().unwrap_or(0).min(seq.in_sorted.first().copied().unwrap_or(0));
            d == w.degree && int(d) < w.threshold
        }
        Clause::Middle => {
            let ok_out = seq.out_at(w.i as i64).is_some_and(|d| d == w.degree);
            let ok_in = seq.in_at(w.i as i64).is_some_and(|d| d == w.degree);
            (ok_out || ok_in) && int(w.degree) < w.threshold
        }
        Clause::Out | Clause::In => {
            let dir = if w.clause == Clause::Out { Direction::Out } else { Direction::In };
            let primary = seq.at_dir(dir, w.i as i64) == Some(w.degree) && int(w.degree) < w.threshold;
            let alt = match (w.alt_index, w.alt_threshold) {
                (Some(j), Some(t)) => {
                    let d = seq.at_dir(opposite(dir), j);
                    d == w.alt_degree && d.is_some_and(|d| d < t) && t == n - w.i
                }
                (None, None) => true,
                _ => false,
            };
            primary && alt
        }
    }
}
