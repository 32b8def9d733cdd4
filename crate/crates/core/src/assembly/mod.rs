//! Hamilton cycle assembly for clustered digraphs whose shifted digraph `H`
//! is highly connected: reserve ideals, route the exceptional vertices,
//! build a balanced closed walk of clusters, fix its edges, complete a
//! 1-factor and merge its cycles cluster by cluster.

mod factor;
mod prep;
mod walk;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::digraph::{verify_hamilton_cycle, Digraph, HamiltonCertificate, OneFactor};
use crate::error::{Error, Result, Stage};
use crate::rational::{self, Rational};
use crate::regular::{pair_densities, ClusterPartition};

pub use factor::{
    coarsens, complete_factor, fix_edges, merge_at_cluster, merge_matching, EntryExitLedger,
    FactorAssembly, MergeReport,
};
pub use prep::{
    assign_exceptional, reserve_ideals, ExceptionalAssignment, ExceptionalEntry, ReservedIdeals,
};
pub use walk::{build_walk, ClusterWalk, Step};

/// Bound on how often the walk may use a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UseCap {
    /// Entries plus exits at most `m/10`.
    Strict,
    /// Entries and exits each at most `m/4`, which is what the merging step
    /// needs.
    Quarter,
}

impl UseCap {
    pub fn allows(&self, m: usize, entered: usize, exited: usize) -> bool {
        match self {
            UseCap::Strict => 10 * (entered + exited) <= m,
            UseCap::Quarter => 4 * entered <= m && 4 * exited <= m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssemblyParams {
    /// `H` must be strongly `⌈ηk⌉`-connected.
    #[serde(with = "rational::serde_str")]
    pub eta: Rational,
    /// `F`-pairs must be `(ε, d)`-super-regular.
    #[serde(with = "rational::serde_str")]
    pub eps: Rational,
    #[serde(with = "rational::serde_str")]
    pub d: Rational,
    /// Cluster pairs of density above `d′` are edges of `R″`.
    #[serde(with = "rational::serde_str")]
    pub dprime: Rational,
    /// Ideal sides have `⌈θm⌉` vertices.
    #[serde(with = "rational::serde_str")]
    pub theta: Rational,
    /// Supersets sampled per ideal audit; 0 skips the audit.
    pub ideal_supersets: usize,
    pub cap: UseCap,
    /// Time allowed for each Hamilton search in `J` above the exact limit.
    pub merge_deadline_ms: u64,
}

impl Default for AssemblyParams {
    fn default() -> Self {
        AssemblyParams {
            eta: Rational::new(1, 4),
            eps: Rational::new(1, 2),
            d: Rational::new(2, 5),
            dprime: Rational::new(1, 10),
            theta: Rational::new(1, 5),
            ideal_supersets: 0,
            cap: UseCap::Quarter,
            merge_deadline_ms: 2000,
        }
    }
}

/// Derived seed for stage `tag`, item `index` (splitmix64 finalizer).
pub(crate) fn sub_seed(seed: u64, tag: u64, index: usize) -> u64 {
    let mut z = seed
        .wrapping_add(tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((index as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `R″`: clusters, with `i → j` when the pair `(V_i, V_j)` has density above `d′`.
pub fn reduced_above(g: &Digraph, part: &ClusterPartition, dprime: Rational) -> Digraph {
    let dens = pair_densities(g, part);
    let k = part.k();
    let out = (0..k)
        .map(|i| (0..k).filter(|&j| j != i && dens[i][j] > dprime).collect())
        .collect();
    Digraph::from_sorted_out(k, out)
}

/// Every intermediate object of a successful run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssemblyTrace {
    pub ideals: ReservedIdeals,
    pub assignment: ExceptionalAssignment,
    pub walk: ClusterWalk,
    pub factor: FactorAssembly,
    pub merges: Vec<MergeReport>,
    pub certificate: HamiltonCertificate,
}

pub fn assemble_hamilton(
    g: &Digraph,
    part: &ClusterPartition,
    f: &OneFactor,
    params: &AssemblyParams,
    seed: u64,
) -> Result<HamiltonCertificate> {
    Ok(assemble_with_trace(g, part, f, params, seed)?.certificate)
}

pub fn assemble_with_trace(
    g: &Digraph,
    part: &ClusterPartition,
    f: &OneFactor,
    params: &AssemblyParams,
    seed: u64,
) -> Result<AssemblyTrace> {
    prep::check_shapes(part, f)?;
    if part.n() != g.n() {
        return Err(Error::Parameter(format!(
            "partition of {} vertices, digraph on {}",
            part.n(),
            g.n()
        )));
    }
    if let Some(c) = f.cycles().iter().find(|c| c.len() < 4) {
        return Err(Error::Precondition {
            message: "every F-cycle needs length at least 4".into(),
            witness: Some(c.clone()),
        });
    }
    let r2 = reduced_above(g, part, params.dprime);
    if let Some(x) = (0..f.n()).find(|&x| !r2.has_edge(x, f.successor(x))) {
        return Err(Error::Precondition {
            message: format!("F-edge ({x}, {}) is not an edge of R''", f.successor(x)),
            witness: Some(vec![x, f.successor(x)]),
        });
    }
    let m = part.m();
    let ideals = reserve_ideals(g, part, f, params, sub_seed(seed, 10, 0)).map_err(|e| e.at(Stage::Ideals))?;
    let assignment =
        assign_exceptional(g, part, &ideals, sub_seed(seed, 11, 0)).map_err(|e| e.at(Stage::Exceptional))?;
    let walk = build_walk(&r2, f, &assignment, params, m, sub_seed(seed, 12, 0)).map_err(|e| e.at(Stage::Walk))?;
    let fixed = fix_edges(g, part, f, &walk, &ideals, &assignment).map_err(|e| e.at(Stage::FixEdges))?;
    let mut factor = complete_factor(g, part, f, fixed).map_err(|e| e.at(Stage::CompleteFactor))?;
    let deadline = Duration::from_millis(params.merge_deadline_ms);
    let mut merges = Vec::with_capacity(f.n());
    for cyc in f.cycles() {
        for &u in cyc {
            let report = merge_at_cluster(&mut factor, u, g, f, deadline, sub_seed(seed, 13, u))
                .map_err(|e| e.at(Stage::Merge))?;
            merges.push(report);
        }
    }
    let certificate = single_cycle(&factor.succ).ok_or_else(|| {
        Error::AssemblyBug(format!("final 1-factor has {} cycles", factor.cycle_count())).at(Stage::Final)
    })?;
    if !verify_hamilton_cycle(g, &certificate)? {
        return Err(Error::AssemblyBug("certificate failed verification".into()).at(Stage::Final));
    }
    Ok(AssemblyTrace {
        ideals,
        assignment,
        walk,
        factor,
        merges,
        certificate,
    })
}

fn single_cycle(succ: &[usize]) -> Option<HamiltonCertificate> {
    let n = succ.len();
    let mut order = Vec::with_capacity(n);
    let mut v = 0;
    for _ in 0..n {
        order.push(v);
        v = succ[v];
    }
    (n > 0 && v == 0 && order.iter().all(|&x| succ[x] != usize::MAX) && {
        let mut seen = vec![false; n];
        order.iter().all(|&x| !std::mem::replace(&mut seen[x], true))
    })
    .then(|| HamiltonCertificate::new(order))
}
