use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{ClusterWalk, ExceptionalAssignment, ReservedIdeals};
use crate::digraph::{Digraph, OneFactor};
use crate::error::{Error, Result};
use crate::hamilton::find_hamilton_cycle;
use crate::matching::{hall_violator, max_matching};
use crate::regular::{ClusterPartition, Pair};

/// `U_Entry` and `U_Exit` for every cluster `U`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryExitLedger {
    pub entry: Vec<Vec<usize>>,
    pub exit: Vec<Vec<usize>>,
}

impl EntryExitLedger {
    /// `|U_Exit| = |U⁺_Entry|`, `Entry ∩ Exit = ∅`, and both avoid `U*`.
    pub fn validate(&self, f: &OneFactor, ideals: Option<&ReservedIdeals>) -> Result<()> {
        for u in 0..f.n() {
            let up = f.successor(u);
            if self.exit[u].len() != self.entry[up].len() {
                return Err(Error::contract(
                    format!(
                        "|U_Exit| = {} but |U+_Entry| = {} for U = {u}",
                        self.exit[u].len(),
                        self.entry[up].len()
                    ),
                    Some(vec![u, up]),
                ));
            }
            if let Some(&v) = self.entry[u].iter().find(|v| self.exit[u].contains(v)) {
                return Err(Error::contract(format!("{v} is both entry and exit"), Some(vec![v])));
            }
            if let Some(ideals) = ideals {
                let star = &ideals.star[u];
                if let Some(&v) = self.entry[u].iter().chain(&self.exit[u]).find(|v| star.contains(v)) {
                    return Err(Error::contract(format!("{v} lies in a reserved ideal"), Some(vec![v])));
                }
            }
        }
        Ok(())
    }
}

/// Fixed edges, the `F`-pair matchings and the current 1-factor of `G`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorAssembly {
    pub fixed_edges: Vec<(usize, usize)>,
    pub ledger: EntryExitLedger,
    /// `matchings[U]` pairs `U ∖ U_Exit` with `U⁺ ∖ U⁺_Entry`.
    pub matchings: Vec<Vec<(usize, usize)>>,
    /// Successor of every vertex; empty until the factor is completed.
    pub succ: Vec<usize>,
}

impl FactorAssembly {
    /// Cycle index of every vertex of the current 1-factor.
    pub fn cycle_labels(&self) -> Vec<usize> {
        cycle_labels(&self.succ)
    }

    pub fn cycle_count(&self) -> usize {
        self.cycle_labels().iter().max().map_or(0, |&c| c + 1)
    }
}

pub(crate) fn cycle_labels(succ: &[usize]) -> Vec<usize> {
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

/// Whether the partition `after` is coarser than (or equal to) `before`.
pub fn coarsens(before: &[usize], after: &[usize]) -> bool {
    let mut image: BTreeMap<usize, usize> = BTreeMap::new();
    before
        .iter()
        .zip(after)
        .all(|(&b, &a)| *image.entry(b).or_insert(a) == a)
}

/// Realizes every non-`F` step of the walk by a distinct edge of `G`: the
/// exceptional edges first, then, for each ordered cluster pair `(A, B)`, a
/// matching of the required size between the still-free vertices outside
/// `A*` and `B*`.
pub fn fix_edges(
    g: &Digraph,
    part: &ClusterPartition,
    f: &OneFactor,
    walk: &ClusterWalk,
    ideals: &ReservedIdeals,
    assign: &ExceptionalAssignment,
) -> Result<FactorAssembly> {
    let k = part.k();
    let n = g.n();
    let star = ideals.star_mask(n);
    let mut used = vec![false; n];
    let mut entry = vec![Vec::new(); k];
    let mut exit = vec![Vec::new(); k];
    let mut fixed = Vec::new();
    for &x in &part.v0 {
        used[x] = true;
    }
    for e in &assign.entries {
        used[e.x_minus] = true;
        used[e.x_plus] = true;
        exit[e.x_cluster].push(e.x_minus);
        entry[e.y_cluster].push(e.x_plus);
        fixed.push((e.x_minus, e.x));
        fixed.push((e.x, e.x_plus));
    }
    let mut demand: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for step in walk.cross_steps(f) {
        *demand.entry(step).or_default() += 1;
    }
    for (&(a, b), &w) in &demand {
        let free = |c: usize| -> Vec<usize> {
            part.clusters[c].iter().copied().filter(|&v| !used[v] && !star[v]).collect()
        };
        let p = Pair::new(g, free(a), free(b))?;
        let mut pairs = max_matching(&p.bipartite()).pairs;
        if pairs.len() < w {
            return Err(Error::contract(
                format!("pair ({a}, {b}) needs {w} edges, largest matching has {}", pairs.len()),
                Some(vec![a, b]),
            ));
        }
        pairs.sort_unstable();
        for &(i, j) in &pairs[..w] {
            let (u, v) = (p.a[i], p.b[j]);
            used[u] = true;
            used[v] = true;
            exit[a].push(u);
            entry[b].push(v);
            fixed.push((u, v));
        }
    }
    for list in entry.iter_mut().chain(exit.iter_mut()) {
        list.sort_unstable();
    }
    let ledger = EntryExitLedger { entry, exit };
    ledger.validate(f, Some(ideals))?;
    Ok(FactorAssembly {
        fixed_edges: fixed,
        ledger,
        matchings: vec![Vec::new(); k],
        succ: Vec::new(),
    })
}

/// Adds a perfect matching of `(U ∖ U_Exit, U⁺ ∖ U⁺_Entry)` for every `U`;
/// together with the fixed edges this is a 1-factor of `G`.
pub fn complete_factor(
    g: &Digraph,
    part: &ClusterPartition,
    f: &OneFactor,
    mut asm: FactorAssembly,
) -> Result<FactorAssembly> {
    asm.ledger.validate(f, None)?;
    let n = g.n();
    let mut succ = vec![usize::MAX; n];
    for &(u, v) in &asm.fixed_edges {
        if succ[u] != usize::MAX {
            return Err(Error::contract(format!("{u} has two fixed out-edges"), Some(vec![u])));
        }
        succ[u] = v;
    }
    for u in 0..part.k() {
        let up = f.successor(u);
        let tails: Vec<usize> = part.clusters[u]
            .iter()
            .copied()
            .filter(|v| !asm.ledger.exit[u].contains(v))
            .collect();
        let heads: Vec<usize> = part.clusters[up]
            .iter()
            .copied()
            .filter(|v| !asm.ledger.entry[up].contains(v))
            .collect();
        let p = Pair::new(g, tails, heads)?;
        let bip = p.bipartite();
        let mm = max_matching(&bip);
        if mm.len() < p.a.len() {
            let witness = hall_violator(&bip).into_iter().map(|i| p.a[i]).collect();
            return Err(Error::contract(
                format!("no perfect matching from cluster {u} to {up}"),
                Some(witness),
            ));
        }
        let mut pairs: Vec<(usize, usize)> = mm.pairs.iter().map(|&(i, j)| (p.a[i], p.b[j])).collect();
        pairs.sort_unstable();
        for &(a, b) in &pairs {
            succ[a] = b;
        }
        asm.matchings[u] = pairs;
    }
    let factor = OneFactor::from_successors(succ.clone())
        .map_err(|e| Error::contract(format!("fixed edges and matchings are not a 1-factor: {e}"), None))?;
    factor.validate_in(g)?;
    asm.succ = succ;
    Ok(asm)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeReport {
    pub cycles_before: usize,
    pub cycles_after: usize,
    /// Hamilton cycle of `J`, as vertices of `G` in `upper`.
    pub j_cycle: Vec<usize>,
}

/// Replaces the matching `lower → upper` inside the 1-factor `succ` by one
/// that puts all of `lower ∪ upper` on a common cycle: `J` lives on `upper`,
/// with `u → v` whenever `G` has `f(u) → v`, `f(u)` being the first vertex of
/// `lower` met when following `succ` from `u`. Loops of `J` are dropped.
pub fn merge_matching(
    g: &Digraph,
    succ: &mut [usize],
    lower: &[usize],
    upper: &[usize],
    deadline: Duration,
    seed: u64,
) -> Result<MergeReport> {
    let n = succ.len();
    if lower.len() != upper.len() || lower.is_empty() {
        return Err(Error::precondition("merge needs equal non-empty sides"));
    }
    let mut in_lower = vec![false; n];
    let mut in_upper = vec![false; n];
    for &v in lower {
        in_lower[v] = true;
    }
    for &v in upper {
        in_upper[v] = true;
    }
    if lower.iter().any(|&v| !in_upper[succ[v]]) || upper.iter().any(|&v| in_lower[v]) {
        return Err(Error::precondition("succ does not match lower onto upper"));
    }
    let before = cycle_labels(succ);
    let first_return: Vec<usize> = upper
        .iter()
        .map(|&u| {
            let mut v = u;
            while !in_lower[v] {
                v = succ[v];
            }
            v
        })
        .collect();
    let j = Digraph::new(
        upper.len(),
        (0..upper.len()).flat_map(|i| {
            let fu = first_return[i];
            (0..upper.len()).filter(move |&t| t != i && g.has_edge(fu, upper[t])).map(move |t| (i, t))
        }),
    )?;
    let order: Vec<usize> = if upper.len() == 1 {
        if !g.has_edge(first_return[0], upper[0]) {
            return Err(Error::NotHamiltonian);
        }
        vec![0]
    } else {
        find_hamilton_cycle(&j, deadline, seed)?.order
    };
    for (idx, &i) in order.iter().enumerate() {
        let t = order[(idx + 1) % order.len()];
        succ[first_return[i]] = upper[t];
    }
    let after = cycle_labels(succ);
    if !coarsens(&before, &after) {
        return Err(Error::AssemblyBug("merge split a cycle".into()));
    }
    let target = after[upper[0]];
    if lower.iter().chain(upper).any(|&v| after[v] != target) {
        return Err(Error::AssemblyBug("merge left G_U on several cycles".into()));
    }
    let count = |l: &[usize]| l.iter().max().map_or(0, |&c| c + 1);
    Ok(MergeReport {
        cycles_before: count(&before),
        cycles_after: count(&after),
        j_cycle: order.iter().map(|&i| upper[i]).collect(),
    })
}

/// Applies the merge to `G_U = (U⁻ ∖ U⁻_Exit, U ∖ U_Entry)`.
pub fn merge_at_cluster(
    asm: &mut FactorAssembly,
    u: usize,
    g: &Digraph,
    f: &OneFactor,
    deadline: Duration,
    seed: u64,
) -> Result<MergeReport> {
    if asm.succ.is_empty() {
        return Err(Error::precondition("merge needs a completed 1-factor"));
    }
    let um = f.predecessor(u);
    let lower: Vec<usize> = asm.matchings[um].iter().map(|&(a, _)| a).collect();
    let upper: Vec<usize> = asm.matchings[um].iter().map(|&(_, b)| b).collect();
    let report = merge_matching(g, &mut asm.succ, &lower, &upper, deadline, seed)?;
    let mut pairs: Vec<(usize, usize)> = lower.iter().map(|&a| (a, asm.succ[a])).collect();
    pairs.sort_unstable();
    asm.matchings[um] = pairs;
    Ok(report)
}
