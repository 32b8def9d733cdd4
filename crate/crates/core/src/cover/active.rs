use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::paths::{large_threshold, partition_cycles_paths, PathCyclePartition};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::rational::{self, ceil_int, int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoverCase {
    #[serde(rename = "1")]
    WasteVertex,
    #[serde(rename = "2")]
    IntoCycle,
    #[serde(rename = "3i")]
    JoinPath,
    #[serde(rename = "3ii")]
    SplitSelf,
    #[serde(rename = "4i")]
    AppendToTail,
    #[serde(rename = "4ii")]
    PrependToHead,
    #[serde(rename = "4iii")]
    CloseAtTail,
    #[serde(rename = "4iv")]
    CloseAtHead,
    #[serde(rename = "dump")]
    Dump,
}

impl CoverCase {
    pub fn label(self) -> &'static str {
        match self {
            CoverCase::WasteVertex => "1",
            CoverCase::IntoCycle => "2",
            CoverCase::JoinPath => "3i",
            CoverCase::SplitSelf => "3ii",
            CoverCase::AppendToTail => "4i",
            CoverCase::PrependToHead => "4ii",
            CoverCase::CloseAtTail => "4iii",
            CoverCase::CloseAtHead => "4iv",
            CoverCase::Dump => "dump",
        }
    }
}

/// One iteration of the active-path algorithm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub iteration: usize,
    pub case: CoverCase,
    /// Total number of vertices on paths before the step.
    pub s: usize,
    #[serde(with = "rational::serde_opt_str")]
    pub alpha: Option<Rational>,
    pub active: usize,
    /// The other path (cases 3 and 4) or cycle (case 2) involved.
    pub partner: Option<usize>,
    /// `ℓ_r` of the partner path in cases 3 and 4.
    pub ell: Option<usize>,
    pub waste_delta: usize,
    pub waste_total: usize,
    pub paths_after: usize,
    /// Every path started at indegree and ended at outdegree `≥ (1/2 − 2d)k`.
    pub endpoint_invariant: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverResult {
    pub cycles: Vec<Vec<usize>>,
    pub waste: Vec<usize>,
    pub trace: Vec<TraceStep>,
    pub initial: PathCyclePartition,
    /// Waste charged to each initial path outside the final dump.
    pub charged: Vec<usize>,
    pub dumped: usize,
}

impl CoverResult {
    /// `|W| ≤ 7√d·k`, compared as `|W|² ≤ 49·d·k²`.
    pub fn within_bound(&self, d: Rational, k: usize) -> bool {
        let w = self.waste.len();
        int(w * w) <= Rational::from_integer(49) * d * int(k * k)
    }

    /// One JSON object per line.
    pub fn trace_jsonl(&self) -> String {
        self.trace
            .iter()
            .map(|s| serde_json::to_string(s).expect("plain data serializes") + "\n")
            .collect()
    }

    /// Cycles are disjoint cycles of `r` and, with the waste, cover `V(r)`.
    pub fn validate(&self, r: &Digraph) -> Result<()> {
        PathCyclePartition {
            cycles: self.cycles.clone(),
            paths: Vec::new(),
            waste: self.waste.clone(),
        }
        .validate(r)
    }
}

/// How the next active path is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActiveChoice {
    /// Longest remaining path, ties to the lowest id.
    Longest,
    Random(u64),
}

/// Runs [`partition_cycles_paths`] and then the active-path algorithm; `seed`
/// switches the active-path choice from longest-first to seeded random.
pub fn cover_by_cycles(r: &Digraph, d: Rational, seed: Option<u64>) -> Result<CoverResult> {
    let initial = partition_cycles_paths(r, d)?;
    let choice = seed.map_or(ActiveChoice::Longest, ActiveChoice::Random);
    cover_from_partition(r, d, initial, choice)
}

struct State {
    cycles: Vec<Vec<usize>>,
    paths: Vec<Option<Vec<usize>>>,
    waste: Vec<usize>,
    origin: Vec<usize>,
    charged: Vec<usize>,
}

impl State {
    fn live(&self) -> impl Iterator<Item = (usize, &Vec<usize>)> + '_ {
        self.paths.iter().enumerate().filter_map(|(i, p)| p.as_ref().map(|p| (i, p)))
    }

    fn discard(&mut self, verts: &[usize]) {
        for &v in verts {
            if self.origin[v] != usize::MAX {
                self.charged[self.origin[v]] += 1;
            }
        }
        self.waste.extend_from_slice(verts);
    }
}

fn choose(state: &State, choice: ActiveChoice, rng: &mut Option<ChaCha8Rng>) -> Option<usize> {
    match choice {
        ActiveChoice::Longest => {
            let mut best: Option<(usize, usize)> = None;
            for (i, p) in state.live() {
                if best.is_none_or(|(_, len)| p.len() > len) {
                    best = Some((i, p.len()));
                }
            }
            best.map(|b| b.0)
        }
        ActiveChoice::Random(_) => {
            let ids: Vec<usize> = state.live().map(|(i, _)| i).collect();
            ids.choose(rng.as_mut().expect("rng for random choice")).copied()
        }
    }
}

/// The active-path algorithm from a given partition into cycles and paths
/// (with empty waste). Conditions are tried in the order (1), (2), (3), (4),
/// each with the lowest-index witness.
pub fn cover_from_partition(
    r: &Digraph,
    d: Rational,
    initial: PathCyclePartition,
    choice: ActiveChoice,
) -> Result<CoverResult> {
    initial.validate(r)?;
    if !initial.waste.is_empty() {
        return Err(Error::Parameter("initial partition must have empty waste".into()));
    }
    let k = r.n();
    let threshold = large_threshold(k, d);
    let mut origin = vec![usize::MAX; k];
    for (i, p) in initial.paths.iter().enumerate() {
        for &v in p {
            origin[v] = i;
        }
    }
    let mut state = State {
        cycles: initial.cycles.clone(),
        paths: initial.paths.iter().cloned().map(Some).collect(),
        waste: Vec::new(),
        origin,
        charged: vec![0; initial.paths.len()],
    };
    let mut rng = match choice {
        ActiveChoice::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        ActiveChoice::Longest => None,
    };
    let mut trace = Vec::new();
    let mut dumped = 0;
    let mut active = choose(&state, choice, &mut rng);
    let dump_limit = Rational::from_integer(25) * d * int(k * k);
    while let Some(a) = active {
        let iteration = trace.len();
        let endpoint_invariant = state.live().all(|(_, p)| {
            int(r.in_degree(p[0])) >= threshold && int(r.out_degree(*p.last().unwrap())) >= threshold
        });
        if !endpoint_invariant {
            return Err(Error::contract(
                format!("iteration {iteration}: a path endpoint is below (1/2 - 2d)k"),
                None,
            ));
        }
        let s: usize = state.live().map(|(_, p)| p.len()).sum();
        let waste_before = state.waste.len();
        let mut step = TraceStep {
            iteration,
            case: CoverCase::Dump,
            s,
            alpha: None,
            active: a,
            partner: None,
            ell: None,
            waste_delta: 0,
            waste_total: 0,
            paths_after: 0,
            endpoint_invariant,
        };
        // S ≤ 5√d·k  ⇔  S² ≤ 25·d·k²
        if int(s * s) <= dump_limit {
            let rest: Vec<usize> = state.live().flat_map(|(_, p)| p.iter().copied()).collect();
            state.waste.extend_from_slice(&rest);
            dumped = rest.len();
            state.paths.iter_mut().for_each(|p| *p = None);
            step.waste_delta = rest.len();
            step.waste_total = state.waste.len();
            trace.push(step);
            break;
        }
        let alpha = Rational::from_integer(5) * d * int(k) / int(s);
        step.alpha = Some(alpha);
        let ell = |len: usize| ceil_int(&(alpha * int(len))).max(0) as usize;
        let p = state.paths[a].clone().expect("active path is live");
        let (u, v) = (p[0], *p.last().unwrap());
        let mut next_active = None;

        let case = 'found: {
            // (1)
            state.waste.sort_unstable();
            if let Some(pos) = state.waste.iter().position(|&w| r.has_edge(w, u) && r.has_edge(v, w)) {
                let w = state.waste.remove(pos);
                let mut c = vec![w];
                c.extend_from_slice(&p);
                state.cycles.push(c);
                state.paths[a] = None;
                break 'found CoverCase::WasteVertex;
            }
            // (2)
            for ci in 0..state.cycles.len() {
                let c = &state.cycles[ci];
                let t = c.len();
                if let Some(i) = (0..t).find(|&i| r.has_edge(c[i], u) && r.has_edge(v, c[(i + 1) % t])) {
                    let mut merged = c[..=i].to_vec();
                    merged.extend_from_slice(&p);
                    merged.extend_from_slice(&c[i + 1..]);
                    state.cycles[ci] = merged;
                    state.paths[a] = None;
                    step.partner = Some(ci);
                    break 'found CoverCase::IntoCycle;
                }
            }
            let live: Vec<(usize, Vec<usize>)> = state.live().map(|(i, p)| (i, p.clone())).collect();
            // (3)
            for (rid, w) in &live {
                let l = ell(w.len());
                let t = w.len();
                let hit = (0..t).filter(|&i| r.has_edge(w[i], u)).find_map(|i| {
                    (i + 1..t.min(i + l + 2)).find(|&j| r.has_edge(v, w[j])).map(|j| (i, j))
                });
                let Some((i, j)) = hit else { continue };
                step.partner = Some(*rid);
                step.ell = Some(l);
                state.discard(&w[i + 1..j]);
                if *rid != a {
                    let mut np = w[..=i].to_vec();
                    np.extend_from_slice(&p);
                    np.extend_from_slice(&w[j..]);
                    state.paths[*rid] = Some(np);
                    state.paths[a] = None;
                    next_active = Some(*rid);
                    break 'found CoverCase::JoinPath;
                }
                state.cycles.push(w[..=i].to_vec());
                state.cycles.push(w[j..].to_vec());
                state.paths[a] = None;
                break 'found CoverCase::SplitSelf;
            }
            // (4)
            for (rid, w) in &live {
                let l = ell(w.len());
                let t = w.len();
                let iu = (0..t).find(|&i| r.has_edge(w[t - 1 - i], u));
                let iv = (0..t).find(|&i| r.has_edge(v, w[i]));
                step.partner = Some(*rid);
                step.ell = Some(l);
                if let Some(iu) = iu.filter(|&x| x <= l) {
                    state.discard(&w[t - iu..]);
                    state.paths[a] = None;
                    if *rid != a {
                        let mut np = w[..t - iu].to_vec();
                        np.extend_from_slice(&p);
                        state.paths[*rid] = Some(np);
                        next_active = Some(*rid);
                        break 'found CoverCase::AppendToTail;
                    }
                    state.cycles.push(w[..t - iu].to_vec());
                    break 'found CoverCase::CloseAtTail;
                }
                if let Some(iv) = iv.filter(|&x| x <= l) {
                    state.discard(&w[..iv]);
                    state.paths[a] = None;
                    if *rid != a {
                        let mut np = p.clone();
                        np.extend_from_slice(&w[iv..]);
                        state.paths[*rid] = Some(np);
                        next_active = Some(*rid);
                        break 'found CoverCase::PrependToHead;
                    }
                    state.cycles.push(w[iv..].to_vec());
                    break 'found CoverCase::CloseAtHead;
                }
            }
            return Err(Error::ImpossibleState { active_path: a });
        };
        step.case = case;
        step.waste_total = state.waste.len();
        step.waste_delta = step.waste_total.saturating_sub(waste_before);
        step.paths_after = state.live().count();
        trace.push(step);
        active = next_active.or_else(|| choose(&state, choice, &mut rng));
    }
    let mut waste = state.waste;
    waste.sort_unstable();
    let result = CoverResult {
        cycles: state.cycles,
        waste,
        trace,
        charged: state.charged,
        initial,
        dumped,
    };
    result.validate(r)?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn no_paths_is_identity() {
        let r = Digraph::complete(7);
        let res = cover_by_cycles(&r, ratio(1, 20), None).unwrap();
        assert!(res.waste.is_empty());
        assert!(res.trace.is_empty());
        assert_eq!(res.cycles, res.initial.cycles);
    }

    #[test]
    fn spanning_path_in_complete_digraph() {
        let r = Digraph::complete(10);
        let initial = PathCyclePartition {
            cycles: vec![],
            paths: vec![(0..10).collect()],
            waste: vec![],
        };
        // S = 10 > 5·(1/5)·10 = 10 is false, so with d = 1/25 the dump
        // threshold is 5·(1/5)·10 = 10 ≥ S: everything is dumped
        let res = cover_from_partition(&r, ratio(1, 25), initial.clone(), ActiveChoice::Longest).unwrap();
        assert_eq!(res.trace[0].case, CoverCase::Dump);
        // with d = 1/100 the threshold is 5 and α = 1/20, ℓ = 1; 9 → 0 closes
        // the path into a cycle at once
        let res = cover_from_partition(&r, ratio(1, 100), initial, ActiveChoice::Longest).unwrap();
        assert_eq!(res.trace.len(), 1);
        let step = &res.trace[0];
        assert_eq!(step.case, CoverCase::SplitSelf);
        // lowest witness: i = 1 (w_2 → u), j = 2 (v → w_3)
        assert_eq!(res.cycles, vec![vec![0, 1], vec![2, 3, 4, 5, 6, 7, 8, 9]]);
        assert_eq!(step.waste_delta, 0);
        assert_eq!(step.alpha, Some(ratio(1, 20)));
        assert!(res.waste.is_empty());
    }
}
