use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{sub_seed, AssemblyParams, ExceptionalAssignment, UseCap};
use crate::digraph::{Digraph, OneFactor};
use crate::error::{Error, Result};
use crate::matching::find_separator;
use crate::rational::{ceil_int, int};
use crate::walks::{account, build_h, find_shifted_walk_in, ShiftedWalk};

/// Cluster orders tried before the walk construction gives up.
pub const WALK_ATTEMPTS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "lowercase")]
pub enum Step {
    Cluster(usize),
    Exceptional(usize),
}

/// The closed walk `W`, read cyclically: the step after the last is the first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterWalk {
    pub steps: Vec<Step>,
    /// `W(Y_i, X⁺_{i+1})` for each exceptional vertex; the last one (or the
    /// only one when `V₀ = ∅`) is the covering walk.
    pub pieces: Vec<ShiftedWalk>,
    pub visits: Vec<usize>,
    /// Non-`F` steps into each cluster.
    pub entered: Vec<usize>,
    /// Non-`F` steps out of each cluster.
    pub exited: Vec<usize>,
}

impl ClusterWalk {
    fn from_steps(steps: Vec<Step>, pieces: Vec<ShiftedWalk>, f: &OneFactor) -> Self {
        let k = f.n();
        let mut visits = vec![0; k];
        let mut entered = vec![0; k];
        let mut exited = vec![0; k];
        for (i, s) in steps.iter().enumerate() {
            if let Step::Cluster(c) = *s {
                visits[c] += 1;
            }
            let next = steps[(i + 1) % steps.len()];
            match (*s, next) {
                (Step::Cluster(a), Step::Cluster(b)) if f.successor(a) == b => {}
                (a, b) => {
                    if let Step::Cluster(a) = a {
                        exited[a] += 1;
                    }
                    if let Step::Cluster(b) = b {
                        entered[b] += 1;
                    }
                }
            }
        }
        ClusterWalk {
            steps,
            pieces,
            visits,
            entered,
            exited,
        }
    }

    pub fn uses(&self) -> Vec<usize> {
        self.entered.iter().zip(&self.exited).map(|(a, b)| a + b).collect()
    }

    /// Non-`F` steps between clusters, with multiplicity.
    pub fn cross_steps(&self, f: &OneFactor) -> Vec<(usize, usize)> {
        let len = self.steps.len();
        (0..len)
            .filter_map(|i| match (self.steps[i], self.steps[(i + 1) % len]) {
                (Step::Cluster(a), Step::Cluster(b)) if f.successor(a) != b => Some((a, b)),
                _ => None,
            })
            .collect()
    }

    /// Balance on every `F`-cycle, every cluster visited, the use cap, and
    /// every exceptional vertex visited exactly once.
    pub fn audit(&self, f: &OneFactor, v0: &[usize], cap: UseCap, m: usize) -> Result<()> {
        for cyc in f.cycles() {
            if cyc.iter().any(|&c| self.visits[c] != self.visits[cyc[0]]) {
                return Err(Error::contract("walk visits an F-cycle unevenly", Some(cyc.clone())));
            }
        }
        if let Some(c) = self.visits.iter().position(|&v| v == 0) {
            return Err(Error::contract(format!("cluster {c} never visited"), Some(vec![c])));
        }
        if let Some(c) = (0..f.n()).find(|&c| !cap.allows(m, self.entered[c], self.exited[c])) {
            return Err(Error::contract(
                format!(
                    "cluster {c} entered {} and exited {} times, over the {cap:?} cap",
                    self.entered[c], self.exited[c]
                ),
                Some(vec![c]),
            ));
        }
        let mut xs: Vec<usize> = self
            .steps
            .iter()
            .filter_map(|s| match s {
                Step::Exceptional(x) => Some(*x),
                Step::Cluster(_) => None,
            })
            .collect();
        xs.sort_unstable();
        let mut want = v0.to_vec();
        want.sort_unstable();
        if xs != want {
            return Err(Error::contract("exceptional vertices not visited exactly once", Some(xs)));
        }
        Ok(())
    }
}

struct Builder<'a> {
    h: Digraph,
    f: &'a OneFactor,
    cap: UseCap,
    m: usize,
    entered: Vec<usize>,
    exited: Vec<usize>,
}

impl Builder<'_> {
    /// Shortest walk avoiding internal use of clusters at the cap; falls back
    /// to an unrestricted walk, leaving the final audit to catch overuse.
    fn walk(&mut self, a: usize, b: usize) -> Result<ShiftedWalk> {
        let full: Vec<usize> = (0..self.h.n())
            .filter(|&c| c != a && c != b && !self.cap.allows(self.m, self.entered[c] + 1, self.exited[c] + 1))
            .collect();
        let w = match find_shifted_walk_in(&self.h, self.f, a, b, &full) {
            Ok(w) => w,
            Err(Error::Unreachable(_)) => find_shifted_walk_in(&self.h, self.f, a, b, &[])?,
            Err(e) => return Err(e),
        };
        self.record(&w);
        Ok(w)
    }

    fn record(&mut self, w: &ShiftedWalk) {
        let u = account(std::slice::from_ref(w), self.f);
        for c in 0..self.h.n() {
            self.entered[c] += u.entered[c];
            self.exited[c] += u.exited[c];
        }
    }

    /// A walk from `a` to `b` using every cluster at least once, built from
    /// sub-walks aimed at each unused `c`, or at `c⁺` when `c` cannot take
    /// another entry (continuing past `c⁺` uses `c` as an exit).
    fn covering(&mut self, a: usize, b: usize, order: &[usize]) -> Result<ShiftedWalk> {
        let k = self.h.n();
        let mut walk = ShiftedWalk::trivial(a);
        for _ in 0..=2 * k + 1 {
            let saved = (self.entered.clone(), self.exited.clone());
            let tail = self.walk(walk.end(), b)?;
            let candidate = walk.concat(&tail)?;
            let usage = account(std::slice::from_ref(&candidate), self.f);
            let Some(&c) = order.iter().find(|&&c| usage.uses[c] == 0) else {
                return Ok(candidate);
            };
            (self.entered, self.exited) = saved;
            let here = walk.end();
            // enter `c` itself while it has room, else leave it via `c⁺`
            let target = if self.cap.allows(self.m, self.entered[c] + 1, self.exited[c]) {
                c
            } else {
                self.f.successor(c)
            };
            let step = if target == here {
                // c = here⁻ becomes an exit as soon as the walk leaves `here`
                let next = *self.h.out_neighbors(here).first().ok_or_else(|| {
                    Error::Unreachable(format!("cluster {here} has no out-neighbour in H"))
                })?;
                self.walk(here, next)?
            } else {
                self.walk(here, target)?
            };
            walk = walk.concat(&step)?;
        }
        Err(Error::contract("covering walk did not converge", None))
    }
}

/// Builds `W = x₁ W(Y₁, X₂) x₂ … x_r W(Y_r, X₁) x₁`, where `W(Y_i, X_{i+1})`
/// is a shifted walk to `X⁺_{i+1}` followed by the `F`-path to `X_{i+1}`,
/// and `W(Y_r, X⁺₁)` uses every cluster. With `V₀ = ∅`, `W` is a closed
/// covering walk from cluster 0.
pub fn build_walk(
    r2: &Digraph,
    f: &OneFactor,
    assign: &ExceptionalAssignment,
    params: &AssemblyParams,
    m: usize,
    seed: u64,
) -> Result<ClusterWalk> {
    let k = r2.n();
    let h = build_h(r2, f)?;
    let need = ceil_int(&(params.eta * int(k))) as usize;
    if let Some(sep) = find_separator(&h, need) {
        return Err(Error::WrongPipeline {
            message: format!("H is not strongly {need}-connected"),
            separator: Some(sep),
        });
    }
    let mut last = None;
    for attempt in 0..WALK_ATTEMPTS {
        let mut order: Vec<usize> = (0..k).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(sub_seed(seed, 20, attempt)));
        match try_walk(&h, f, assign, params, m, &order) {
            Ok(w) => return Ok(w),
            Err(e @ Error::Contract { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(Error::RandomizedConstruction {
        attempts: WALK_ATTEMPTS,
        message: last.map_or_else(String::new, |e| e.to_string()),
    })
}

fn try_walk(
    h: &Digraph,
    f: &OneFactor,
    assign: &ExceptionalAssignment,
    params: &AssemblyParams,
    m: usize,
    order: &[usize],
) -> Result<ClusterWalk> {
    let k = h.n();
    let mut b = Builder {
        h: h.clone(),
        f,
        cap: params.cap,
        m,
        entered: vec![0; k],
        exited: vec![0; k],
    };
    for e in &assign.entries {
        b.exited[e.x_cluster] += 1;
        b.entered[e.y_cluster] += 1;
    }
    let entries = &assign.entries;
    let r = entries.len();
    let mut pieces = Vec::with_capacity(r.max(1));
    let mut steps = Vec::new();
    if r == 0 {
        let w = b.covering(0, 0, order)?;
        let mut seq = w.clusters(f);
        seq.pop();
        steps.extend(seq.into_iter().map(Step::Cluster));
        pieces.push(w);
    } else {
        for i in 0..r {
            let next = entries[(i + 1) % r].x_cluster;
            let from = entries[i].y_cluster;
            let to = f.successor(next);
            let w = if i + 1 == r {
                b.covering(from, to, order)?
            } else {
                b.walk(from, to)?
            };
            steps.push(Step::Exceptional(entries[i].x));
            steps.extend(w.clusters(f).into_iter().map(Step::Cluster));
            let mut v = to;
            while v != next {
                v = f.successor(v);
                steps.push(Step::Cluster(v));
            }
            pieces.push(w);
        }
    }
    let walk = ClusterWalk::from_steps(steps, pieces, f);
    let v0: Vec<usize> = entries.iter().map(|e| e.x).collect();
    walk.audit(f, &v0, params.cap, m)?;
    Ok(walk)
}
