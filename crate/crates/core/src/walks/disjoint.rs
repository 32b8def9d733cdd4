use super::{build_h, ShiftedWalk};
use crate::digraph::{Digraph, OneFactor};
use crate::error::{Error, Result};
use crate::matching::{find_separator, internally_disjoint_paths};
use crate::rational::{ceil_int, floor_int, int, Rational};

/// At least `⌈c²k/16⌉` walks from `a` to `b`, each traversing at most `2/c`
/// cycles, no cluster internally used by two of them.
pub fn disjoint_shifted_walks(
    r: &Digraph,
    f: &OneFactor,
    a: usize,
    b: usize,
    c: Rational,
) -> Result<Vec<ShiftedWalk>> {
    if c <= Rational::from_integer(0) || c > Rational::from_integer(1) {
        return Err(Error::Parameter(format!("c must lie in (0, 1], got {c}")));
    }
    let k = r.n();
    if a >= k || b >= k {
        return Err(Error::VertexOutOfRange { vertex: a.max(b), n: k });
    }
    if a == b {
        return Err(Error::Parameter("disjoint walks need distinct endpoints".into()));
    }
    let h = build_h(r, f)?;
    let kappa = ceil_int(&(c * int(k))) as usize;
    if kappa >= k {
        return Err(Error::precondition(format!(
            "no digraph on {k} vertices is strongly {kappa}-connected"
        )));
    }
    if let Some(sep) = find_separator(&h, kappa) {
        return Err(Error::Precondition {
            message: format!("H is not strongly {kappa}-connected"),
            witness: Some(sep),
        });
    }
    let max_len = floor_int(&(Rational::from_integer(2) / c)) as usize;
    let mut paths: Vec<Vec<usize>> = internally_disjoint_paths(&h, a, b, kappa)
        .into_iter()
        .filter(|p| p.len() - 1 <= max_len)
        .collect();
    paths.sort_by_key(|p| p.len());
    let mut taken = vec![false; k];
    let mut walks = Vec::new();
    for p in paths {
        let w = ShiftedWalk::from_h_path(p)?;
        let inner = internal(&w, f);
        if inner.iter().any(|&x| taken[x]) {
            continue;
        }
        for x in inner {
            taken[x] = true;
        }
        walks.push(w);
    }
    let need = ceil_int(&(c * c * int(k) / Rational::from_integer(16))) as usize;
    if walks.len() < need {
        return Err(Error::contract(
            format!("only {} disjoint walks, need {need}", walks.len()),
            None,
        ));
    }
    Ok(walks)
}

/// `X₂, X₂⁻, …, X_t, X_t⁻`.
fn internal(w: &ShiftedWalk, f: &OneFactor) -> Vec<usize> {
    let t = w.t();
    w.entrances
        .get(1..t)
        .unwrap_or(&[])
        .iter()
        .flat_map(|&x| [x, f.predecessor(x)])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::walks::{account, unshift};

    #[test]
    fn complete_h() {
        let f = OneFactor::from_successors((0..20).map(|i| (i + 1) % 20).collect()).unwrap();
        let r = Digraph::complete(20);
        let walks = disjoint_shifted_walks(&r, &f, 0, 7, ratio(2, 5)).unwrap();
        assert!(!walks.is_empty());
        assert!(walks.iter().all(|w| w.t() <= 5));
    }

    #[test]
    fn circulant_h_with_connectivity_eight() {
        let f = OneFactor::from_successors((0..20).map(|i| (i + 1) % 20).collect()).unwrap();
        let h = Digraph::new(20, (0..20).flat_map(|a| (1..=8).map(move |j| (a, (a + j) % 20)))).unwrap();
        assert_eq!(crate::matching::strong_connectivity(&h), 8);
        let r = unshift(&h, &f).unwrap();
        let c = ratio(2, 5);
        let walks = disjoint_shifted_walks(&r, &f, 0, 10, c).unwrap();
        assert!(!walks.is_empty());
        let usage = account(&walks, &f);
        assert!(usage.internal_uses.iter().all(|&u| u <= 1));
        for w in &walks {
            w.validate(&r, &f).unwrap();
        }
    }

    #[test]
    fn disconnected_h_reports_separator() {
        let f = OneFactor::from_successors(vec![1, 0, 3, 2]).unwrap();
        let r = Digraph::new(4, [(0, 1), (1, 0), (2, 3), (3, 2)]).unwrap();
        match disjoint_shifted_walks(&r, &f, 0, 2, ratio(1, 4)) {
            Err(Error::Precondition { witness, .. }) => assert_eq!(witness, Some(vec![])),
            other => panic!("{other:?}"),
        }
    }
}
