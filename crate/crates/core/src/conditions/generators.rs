use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// `I = {0, …, k−1}` independent, `K = {k, …, n−1}` complete, and
/// `X = {k, …, 2k−1}` joined to `I` in both directions.
pub fn gen_extremal_chvatal(n: usize, k: usize) -> Result<Digraph> {
    if k == 0 || 2 * k >= n {
        return Err(Error::Parameter(format!("need 1 <= k < n/2, got n={n}, k={k}")));
    }
    let mut adj = vec![vec![false; n]; n];
    for u in k..n {
        for v in k..n {
            adj[u][v] = u != v;
        }
    }
    for i in 0..k {
        for x in k..2 * k {
            adj[i][x] = true;
            adj[x][i] = true;
        }
    }
    Ok(Digraph::from_matrix(&adj))
}

/// All forward edges `i → j` (`i < j`), plus all backward edges inside the
/// first `an + 1` and inside the last `an + 1` vertices.
pub fn gen_concluding_example(n: usize, a: Rational) -> Result<Digraph> {
    if a <= Rational::from_integer(0) || a >= Rational::new(1, 2) {
        return Err(Error::Parameter("need 0 < a < 1/2".into()));
    }
    let an = a * int(n);
    if !an.is_integer() {
        return Err(Error::Parameter(format!("a*n = {an} is not an integer")));
    }
    let block = *an.numer() as usize + 1;
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            adj[i][j] = true;
            if j < block || i >= n - block {
                adj[j][i] = true;
            }
        }
    }
    Ok(Digraph::from_matrix(&adj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn extremal_sequences() {
        let g = gen_extremal_chvatal(8, 3).unwrap();
        let seq = g.degree_sequences();
        assert_eq!(seq.out_sorted, vec![3, 3, 3, 4, 4, 7, 7, 7]);
        assert_eq!(seq.in_sorted, seq.out_sorted);
        assert!(g.is_strongly_connected());
        let g = gen_extremal_chvatal(6, 1).unwrap();
        assert_eq!(g.degree_sequences().out_sorted, vec![1, 4, 4, 4, 4, 5]);
        assert!(gen_extremal_chvatal(8, 4).is_err());
    }

    #[test]
    fn concluding_example() {
        let g = gen_concluding_example(10, ratio(1, 5)).unwrap();
        assert_eq!(g.min_semidegree(), 2);
        let seq = g.degree_sequences();
        for i in 1..=10 {
            assert!(seq.out_at(i).unwrap() + 1 >= i as usize);
            assert!(seq.in_at(i).unwrap() + 1 >= i as usize);
        }
        assert!(gen_concluding_example(10, ratio(1, 4)).is_err());
    }
}
