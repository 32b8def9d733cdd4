use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, int, to_f64, Rational};

/// Number of marked elements among `k` drawn without replacement from `n`
/// elements of which `m` are marked. Exact: draws one element at a time.
pub fn sample_hypergeometric<R: Rng>(n: usize, m: usize, k: usize, rng: &mut R) -> Result<usize> {
    if m > n || k > n {
        return Err(Error::Parameter(format!(
            "hypergeometric needs m, k <= n, got n={n}, m={m}, k={k}"
        )));
    }
    let (mut left, mut marked, mut hits) = (n, m, 0);
    for _ in 0..k {
        if rng.gen_range(0..left) < marked {
            hits += 1;
            marked -= 1;
        }
        left -= 1;
    }
    Ok(hits)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChernoffAudit {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub trials: usize,
    #[serde(with = "rational::serde_str")]
    pub a: Rational,
    #[serde(with = "rational::serde_str")]
    pub expectation: Rational,
    /// Fraction of trials with `|X − EX| ≥ a·EX`.
    pub empirical_tail: f64,
    /// `2·exp(−a²·EX/3)`.
    pub bound: f64,
    pub passes: bool,
}

pub fn chernoff_audit(n: usize, m: usize, k: usize, trials: usize, a: Rational, seed: u64) -> Result<ChernoffAudit> {
    if a <= Rational::from_integer(0) || a >= Rational::new(3, 2) {
        return Err(Error::Parameter(format!("need 0 < a < 3/2, got {a}")));
    }
    if trials == 0 || n == 0 {
        return Err(Error::Parameter("need n >= 1 and at least one trial".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let expectation = int(k * m) / int(n);
    let margin = a * expectation;
    let mut hits = 0usize;
    for _ in 0..trials {
        let x = int(sample_hypergeometric(n, m, k, &mut rng)?);
        if (x - expectation).abs() >= margin {
            hits += 1;
        }
    }
    let empirical_tail = hits as f64 / trials as f64;
    let af = to_f64(&a);
    let bound = 2.0 * (-af * af * to_f64(&expectation) / 3.0).exp();
    Ok(ChernoffAudit {
        n,
        m,
        k,
        trials,
        a,
        expectation,
        empirical_tail,
        bound,
        passes: empirical_tail <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn degenerate_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            assert_eq!(sample_hypergeometric(10, 10, 4, &mut rng).unwrap(), 4);
            assert_eq!(sample_hypergeometric(10, 0, 4, &mut rng).unwrap(), 0);
        }
        assert!(sample_hypergeometric(10, 11, 4, &mut rng).is_err());
    }

    #[test]
    fn mean_is_close() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let total: usize = (0..20_000)
            .map(|_| sample_hypergeometric(50, 20, 10, &mut rng).unwrap())
            .sum();
        let mean = total as f64 / 20_000.0;
        assert!((mean - 4.0).abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn audit_rejects_bad_a() {
        assert!(chernoff_audit(100, 30, 20, 10, ratio(3, 2), 0).is_err());
        assert!(chernoff_audit(100, 30, 20, 10, ratio(0, 1), 0).is_err());
        let r = chernoff_audit(100, 30, 20, 1000, ratio(1, 2), 0).unwrap();
        assert_eq!(r.expectation, ratio(6, 1));
    }
}
