//! Exact rational parameters (`β`, `ε`, `d`, ...) and the integer roundings
//! the algorithms need.
//!
//! Thresholds involving square roots (`5√d·k`, `16√ε·m`) are compared by
//! squaring both sides, so no floating point ever decides a branch.

use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};

pub type Rational = num_rational::Ratio<i64>;

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(numer, denom)
}

pub fn int(x: usize) -> Rational {
    Rational::from_integer(x as i64)
}

/// Parses `"3/8"`, `"7"` or a finite decimal such as `"0.0025"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let w: i64 = if whole.is_empty() || whole == "-" {
            0
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let f: i64 = frac.parse().map_err(|_| bad())?;
        let scale = 10i64.pow(frac.len() as u32);
        let mag = w.abs() * scale + f;
        return Ok(Rational::new(if negative { -mag } else { mag }, scale));
    }
    let n: i64 = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn ceil_int(r: &Rational) -> i64 {
    r.ceil().to_integer()
}

pub fn floor_int(r: &Rational) -> i64 {
    r.floor().to_integer()
}

/// Smallest integer `t ≥ 0` with `t² ≥ q`.
pub fn ceil_sqrt(q: &Rational) -> i64 {
    if !q.is_positive() {
        return 0;
    }
    let mut t = to_f64(q).sqrt().ceil() as i64;
    while t > 0 && sq(t - 1) >= *q {
        t -= 1;
    }
    while sq(t) < *q {
        t += 1;
    }
    t
}

/// Largest integer `t ≥ 0` with `t² ≤ q`.
pub fn floor_sqrt(q: &Rational) -> i64 {
    if !q.is_positive() {
        return 0;
    }
    let mut t = to_f64(q).sqrt().floor() as i64;
    while sq(t) > *q {
        t -= 1;
    }
    while sq(t + 1) <= *q {
        t += 1;
    }
    t
}

fn sq(t: i64) -> Rational {
    Rational::from_integer(t * t)
}

/// `x ≤ c·√q` for non-negative `x`, decided exactly.
pub fn le_scaled_sqrt(x: usize, c: &Rational, q: &Rational) -> bool {
    let x = int(x);
    x * x <= c * c * q
}

/// Integer `i` satisfies `i ≥ r`.
pub fn int_ge(i: usize, r: &Rational) -> bool {
    int(i) >= *r
}



/// Serde adapter writing rationals as `"p/q"` strings.
pub mod serde_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_opt_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        r: &Option<Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Rational>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/8").unwrap(), ratio(3, 8));
        assert_eq!(parse_rational("0.0025").unwrap(), ratio(1, 400));
        assert_eq!(parse_rational("2").unwrap(), ratio(2, 1));
        assert_eq!(parse_rational("-0.5").unwrap(), ratio(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn sqrt_roundings() {
        assert_eq!(ceil_sqrt(&ratio(16, 1)), 4);
        assert_eq!(ceil_sqrt(&ratio(17, 1)), 5);
        assert_eq!(floor_sqrt(&ratio(17, 1)), 4);
        assert_eq!(ceil_sqrt(&ratio(1, 4)), 1);
        assert_eq!(floor_sqrt(&ratio(1, 4)), 0);
        // 16·√(1/4096)·12 = 3
        assert_eq!(ceil_sqrt(&(ratio(256, 4096) * ratio(144, 1))), 3);
    }

    #[test]
    fn scaled_sqrt_comparison() {
        // 5·√0.0025·400 = 100
        let d = ratio(1, 400);
        assert!(le_scaled_sqrt(100, &ratio(2000, 1), &d));
        assert!(!le_scaled_sqrt(101, &ratio(2000, 1), &d));
    }
}
