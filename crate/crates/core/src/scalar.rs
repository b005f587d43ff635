//! Exact rational scalars.
//!
//! Every coefficient, weight value and inner product in this crate is an
//! arbitrary-precision rational. No floating point appears anywhere in the
//! library; all verdicts are decided by exact arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number, always reduced, denominator positive.
pub type Rat = BigRational;

/// Error parsing a rational from its string form.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseRatError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer `{0}` in rational literal")]
    BadInt(String),
    #[error("zero denominator in rational literal")]
    ZeroDenominator,
}

/// The integer `n` as a rational.
pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// The fraction `p/q`. Panics if `q == 0`; intended for in-code literals.
pub fn frac(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

fn parse_bigint(s: &str) -> Result<BigInt, ParseRatError> {
    if s.is_empty() {
        return Err(ParseRatError::Empty);
    }
    s.parse::<BigInt>()
        .map_err(|_| ParseRatError::BadInt(s.to_owned()))
}

/// Parse `"p"` or `"p/q"`, decimal digits with an optional leading sign.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRatError::Empty);
    }
    match s.split_once('/') {
        None => Ok(Rat::from_integer(parse_bigint(s)?)),
        Some((num, den)) => {
            let num = parse_bigint(num.trim())?;
            let den = parse_bigint(den.trim())?;
            if den.is_zero() {
                return Err(ParseRatError::ZeroDenominator);
            }
            Ok(Rat::new(num, den))
        }
    }
}

/// Format as `"p"` when the denominator is 1, else `"p/q"`.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `k!` as a big integer.
pub fn factorial(k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=k {
        acc *= BigInt::from(i);
    }
    acc
}

/// Rising factorial `(t)_k = t (t+1) ... (t+k-1)`, with `(t)_0 = 1`.
pub fn rising(t: &Rat, k: u32) -> Rat {
    let mut acc = Rat::one();
    for i in 0..k {
        acc *= t + int(i64::from(i));
    }
    acc
}

/// Binomial coefficient `C(n, k)` for `0 <= k <= n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    assert!(k <= n, "binomial requires k <= n");
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `r^k` for a nonnegative integer exponent.
pub fn pow_rat(r: &Rat, k: u32) -> Rat {
    let mut acc = Rat::one();
    let mut base = r.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    acc
}

/// True when `r` is a nonnegative rational.
pub fn is_nonneg(r: &Rat) -> bool {
    !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "5", "-3", "3/4", "-3/7", "10/4"] {
            let r = parse_rat(s).unwrap();
            let t = parse_rat(&format_rat(&r)).unwrap();
            assert_eq!(r, t);
        }
        assert_eq!(format_rat(&parse_rat("10/4").unwrap()), "5/2");
        assert_eq!(format_rat(&parse_rat("-4/2").unwrap()), "-2");
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert_eq!(parse_rat(""), Err(ParseRatError::Empty));
        assert_eq!(parse_rat("1/0"), Err(ParseRatError::ZeroDenominator));
        assert!(matches!(parse_rat("a/2"), Err(ParseRatError::BadInt(_))));
    }

    #[test]
    fn rising_factorial_values() {
        // (1)_3 = 1*2*3 = 6, (1/2)_2 = 1/2 * 3/2 = 3/4
        assert_eq!(rising(&int(1), 3), int(6));
        assert_eq!(rising(&frac(1, 2), 2), frac(3, 4));
        assert_eq!(rising(&int(7), 0), int(1));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(6, 0), BigInt::from(1));
        assert_eq!(binomial(6, 6), BigInt::from(1));
    }

    #[test]
    fn pow_values() {
        assert_eq!(pow_rat(&frac(1, 2), 3), frac(1, 8));
        assert_eq!(pow_rat(&int(-2), 2), int(4));
        assert_eq!(pow_rat(&int(9), 0), int(1));
    }
}
