//! Exact bivariate polynomial arithmetic with integer shifts and partial
//! difference operators.
//!
//! A polynomial is a finitely supported map from exponent pairs `(i, j)`
//! (the monomial `x1^i x2^j`) to rational coefficients. Stored coefficients
//! are never zero, so the zero polynomial is the empty map; its total degree
//! is reported as `None` so that degree-drop claims stay assertable.
//!
//! The forward and backward partial differences are
//! `Δ_i u(x) = u(x + e_i) - u(x)` and `∇_i u(x) = u(x) - u(x - e_i)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::{binomial, format_rat, int, parse_rat, pow_rat, Rat};

/// Coordinate axis for shifts and partial differences.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

impl Axis {
    /// The unit step `e_1 = (1,0)` or `e_2 = (0,1)`.
    pub fn step(self) -> (i64, i64) {
        match self {
            Axis::X1 => (1, 0),
            Axis::X2 => (0, 1),
        }
    }

    pub const BOTH: [Axis; 2] = [Axis::X1, Axis::X2];
}

/// Sparse bivariate polynomial over the rationals.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<(u32, u32), Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((0, 0), c);
        }
        Poly { terms }
    }

    /// The coordinate polynomial `x1` or `x2`.
    pub fn var(axis: Axis) -> Self {
        match axis {
            Axis::X1 => Poly::monomial(1, 0, Rat::one()),
            Axis::X2 => Poly::monomial(0, 1, Rat::one()),
        }
    }

    pub fn x1() -> Self {
        Poly::var(Axis::X1)
    }

    pub fn x2() -> Self {
        Poly::var(Axis::X2)
    }

    /// `c * x1^i * x2^j`.
    pub fn monomial(i: u32, j: u32, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        Poly { terms }
    }

    /// `c1*x1 + c2*x2 + c0`.
    pub fn affine(c1: Rat, c2: Rat, c0: Rat) -> Self {
        let mut p = Poly::zero();
        p.add_term(1, 0, c1);
        p.add_term(0, 1, c2);
        p.add_term(0, 0, c0);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, u32, Rat)>>(iter: I) -> Self {
        let mut p = Poly::zero();
        for (i, j, c) in iter {
            p.add_term(i, j, c);
        }
        p
    }

    /// Add `c * x1^i x2^j`, dropping the entry if the total cancels.
    pub fn add_term(&mut self, i: u32, j: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((i, j)).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `x1^i x2^j` (zero when the monomial is absent).
    pub fn coeff(&self, i: u32, j: u32) -> Rat {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rat::zero)
    }

    /// Iterate stored terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &Rat)> {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    /// Degree in one variable; `None` for the zero polynomial.
    pub fn degree_in(&self, axis: Axis) -> Option<u32> {
        self.terms
            .keys()
            .map(|&(i, j)| match axis {
                Axis::X1 => i,
                Axis::X2 => j,
            })
            .max()
    }

    /// The homogeneous part of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(&(i, j), _)| i + j == d)
                .map(|(&k, c)| (k, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(&k, v)| (k, v * c)).collect(),
        }
    }

    /// `p(x + h)` for an integer shift `h`, as an exact polynomial identity.
    pub fn shift(&self, h: (i64, i64)) -> Poly {
        if h == (0, 0) {
            return self.clone();
        }
        let mut out = Poly::zero();
        for (&(i, j), c) in &self.terms {
            // (x1 + h1)^i (x2 + h2)^j expanded by the binomial theorem.
            for a in 0..=i {
                let ha = BigInt::from(h.0).pow(i - a) * binomial(u64::from(i), u64::from(a));
                if ha.is_zero() {
                    continue;
                }
                for b in 0..=j {
                    let hb = BigInt::from(h.1).pow(j - b) * binomial(u64::from(j), u64::from(b));
                    if hb.is_zero() {
                        continue;
                    }
                    out.add_term(a, b, c * Rat::from_integer(&ha * &hb));
                }
            }
        }
        out
    }

    /// Forward difference `Δ_i p = p(x + e_i) - p(x)`.
    pub fn forward_diff(&self, axis: Axis) -> Poly {
        &self.shift(axis.step()) - self
    }

    /// Backward difference `∇_i p = p(x) - p(x - e_i)`.
    pub fn backward_diff(&self, axis: Axis) -> Poly {
        let (h1, h2) = axis.step();
        self - &self.shift((-h1, -h2))
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, x1: &Rat, x2: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for (&(i, j), c) in &self.terms {
            acc += c * pow_rat(x1, i) * pow_rat(x2, j);
        }
        acc
    }

    /// Exact evaluation at a lattice point.
    pub fn eval_point(&self, p: (i64, i64)) -> Rat {
        self.eval(&int(p.0), &int(p.1))
    }

    /// True when every term carries a positive exponent on `axis`,
    /// i.e. the coordinate polynomial of that axis divides `self`.
    /// The zero polynomial is divisible by everything.
    pub fn divisible_by_var(&self, axis: Axis) -> bool {
        self.terms.keys().all(|&(i, j)| match axis {
            Axis::X1 => i > 0,
            Axis::X2 => j > 0,
        })
    }

    /// Reinterpret a polynomial in `x1` alone as the same polynomial in `x2`.
    /// Panics if `self` depends on `x2`.
    pub fn swap_into_x2(&self) -> Poly {
        assert!(
            self.degree_in(Axis::X2).unwrap_or(0) == 0,
            "swap_into_x2 requires a polynomial in x1 only"
        );
        Poly {
            terms: self.terms.iter().map(|(&(i, _), c)| ((0, i), c.clone())).collect(),
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &rhs.terms {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(&k, c)| (k, -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        // Highest total degree first, then lexicographic.
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by_key(|&(i, j)| (std::cmp::Reverse(i + j), std::cmp::Reverse(i)));
        for (i, j) in keys {
            let c = &self.terms[&(i, j)];
            let s = format_rat(c);
            let (sign, mag) = match s.strip_prefix('-') {
                Some(rest) => ("-", rest.to_owned()),
                None => ("+", s),
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            let mut parts = Vec::new();
            if mag != "1" || (i == 0 && j == 0) {
                parts.push(mag);
            }
            if i > 0 {
                parts.push(if i == 1 { "x1".into() } else { format!("x1^{i}") });
            }
            if j > 0 {
                parts.push(if j == 1 { "x2".into() } else { format!("x2^{j}") });
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct TermDto {
    i: u32,
    j: u32,
    num: String,
    den: String,
}

#[derive(Serialize, Deserialize)]
struct PolyDto {
    terms: Vec<TermDto>,
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let dto = PolyDto {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), c)| TermDto {
                    i,
                    j,
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        };
        dto.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dto = PolyDto::deserialize(deserializer)?;
        let mut p = Poly::zero();
        for t in dto.terms {
            let c = parse_rat(&format!("{}/{}", t.num, t.den))
                .map_err(|e| D::Error::custom(format!("term ({},{}): {e}", t.i, t.j)))?;
            p.add_term(t.i, t.j, c);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::frac;

    fn x1() -> Poly {
        Poly::x1()
    }

    fn x2() -> Poly {
        Poly::x2()
    }

    #[test]
    fn shift_expands_binomially() {
        // (x1 + 1)^2 = x1^2 + 2 x1 + 1
        let p = &x1() * &x1();
        let shifted = p.shift((1, 0));
        let expected = Poly::from_terms([(2, 0, int(1)), (1, 0, int(2)), (0, 0, int(1))]);
        assert_eq!(shifted, expected);
    }

    #[test]
    fn shift_identity_and_linear() {
        let p = &x1() * &x2();
        assert_eq!(p.shift((0, 0)), p);
        assert_eq!(
            x2().shift((0, -1)),
            Poly::from_terms([(0, 1, int(1)), (0, 0, int(-1))])
        );
    }

    #[test]
    fn forward_diff_examples() {
        // Δ1(x1^2) = 2 x1 + 1
        let sq = &x1() * &x1();
        assert_eq!(
            sq.forward_diff(Axis::X1),
            Poly::affine(int(2), int(0), int(1))
        );
        // Δ2(x1) = 0
        assert!(x1().forward_diff(Axis::X2).is_zero());
        // Δ1(x1 x2) = x2
        assert_eq!((&x1() * &x2()).forward_diff(Axis::X1), x2());
    }

    #[test]
    fn backward_diff_examples() {
        // ∇1(x1^2) = 2 x1 - 1
        let sq = &x1() * &x1();
        assert_eq!(
            sq.backward_diff(Axis::X1),
            Poly::affine(int(2), int(0), int(-1))
        );
        // ∇2(x2) = 1
        assert_eq!(x2().backward_diff(Axis::X2), Poly::one());
        // Δ1 ∇1 (x1^2) = 2
        assert_eq!(
            sq.backward_diff(Axis::X1).forward_diff(Axis::X1),
            Poly::constant(int(2))
        );
    }

    #[test]
    fn degree_drops_under_difference() {
        let p = Poly::from_terms([(3, 2, frac(5, 3)), (1, 1, int(-2))]);
        assert_eq!(p.degree(), Some(5));
        assert_eq!(p.forward_diff(Axis::X1).degree(), Some(4));
        assert_eq!(Poly::zero().degree(), None);
    }

    #[test]
    fn eval_matches_expansion() {
        let p = Poly::from_terms([(2, 1, int(3)), (0, 0, frac(-1, 2))]);
        // 3 * 4 * 5 - 1/2
        assert_eq!(p.eval(&int(2), &int(5)), frac(119, 2));
        assert_eq!(p.eval_point((0, 0)), frac(-1, 2));
    }

    #[test]
    fn divisibility_by_coordinates() {
        let p = Poly::from_terms([(2, 0, int(1)), (1, 3, int(4))]);
        assert!(p.divisible_by_var(Axis::X1));
        assert!(!p.divisible_by_var(Axis::X2));
        assert!(Poly::zero().divisible_by_var(Axis::X1));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let p = Poly::from_terms([(2, 1, frac(-7, 3)), (0, 0, int(11))]);
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains("\"num\":\"-7\""));
        let back: Poly = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn display_is_readable() {
        let p = Poly::from_terms([(2, 0, int(1)), (0, 1, frac(-1, 2)), (0, 0, int(3))]);
        assert_eq!(p.to_string(), "x1^2 - 1/2*x2 + 3");
        assert_eq!(Poly::zero().to_string(), "0");
    }
}
