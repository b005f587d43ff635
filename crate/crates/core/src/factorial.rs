//! The factorial (normalized Pochhammer) basis and exact conversions.
//!
//! With `(t)_k = t(t+1)...(t+k-1)` the basis elements are
//! `m_k(t) = (t)_k / k!` and `m_{k,l}(x) = m_k(x1) m_l(x2)`. This basis
//! diagonalizes the difference calculus: `∇ m_k = m_{k-1}` and
//! `Δ m_k = m_0 + ... + m_{k-1}`, which is what makes the triangular
//! eigenfunction solve work.
//!
//! Conversion into the basis uses the recurrence
//! `t * m_k = (k+1) m_{k+1} - k m_k` one variable power at a time, rather
//! than tabulated Stirling numbers, so the same identity drives both the
//! conversion and its tests.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::poly::{Axis, Poly};
use crate::scalar::{factorial, int, Rat};

/// A polynomial expressed in the basis `m_{k,l}`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FactorialExpansion {
    coeffs: BTreeMap<(u32, u32), Rat>,
}

/// `m_k` in the single variable named by `axis`.
pub fn m_univariate(k: u32, axis: Axis) -> Poly {
    let mut p = Poly::one();
    let var = Poly::var(axis);
    for r in 0..k {
        p = &p * &(&var + &Poly::constant(int(i64::from(r))));
    }
    p.scale(&Rat::new(1.into(), factorial(k)))
}

/// `m_{k,l}(x) = m_k(x1) m_l(x2)`.
pub fn m_kl(k: u32, l: u32) -> Poly {
    &m_univariate(k, Axis::X1) * &m_univariate(l, Axis::X2)
}

/// Coefficients of `t^i` over `m_0, ..., m_i`, via `t*m_k = (k+1)m_{k+1} - k m_k`.
fn power_in_m(i: u32) -> Vec<Rat> {
    let mut coeffs = vec![Rat::one()];
    for _ in 0..i {
        let mut next = vec![Rat::zero(); coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            next[k + 1] += c * int((k + 1) as i64);
            next[k] -= c * int(k as i64);
        }
        coeffs = next;
    }
    coeffs
}

impl FactorialExpansion {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The expansion with a single unit coefficient at `(k, l)`.
    pub fn unit(k: u32, l: u32) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert((k, l), Rat::one());
        FactorialExpansion { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: u32, l: u32) -> Rat {
        self.coeffs.get(&(k, l)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = ((u32, u32), &Rat)> {
        self.coeffs.iter().map(|(&k, c)| (k, c))
    }

    pub fn add_coeff(&mut self, k: u32, l: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry((k, l)).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&(k, l));
        }
    }

    /// Exact conversion from the monomial basis.
    pub fn from_poly(p: &Poly) -> Self {
        let mut out = FactorialExpansion::zero();
        for ((i, j), c) in p.terms() {
            let u = power_in_m(i);
            let v = power_in_m(j);
            for (k, uk) in u.iter().enumerate() {
                if uk.is_zero() {
                    continue;
                }
                for (l, vl) in v.iter().enumerate() {
                    out.add_coeff(k as u32, l as u32, c * uk * vl);
                }
            }
        }
        out
    }

    /// Exact conversion back to the monomial basis.
    pub fn to_poly(&self) -> Poly {
        let mut out = Poly::zero();
        for (&(k, l), c) in &self.coeffs {
            out = &out + &m_kl(k, l).scale(c);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::frac;

    #[test]
    fn m2_is_x_x_plus_one_over_two() {
        // m_2(t) = t(t+1)/2, and its expansion is the unit vector at (2,0).
        let m2 = m_univariate(2, Axis::X1);
        let expected = Poly::from_terms([(2, 0, frac(1, 2)), (1, 0, frac(1, 2))]);
        assert_eq!(m2, expected);
        assert_eq!(FactorialExpansion::from_poly(&m2), FactorialExpansion::unit(2, 0));
    }

    #[test]
    fn constant_expands_to_m00() {
        assert_eq!(
            FactorialExpansion::from_poly(&Poly::one()),
            FactorialExpansion::unit(0, 0)
        );
    }

    #[test]
    fn x_squared_expansion() {
        // t*m_1 = 2 m_2 - m_1, so x1^2 expands as {(2,0): 2, (1,0): -1}.
        let e = FactorialExpansion::from_poly(&(&Poly::x1() * &Poly::x1()));
        assert_eq!(e.coeff(2, 0), int(2));
        assert_eq!(e.coeff(1, 0), int(-1));
        assert_eq!(e.coeffs().count(), 2);
    }

    #[test]
    fn nabla_m_k_is_m_k_minus_one() {
        for k in 1..=10u32 {
            let got = m_univariate(k, Axis::X1).backward_diff(Axis::X1);
            assert_eq!(got, m_univariate(k - 1, Axis::X1), "k = {k}");
        }
    }

    #[test]
    fn delta_m_k_is_sum_of_lower() {
        for k in 1..=10u32 {
            let got = m_univariate(k, Axis::X1).forward_diff(Axis::X1);
            let mut sum = Poly::zero();
            for j in 0..k {
                sum = &sum + &m_univariate(j, Axis::X1);
            }
            assert_eq!(got, sum, "k = {k}");
        }
    }

    #[test]
    fn round_trip_mixed_polynomial() {
        let p = Poly::from_terms([
            (3, 2, frac(7, 5)),
            (1, 4, int(-3)),
            (0, 0, frac(1, 9)),
            (2, 0, int(11)),
        ]);
        let back = FactorialExpansion::from_poly(&p).to_poly();
        assert_eq!(back, p);
    }
}
