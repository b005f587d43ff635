//! Exact inner products, Gram matrices and orthogonality verification.
//!
//! The linear functional is `L(f) = Σ_{x in V} f(x) W(x)` and the bilinear
//! form is `<f, g> = L(f g)`. On finite supports everything is an exact
//! rational; on infinite product supports the sum separates per axis and is
//! returned as an exact partial sum bracketed by a certified tail bound.
//! Summation over lattice points is data-parallel (exact rational addition
//! commutes, so the result is independent of scheduling).

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::admissible::{classify_admissible, eigen_level, Rejection, SolveError};
use crate::lattice::LatticeError;
use crate::operator::DifferenceOperator;
use crate::par;
use crate::pearson::{check_consistency, ConsistencyVerdict};
use crate::poly::Poly;
use crate::scalar::{format_rat, Rat};
use crate::weight::{WeightError, WeightFunction};

/// An exact value or a certified bracket `[lo, hi]` around the true sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumBound {
    pub lo: Rat,
    pub hi: Rat,
}

impl SumBound {
    pub fn exact(v: Rat) -> Self {
        SumBound { lo: v.clone(), hi: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// The exact value, when there is one.
    pub fn value(&self) -> Option<&Rat> {
        if self.is_exact() {
            Some(&self.lo)
        } else {
            None
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// A bound on the magnitude of the true value.
    pub fn abs_bound(&self) -> Rat {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    /// True when the value is certainly within `tol` of zero.
    pub fn within(&self, tol: &Rat) -> bool {
        &self.abs_bound() <= tol
    }

    fn add(&self, other: &SumBound) -> SumBound {
        SumBound {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    /// Multiply a nonnegative-valued bracket by an exact coefficient.
    fn scale(&self, c: &Rat) -> SumBound {
        if c.is_negative() {
            SumBound {
                lo: &self.hi * c,
                hi: &self.lo * c,
            }
        } else {
            SumBound {
                lo: &self.lo * c,
                hi: &self.hi * c,
            }
        }
    }

    pub fn display(&self) -> String {
        if self.is_exact() {
            format_rat(&self.lo)
        } else {
            format!("[{}, {}]", format_rat(&self.lo), format_rat(&self.hi))
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("no certified tail bound is available for this weight on an infinite support")]
    TailUnsupported,
    #[error("operator is not admissible: {0}")]
    NotAdmissible(Rejection),
    #[error("eigenfunction construction failed: {0}")]
    Solve(#[from] SolveError),
}

/// `L(f) = Σ_{x in V} f(x) W(x)`, exact on finite supports, bracketed by a
/// certified tail bound on infinite product supports (`cap` bounds the
/// truncation per axis).
pub fn functional(f: &Poly, w: &WeightFunction, cap: u32) -> Result<SumBound, VerifyError> {
    let v = w.domain();
    if let Ok(points) = v.points() {
        // Evaluate all weights first so errors surface deterministically,
        // then reduce in parallel.
        let mut terms = Vec::with_capacity(points.len());
        for p in points {
            terms.push((p, w.eval(p)?));
        }
        let total = par::sum_rat(&terms, |(p, wv)| f.eval_point(*p) * wv);
        return Ok(SumBound::exact(total));
    }

    // Infinite support: separable product weights only. Each axis needs one
    // moment sum per distinct power, so those are computed once and reused
    // across the monomials of `f`.
    let closed = w.closed_form().ok_or(VerifyError::TailUnsupported)?;
    let (f1, f2) = closed.product_factors().ok_or(VerifyError::TailUnsupported)?;
    let mut cache1: std::collections::BTreeMap<u32, (Rat, Rat)> = Default::default();
    let mut cache2: std::collections::BTreeMap<u32, (Rat, Rat)> = Default::default();
    let mut total = SumBound::exact(Rat::zero());
    for ((i, j), c) in f.terms() {
        if !cache1.contains_key(&i) {
            cache1.insert(i, f1.moment_sum(i, cap)?);
        }
        if !cache2.contains_key(&j) {
            cache2.insert(j, f2.moment_sum(j, cap)?);
        }
        let (p1, t1) = &cache1[&i];
        let (p2, t2) = &cache2[&j];
        // Monomial sums are nonnegative, so the bracket multiplies directly.
        let bracket = SumBound {
            lo: p1 * p2,
            hi: (p1 + t1) * (p2 + t2),
        };
        total = total.add(&bracket.scale(c));
    }
    Ok(total)
}

/// `<f, g> = L(f g)`.
pub fn inner_product(
    f: &Poly,
    g: &Poly,
    w: &WeightFunction,
    cap: u32,
) -> Result<SumBound, VerifyError> {
    functional(&(f * g), w, cap)
}

/// Gram matrix of a list of polynomials under `w`. Entries are independent
/// and computed in parallel; the matrix is symmetric by construction.
pub fn gram_matrix(
    basis: &[Poly],
    w: &WeightFunction,
    cap: u32,
) -> Result<Vec<Vec<SumBound>>, VerifyError> {
    let n = basis.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .collect();
    let entries = par::map_vec(&pairs, |&(i, j)| inner_product(&basis[i], &basis[j], w, cap));
    let mut matrix = vec![vec![SumBound::exact(Rat::zero()); n]; n];
    for (&(i, j), entry) in pairs.iter().zip(entries) {
        let e = entry?;
        matrix[i][j] = e.clone();
        matrix[j][i] = e;
    }
    Ok(matrix)
}

/// Exact eigen-equation check: `D u = λ u` as a polynomial identity.
pub fn verify_eigen(op: &DifferenceOperator, u: &Poly, lambda: &Rat) -> bool {
    op.apply(u) == u.scale(lambda)
}

/// Render a Gram matrix as CSV of rational strings; bracketed entries
/// `lo..hi` mark certified intervals from truncated sums.
pub fn gram_to_csv(matrix: &[Vec<SumBound>]) -> String {
    let mut out = String::new();
    for row in matrix {
        let cells: Vec<String> = row
            .iter()
            .map(|e| {
                if e.is_exact() {
                    format_rat(&e.lo)
                } else {
                    format!("{}..{}", format_rat(&e.lo), format_rat(&e.hi))
                }
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// A labelled eigenfunction pair that failed orthogonality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthoWitness {
    pub left: (u32, u32),
    pub right: (u32, u32),
    pub value: String,
}

/// Outcome of the cross-degree orthogonality verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthogonalityOutcome {
    pub consistency: ConsistencyVerdict,
    /// True when every cross-degree pair is orthogonal (exactly on finite
    /// supports, within `tol` on truncated infinite ones).
    pub orthogonal: bool,
    pub witness: Option<OrthoWitness>,
    /// Largest certified magnitude bound over the cross-degree entries.
    pub max_cross: Rat,
    pub pairs_checked: usize,
}

impl OrthogonalityOutcome {
    pub fn holds(&self) -> bool {
        self.consistency.holds() && self.orthogonal
    }
}

/// Verify that eigenfunctions of different degrees are orthogonal under
/// `w`: consistency of the weight is checked first (and reported), then
/// every cross-degree pair `(u, v)` of the triangular-solve eigenfunctions
/// with degrees up to `max_degree` must satisfy `L(u v) = 0`; exact zero on
/// finite supports, certified within `tol` on truncated infinite ones.
pub fn verify_theorem_3_6(
    op: &DifferenceOperator,
    w: &WeightFunction,
    max_degree: u32,
    cap: u32,
    tol: &Rat,
) -> Result<OrthogonalityOutcome, VerifyError> {
    let params = classify_admissible(op, max_degree).map_err(VerifyError::NotAdmissible)?;
    let consistency = check_consistency(op, w, max_degree, cap);

    let mut levels = Vec::new();
    for n in 0..=max_degree {
        levels.push(eigen_level(op, &params, n)?);
    }

    let mut outcome = OrthogonalityOutcome {
        consistency,
        orthogonal: true,
        witness: None,
        max_cross: Rat::zero(),
        pairs_checked: 0,
    };
    'outer: for j in 0..levels.len() {
        for k in (j + 1)..levels.len() {
            for (lu, u) in &levels[j] {
                for (lv, v) in &levels[k] {
                    let entry = inner_product(u, v, w, cap)?;
                    outcome.pairs_checked += 1;
                    let ok = if entry.is_exact() {
                        entry.lo.is_zero()
                    } else {
                        entry.within(tol)
                    };
                    let bound = entry.abs_bound();
                    if bound > outcome.max_cross {
                        outcome.max_cross = bound.clone();
                    }
                    if !ok {
                        outcome.orthogonal = false;
                        outcome.witness = Some(OrthoWitness {
                            left: *lu,
                            right: *lv,
                            value: entry.display(),
                        });
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeSet;
    use crate::scalar::{frac, int};
    use crate::weight::ClosedFormWeight;

    fn ones_weight(v: LatticeSet) -> WeightFunction {
        let table = v.points().unwrap().into_iter().map(|p| (p, Rat::from_integer(1.into()))).collect();
        WeightFunction::from_table(v, table)
    }

    #[test]
    fn counting_measure_total_mass() {
        let w = ones_weight(LatticeSet::type_b_finite(2));
        let total = functional(&Poly::one(), &w, 0).unwrap();
        assert_eq!(total.value().unwrap(), &int(6));
    }

    #[test]
    fn multinomial_weight_has_unit_mass() {
        let w = WeightFunction::from_closed_form(
            LatticeSet::type_b_finite(2),
            ClosedFormWeight::KrawtchoukTriangle {
                p1: frac(1, 4),
                p2: frac(1, 4),
                n: 2,
            },
        );
        let total = functional(&Poly::one(), &w, 0).unwrap();
        assert_eq!(total.value().unwrap(), &int(1));
    }

    #[test]
    fn infinite_support_without_closed_form_is_unsupported() {
        let table = std::collections::BTreeMap::new();
        let w = WeightFunction::from_table(
            LatticeSet::type_b(crate::lattice::Extent::Infinite),
            table,
        );
        assert!(matches!(
            functional(&Poly::one(), &w, 10),
            Err(VerifyError::TailUnsupported)
        ));
    }

    #[test]
    fn poisson_product_mass_brackets_e_squared() {
        use crate::weight::Factor1D;
        let w = WeightFunction::from_closed_form(
            LatticeSet::type_a(crate::lattice::Extent::Infinite, crate::lattice::Extent::Infinite),
            ClosedFormWeight::Product {
                f1: Factor1D::Charlier { a: int(1) },
                f2: Factor1D::Charlier { a: int(1) },
            },
        );
        let total = functional(&Poly::one(), &w, 60).unwrap();
        assert!(!total.is_exact());
        // e^2 ≈ 7.389056...
        let lo = frac(7_389_056, 1_000_000);
        let hi = frac(7_389_057, 1_000_000);
        assert!(total.lo < hi);
        assert!(total.hi > lo);
        assert!((&total.hi - &total.lo) < frac(1, 1_000_000_000_000i64));
    }

    #[test]
    fn gram_matrix_is_symmetric() {
        let w = ones_weight(LatticeSet::type_b_finite(3));
        let basis = vec![Poly::one(), Poly::x1(), Poly::x2()];
        let g = gram_matrix(&basis, &w, 0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(g[i][j], g[j][i]);
            }
        }
        assert_eq!(g[0][0].value().unwrap(), &int(10));
    }

    #[test]
    fn eigen_check_detects_perturbation() {
        let op = DifferenceOperator {
            a11: Poly::x1(),
            a12: Poly::zero(),
            a21: Poly::zero(),
            a22: Poly::x2(),
            b1: Poly::affine(int(-1), int(0), int(1)),
            b2: Poly::affine(int(0), int(-1), int(1)),
        };
        let u = Poly::affine(int(1), int(0), int(-1));
        assert!(verify_eigen(&op, &u, &int(-1)));
        assert!(!verify_eigen(&op, &u, &int(0)));
        assert!(verify_eigen(&op, &Poly::one(), &int(0)));
    }
}
