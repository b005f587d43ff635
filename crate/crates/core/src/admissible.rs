//! Admissibility classification and eigenfunction construction.
//!
//! An operator in standard form admits, for every degree `k`, a full set of
//! polynomial eigenfunctions exactly when its coefficients fit the template
//!
//! ```text
//! A_ij = a x_i x_j + a_ij x1 + b_ij x2 + c_ij      B_i = b x_i + d_i
//! ```
//!
//! with `c11 + c12 + c21 + c22 = 0` and `a p + b != 0` on the degree range,
//! in which case the eigenvalue at degree `k` is `λ_k = k((k-1)a + b)`.
//!
//! Eigenfunctions are built in the factorial basis: writing
//! `P = m_{r,s} + Σ f_{k,l} m_{k,l}` and expanding `D P - λ P` in the same
//! basis yields a linear system that is triangular by total degree, with
//! diagonal entries `λ_{k+l} - λ_{r+s}`; the solve walks levels downward.

use num_traits::Zero;
use thiserror::Error;

use crate::factorial::{m_kl, FactorialExpansion};
use crate::operator::DifferenceOperator;
use crate::poly::Poly;
use crate::scalar::{format_rat, int, Rat};

/// Coefficients of one `A_ij` below its quadratic part:
/// `a_ij x1 + b_ij x2 + c_ij`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCoeffs {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
}

/// Extracted template data of an admissible operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleParams {
    /// Common quadratic coefficient `a`.
    pub a: Rat,
    /// Common first-order slope `b`.
    pub b: Rat,
    /// Linear parts of `A11, A12, A21, A22` in that order.
    pub pairs: [PairCoeffs; 4],
    pub d1: Rat,
    pub d2: Rat,
    /// Degree range on which the eigenvalue non-degeneracy was certified.
    pub nmax: u32,
}

impl AdmissibleParams {
    /// `λ_k = k((k-1) a + b)`.
    pub fn eigenvalue(&self, k: u32) -> Rat {
        eigenvalue(&self.a, &self.b, k)
    }

    /// All eigenvalues `λ_0 ..= λ_nmax`.
    pub fn eigenvalues(&self) -> Vec<Rat> {
        (0..=self.nmax).map(|k| self.eigenvalue(k)).collect()
    }
}

/// `λ_k = k(k a - a + b)` for template data `(a, b)`.
pub fn eigenvalue(a: &Rat, b: &Rat, k: u32) -> Rat {
    let k = int(i64::from(k));
    &k * (&k * a - a + b)
}

/// Why an operator fails the admissibility classification. The checks run
/// in the fixed order wrong-degree, quadratic-parts-differ,
/// template-mismatch, c-sum-nonzero, eigenvalue-degeneracy, and the first
/// failure is reported.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum Rejection {
    #[error("wrong-degree: {coefficient} has degree above {limit}")]
    WrongDegree {
        coefficient: &'static str,
        limit: u32,
    },
    #[error("quadratic-parts-differ: A12 and A21 have different quadratic parts")]
    QuadraticPartsDiffer,
    #[error("template-mismatch: {detail}")]
    TemplateMismatch { detail: String },
    #[error("c-sum-nonzero: c11 + c12 + c21 + c22 = {sum}")]
    CSumNonzero { sum: String },
    #[error("eigenvalue-degeneracy: {detail}")]
    EigenvalueDegeneracy { detail: String },
}

impl Rejection {
    /// Stable machine-readable code for reports.
    pub fn code(&self) -> &'static str {
        match self {
            Rejection::WrongDegree { .. } => "wrong-degree",
            Rejection::QuadraticPartsDiffer => "quadratic-parts-differ",
            Rejection::TemplateMismatch { .. } => "template-mismatch",
            Rejection::CSumNonzero { .. } => "c-sum-nonzero",
            Rejection::EigenvalueDegeneracy { .. } => "eigenvalue-degeneracy",
        }
    }
}

fn quadratic_part(p: &Poly) -> (Rat, Rat, Rat) {
    (p.coeff(2, 0), p.coeff(1, 1), p.coeff(0, 2))
}

/// Classify an operator against the admissible template on degrees
/// `0 ..= nmax`.
pub fn classify_admissible(
    op: &DifferenceOperator,
    nmax: u32,
) -> Result<AdmissibleParams, Rejection> {
    let names = ["A11", "A12", "A21", "A22"];
    let second_order = [&op.a11, &op.a12, &op.a21, &op.a22];
    for (name, p) in names.iter().zip(second_order) {
        if p.degree().unwrap_or(0) > 2 {
            return Err(Rejection::WrongDegree {
                coefficient: name,
                limit: 2,
            });
        }
    }
    for (name, p) in ["B1", "B2"].iter().zip([&op.b1, &op.b2]) {
        if p.degree().unwrap_or(0) > 1 {
            return Err(Rejection::WrongDegree {
                coefficient: name,
                limit: 1,
            });
        }
    }

    if quadratic_part(&op.a12) != quadratic_part(&op.a21) {
        return Err(Rejection::QuadraticPartsDiffer);
    }

    // Quadratic parts must be a*x1^2, a*x1*x2, a*x1*x2, a*x2^2 for one a.
    let mismatch = |detail: String| Rejection::TemplateMismatch { detail };
    let (q20, q11, q02) = quadratic_part(&op.a11);
    if !q11.is_zero() || !q02.is_zero() {
        return Err(mismatch("A11 quadratic part must be a multiple of x1^2".into()));
    }
    let a = q20;
    for (name, p, expect) in [
        ("A12", &op.a12, (false, true, false)),
        ("A21", &op.a21, (false, true, false)),
        ("A22", &op.a22, (false, false, true)),
    ] {
        let (q20, q11, q02) = quadratic_part(p);
        let (on20, on11, on02) = expect;
        for (coeff, on, mono) in [(&q20, on20, "x1^2"), (&q11, on11, "x1*x2"), (&q02, on02, "x2^2")]
        {
            let want = if on { &a } else { &Rat::from_integer(0.into()) };
            if coeff != want {
                return Err(mismatch(format!(
                    "{name} coefficient of {mono} must be {}",
                    format_rat(want)
                )));
            }
        }
    }

    // B_i = b x_i + d_i with one common b.
    if !op.b1.coeff(0, 1).is_zero() {
        return Err(mismatch("B1 must not depend on x2".into()));
    }
    if !op.b2.coeff(1, 0).is_zero() {
        return Err(mismatch("B2 must not depend on x1".into()));
    }
    let b = op.b1.coeff(1, 0);
    if op.b2.coeff(0, 1) != b {
        return Err(mismatch("B1 and B2 must share the slope b".into()));
    }
    let d1 = op.b1.coeff(0, 0);
    let d2 = op.b2.coeff(0, 0);

    let pairs: Vec<PairCoeffs> = second_order
        .iter()
        .map(|p| PairCoeffs {
            a: p.coeff(1, 0),
            b: p.coeff(0, 1),
            c: p.coeff(0, 0),
        })
        .collect();
    let c_sum = pairs.iter().fold(Rat::from_integer(0.into()), |s, p| s + &p.c);
    if !c_sum.is_zero() {
        return Err(Rejection::CSumNonzero {
            sum: format_rat(&c_sum),
        });
    }

    for p in 0..=nmax {
        let val = &a * int(i64::from(p)) + &b;
        if val.is_zero() {
            return Err(Rejection::EigenvalueDegeneracy {
                detail: format!("a*p + b vanishes at p = {p}"),
            });
        }
    }
    // Distinct eigenvalues across the range guarantee every diagonal entry
    // of the triangular solve is nonzero.
    let lambdas: Vec<Rat> = (0..=nmax).map(|k| eigenvalue(&a, &b, k)).collect();
    for j in 0..lambdas.len() {
        for k in (j + 1)..lambdas.len() {
            if lambdas[j] == lambdas[k] {
                return Err(Rejection::EigenvalueDegeneracy {
                    detail: format!("λ_{j} = λ_{k} = {}", format_rat(&lambdas[j])),
                });
            }
        }
    }

    Ok(AdmissibleParams {
        a,
        b,
        pairs: [
            pairs[0].clone(),
            pairs[1].clone(),
            pairs[2].clone(),
            pairs[3].clone(),
        ],
        d1,
        d2,
        nmax,
    })
}

/// Failure of the eigenfunction construction.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("degree {requested} exceeds the certified bound {nmax}")]
    DegreeAboveBound { requested: u32, nmax: u32 },
    #[error("internal inconsistency: singular diagonal at index ({0}, {1})")]
    SingularDiagonal(u32, u32),
    #[error("internal inconsistency: constructed polynomial is not an eigenfunction")]
    NotAnEigenfunction,
}

/// Triangular solve for the eigenfunction with leading factorial term
/// `m_leading`, given the operator's action column by column in the
/// factorial basis. Indices couple strictly downward in total degree, so
/// levels are processed from the top; the final eigen-identity is verified
/// exactly before returning.
pub(crate) fn eigen_solve(
    op: &DifferenceOperator,
    leading: (u32, u32),
    lambda: &Rat,
) -> Result<Poly, SolveError> {
    let n = leading.0 + leading.1;
    let indices: Vec<(u32, u32)> = (0..=n)
        .flat_map(|level| (0..=level).map(move |l| (level - l, l)))
        .collect();
    let columns: Vec<FactorialExpansion> = indices
        .iter()
        .map(|&(k, l)| FactorialExpansion::from_poly(&op.apply(&m_kl(k, l))))
        .collect();
    let column = |k: u32, l: u32| {
        let pos = indices
            .iter()
            .position(|&idx| idx == (k, l))
            .expect("index in range");
        &columns[pos]
    };

    let mut coeffs = FactorialExpansion::unit(leading.0, leading.1);
    for level in (0..n).rev() {
        for k in (0..=level).rev() {
            let l = level - k;
            // Contributions from already-determined coefficients of higher
            // total degree.
            let mut rhs = Rat::from_integer(0.into());
            for (idx, f) in coeffs.coeffs() {
                rhs += &(column(idx.0, idx.1).coeff(k, l)) * f;
            }
            let diag = column(k, l).coeff(k, l);
            let denom = lambda - &diag;
            if denom.is_zero() {
                if rhs.is_zero() {
                    continue;
                }
                return Err(SolveError::SingularDiagonal(k, l));
            }
            coeffs.add_coeff(k, l, rhs / denom);
        }
    }

    let p = coeffs.to_poly();
    if op.apply(&p) != p.scale(lambda) {
        return Err(SolveError::NotAnEigenfunction);
    }
    Ok(p)
}

/// Build the eigenfunction `P_{r,s}` of an admissible operator: leading
/// factorial coefficient 1 at `(r, s)`, eigenvalue `λ_{r+s}`, remaining
/// coefficients from the triangular solve.
pub fn build_eigenpolynomial(
    op: &DifferenceOperator,
    params: &AdmissibleParams,
    r: u32,
    s: u32,
) -> Result<Poly, SolveError> {
    if r + s > params.nmax {
        return Err(SolveError::DegreeAboveBound {
            requested: r + s,
            nmax: params.nmax,
        });
    }
    eigen_solve(op, (r, s), &params.eigenvalue(r + s))
}

/// Convenience wrapper: every `P_{r,s}` with `r + s = degree`.
pub fn eigen_level(
    op: &DifferenceOperator,
    params: &AdmissibleParams,
    degree: u32,
) -> Result<Vec<((u32, u32), Poly)>, SolveError> {
    (0..=degree)
        .map(|r| {
            let s = degree - r;
            build_eigenpolynomial(op, params, r, s).map(|p| ((r, s), p))
        })
        .collect()
}

/// Degree-preserving check used by tests of the necessity direction: the
/// operator applied to `x1^k x2^l` has the same leading monomial scaled by
/// `λ_{k+l}` whenever the template holds.
pub fn leading_action(op: &DifferenceOperator, k: u32, l: u32) -> Poly {
    op.apply(&Poly::monomial(k, l, Rat::from_integer(1.into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};

    fn charlier_product(a1: i64, a2: i64) -> DifferenceOperator {
        DifferenceOperator {
            a11: Poly::x1(),
            a12: Poly::zero(),
            a21: Poly::zero(),
            a22: Poly::x2(),
            b1: Poly::affine(int(-1), int(0), int(a1)),
            b2: Poly::affine(int(0), int(-1), int(a2)),
        }
    }

    #[test]
    fn charlier_product_is_admissible() {
        let params = classify_admissible(&charlier_product(1, 1), 8).unwrap();
        assert_eq!(params.a, int(0));
        assert_eq!(params.b, int(-1));
        assert_eq!(params.eigenvalue(7), int(-7));
        assert_eq!(params.eigenvalue(0), int(0));
    }

    #[test]
    fn cubic_coefficient_is_rejected() {
        let mut op = charlier_product(1, 1);
        op.a11 = Poly::monomial(3, 0, int(1));
        let err = classify_admissible(&op, 8).unwrap_err();
        assert_eq!(err.code(), "wrong-degree");
    }

    #[test]
    fn quadratic_mismatch_is_rejected() {
        let mut op = charlier_product(1, 1);
        op.a12 = Poly::monomial(1, 1, int(1));
        // A21 keeps quadratic part 0 != x1 x2.
        let err = classify_admissible(&op, 8).unwrap_err();
        assert_eq!(err.code(), "quadratic-parts-differ");
    }

    #[test]
    fn c_sum_is_enforced() {
        let mut op = charlier_product(1, 1);
        op.a12 = Poly::constant(int(2));
        op.a21 = Poly::constant(int(-2));
        assert!(classify_admissible(&op, 8).is_ok());
        op.a21 = Poly::constant(int(-3));
        let err = classify_admissible(&op, 8).unwrap_err();
        assert_eq!(err.code(), "c-sum-nonzero");
    }

    #[test]
    fn eigenvalue_degeneracy_detected() {
        // a = 1, b = -3 gives a*p + b = 0 at p = 3.
        let op = DifferenceOperator {
            a11: Poly::monomial(2, 0, int(1)),
            a12: Poly::monomial(1, 1, int(1)),
            a21: Poly::monomial(1, 1, int(1)),
            a22: Poly::monomial(0, 2, int(1)),
            b1: Poly::affine(int(-3), int(0), int(0)),
            b2: Poly::affine(int(0), int(-3), int(0)),
        };
        let err = classify_admissible(&op, 8).unwrap_err();
        assert_eq!(err.code(), "eigenvalue-degeneracy");
        // With nmax below the degeneracy the operator passes.
        assert!(classify_admissible(&op, 2).is_ok());
    }

    #[test]
    fn hahn_template_eigenvalues() {
        // a = -1, b = -3 - |σ| with σ = (1,1,1): λ_2 = -14.
        assert_eq!(eigenvalue(&int(-1), &int(-9), 2), int(-20));
        assert_eq!(eigenvalue(&int(-1), &int(-6), 2), int(-14));
    }

    #[test]
    fn charlier_eigenfunctions() {
        let op = charlier_product(1, 1);
        let params = classify_admissible(&op, 8).unwrap();
        // (r, s) = (0, 0): the constant.
        let p00 = build_eigenpolynomial(&op, &params, 0, 0).unwrap();
        assert_eq!(p00, Poly::one());
        // (r, s) = (1, 0): proportional to the degree-1 Charlier polynomial
        // x1 - a1; the leading factorial normalization makes it monic here.
        let p10 = build_eigenpolynomial(&op, &params, 1, 0).unwrap();
        assert_eq!(p10, Poly::affine(int(1), int(0), int(-1)));
        assert_eq!(op.apply(&p10), p10.scale(&int(-1)));
    }

    #[test]
    fn eigenfunctions_satisfy_identity_through_degree_four() {
        let op = charlier_product(2, 3);
        let params = classify_admissible(&op, 6).unwrap();
        for n in 0..=4 {
            for ((r, s), p) in eigen_level(&op, &params, n).unwrap() {
                assert_eq!(
                    op.apply(&p),
                    p.scale(&params.eigenvalue(n)),
                    "(r, s) = ({r}, {s})"
                );
                // Leading factorial coefficient is 1 at (r, s).
                let e = FactorialExpansion::from_poly(&p);
                assert_eq!(e.coeff(r, s), int(1));
            }
        }
    }

    #[test]
    fn degree_bound_is_enforced() {
        let op = charlier_product(1, 1);
        let params = classify_admissible(&op, 3).unwrap();
        assert!(matches!(
            build_eigenpolynomial(&op, &params, 2, 2),
            Err(SolveError::DegreeAboveBound { .. })
        ));
    }

    #[test]
    fn rational_parameters_stay_exact() {
        let op = DifferenceOperator {
            a11: Poly::x1(),
            a12: Poly::zero(),
            a21: Poly::zero(),
            a22: Poly::x2(),
            b1: Poly::affine(frac(-1, 3), int(0), frac(5, 7)),
            b2: Poly::affine(int(0), frac(-1, 3), frac(2, 9)),
        };
        let params = classify_admissible(&op, 5).unwrap();
        assert_eq!(params.b, frac(-1, 3));
        let p = build_eigenpolynomial(&op, &params, 2, 1).unwrap();
        assert_eq!(op.apply(&p), p.scale(&params.eigenvalue(3)));
    }
}
