//! Pearson-type compatibility, constructive weight synthesis, boundary
//! conditions and consistency of a weight with an operator.
//!
//! For a standard operator define `r1 = A11 + A12 + B1`,
//! `r2 = A21 + A22 + B2` and
//!
//! ```text
//! α  = A11(·+e1) A22(·+e2) - A12(·+e2) A21(·+e1)
//! β1 = r1 A22(·+e2) - r2 A12(·+e2)
//! β2 = r2 A11(·+e1) - r1 A21(·+e1)
//! ```
//!
//! A weight making `W·D` self-adjoint exists exactly when
//! `β1(x) α(x+e2) β2(x+e1) = β2(x) α(x+e1) β1(x+e2)` on the support; the
//! weight is then generated from `W(x+e_i)/W(x) = β_i(x)/α(x)` by path
//! products. The compatibility condition is checked first as a polynomial
//! identity (stronger, decidable); a pointwise fallback on the support
//! covers operators where only the lattice restriction holds.

use num_traits::Zero;
use thiserror::Error;

use crate::lattice::{LatticeError, LatticeSet, Point};
use crate::operator::DifferenceOperator;
use crate::poly::{Axis, Poly};
use crate::scalar::{format_rat, Rat};
use crate::verify::{functional, VerifyError};
use crate::weight::{RatioWeight, WeightError, WeightFunction};

/// The polynomials driving the ratio equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PearsonData {
    pub alpha: Poly,
    pub beta1: Poly,
    pub beta2: Poly,
    pub r1: Poly,
    pub r2: Poly,
}

/// Exact Pearson data of an operator.
pub fn pearson_data(op: &DifferenceOperator) -> PearsonData {
    let e1 = Axis::X1.step();
    let e2 = Axis::X2.step();
    let r1 = &(&op.a11 + &op.a12) + &op.b1;
    let r2 = &(&op.a21 + &op.a22) + &op.b2;
    let a11s = op.a11.shift(e1);
    let a22s = op.a22.shift(e2);
    let a12s = op.a12.shift(e2);
    let a21s = op.a21.shift(e1);
    PearsonData {
        alpha: &(&a11s * &a22s) - &(&a12s * &a21s),
        beta1: &(&r1 * &a22s) - &(&r2 * &a12s),
        beta2: &(&r2 * &a11s) - &(&r1 * &a21s),
        r1,
        r2,
    }
}

/// Verdict of the compatibility check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Compatibility {
    /// The condition holds as an exact polynomial identity.
    PolynomialIdentity,
    /// The identity fails globally but holds at every point of the support
    /// (certified through a unisolvent window when the support is infinite).
    PointwiseOnV,
    /// The condition fails at the recorded support point.
    Fails { witness: Point },
}

impl Compatibility {
    pub fn holds(&self) -> bool {
        !matches!(self, Compatibility::Fails { .. })
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PearsonError {
    #[error("alpha vanishes identically; the ratio system is degenerate")]
    DegenerateAlpha,
    #[error("operator is not compatible (witness at ({0}, {1}))", witness.0, witness.1)]
    Incompatible { witness: Point },
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

/// Decide the compatibility condition for `op` on `v`.
pub fn check_compatibility(
    op: &DifferenceOperator,
    v: &LatticeSet,
) -> Result<Compatibility, PearsonError> {
    let pd = pearson_data(op);
    if pd.alpha.is_zero() {
        return Err(PearsonError::DegenerateAlpha);
    }
    let e1 = Axis::X1.step();
    let e2 = Axis::X2.step();
    let lhs = &(&pd.beta1 * &pd.alpha.shift(e2)) * &pd.beta2.shift(e1);
    let rhs = &(&pd.beta2 * &pd.alpha.shift(e1)) * &pd.beta1.shift(e2);
    let diff = &lhs - &rhs;
    if diff.is_zero() {
        return Ok(Compatibility::PolynomialIdentity);
    }

    // Pointwise fallback. A finite support is enumerated in full. On an
    // infinite support, vanishing on the window capped per axis at
    // (degree in that variable + 1) interpolates to vanishing on all of V.
    let points = match v.points() {
        Ok(p) => p,
        Err(_) => {
            let cap = diff.degree().unwrap_or(0) + 1;
            v.points_capped(cap)
        }
    };
    for p in points {
        if !diff.eval_point(p).is_zero() {
            return Ok(Compatibility::Fails { witness: p });
        }
    }
    Ok(Compatibility::PointwiseOnV)
}

/// Construct the weight from the ratio equations, normalized to
/// `W(0,0) = 1`. Finite supports are materialized eagerly, so blocked paths
/// (a vanishing `α` on the generation path) and lattice zeros surface here;
/// infinite supports evaluate lazily with a synchronized memo table.
pub fn synthesize_weight(
    op: &DifferenceOperator,
    v: &LatticeSet,
) -> Result<WeightFunction, PearsonError> {
    match check_compatibility(op, v)? {
        Compatibility::Fails { witness } => return Err(PearsonError::Incompatible { witness }),
        _ => {}
    }
    let pd = pearson_data(op);
    let ratio = RatioWeight::new(pd.beta1, pd.beta2, pd.alpha);
    let w = WeightFunction::from_ratio(v.clone(), ratio);
    if v.is_finite() {
        Ok(w.materialize()?)
    } else {
        Ok(w)
    }
}

/// Boundary condition for the supports at hand: the coefficients paired
/// with `∇_1` must vanish on `{x1 = 0}` and the ones paired with `∇_2` on
/// `{x2 = 0}`, i.e. `x1 | A11, x1 | A21, x2 | A12, x2 | A22`.
pub fn check_boundary_vanish(op: &DifferenceOperator) -> bool {
    op.a11.divisible_by_var(Axis::X1)
        && op.a21.divisible_by_var(Axis::X1)
        && op.a12.divisible_by_var(Axis::X2)
        && op.a22.divisible_by_var(Axis::X2)
}

/// Parameters extracted from the factored coefficient template
/// `A11 = a x1 (c1 - x1)`, `A12 = a x2 (c2 - x1)`, `A21 = a x1 (c3 - x2)`,
/// `A22 = a x2 (c4 - x2)`, `B_i = b x_i + d_i`, or its degenerate linear
/// branch `A11 = a1 x1`, `A12 = a2 x2`, `A21 = a3 x1`, `A22 = a4 x2`
/// reached when all quadratic parts vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Form315 {
    Quadratic {
        a: Rat,
        c: [Rat; 4],
        b: Rat,
        d1: Rat,
        d2: Rat,
    },
    Linear {
        a1: Rat,
        a2: Rat,
        a3: Rat,
        a4: Rat,
        b: Rat,
        d1: Rat,
        d2: Rat,
    },
}

/// Mismatch against the factored template, naming the first offending
/// coefficient.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("template mismatch: {0}")]
pub struct FormMismatch(pub String);

/// Match `op` against the factored template.
pub fn check_form_315(op: &DifferenceOperator) -> Result<Form315, FormMismatch> {
    let fail = |s: &str| Err(FormMismatch(s.to_string()));

    // B_i = b x_i + d_i with a common slope, in both branches.
    for (name, p, cross) in [("B1", &op.b1, (0u32, 1u32)), ("B2", &op.b2, (1, 0))] {
        if p.degree().unwrap_or(0) > 1 {
            return fail(&format!("{name} must be affine"));
        }
        if !p.coeff(cross.0, cross.1).is_zero() {
            return fail(&format!("{name} must depend only on its own variable"));
        }
    }
    let b = op.b1.coeff(1, 0);
    if op.b2.coeff(0, 1) != b {
        return fail("B1 and B2 must share the slope b");
    }
    let d1 = op.b1.coeff(0, 0);
    let d2 = op.b2.coeff(0, 0);

    let quad_zero = [&op.a11, &op.a12, &op.a21, &op.a22]
        .iter()
        .all(|p| p.degree().unwrap_or(0) <= 1);

    if quad_zero {
        // Linear branch: A11 = a1 x1, A12 = a2 x2, A21 = a3 x1, A22 = a4 x2.
        let mut out = [Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()];
        for (idx, (name, p, var)) in [
            ("A11", &op.a11, (1u32, 0u32)),
            ("A12", &op.a12, (0, 1)),
            ("A21", &op.a21, (1, 0)),
            ("A22", &op.a22, (0, 1)),
        ]
        .into_iter()
        .enumerate()
        {
            let coeff = p.coeff(var.0, var.1);
            if p != &Poly::monomial(var.0, var.1, coeff.clone()) {
                return fail(&format!(
                    "{name} must be a multiple of {}",
                    if var.0 == 1 { "x1" } else { "x2" }
                ));
            }
            out[idx] = coeff;
        }
        let [a1, a2, a3, a4] = out;
        return Ok(Form315::Linear {
            a1,
            a2,
            a3,
            a4,
            b,
            d1,
            d2,
        });
    }

    // Quadratic branch. A11 = a c1 x1 - a x1^2 pins a and c1, and so on.
    let a = -op.a11.coeff(2, 0);
    if a.is_zero() {
        return fail("A11 must carry the quadratic term -a x1^2");
    }
    let mut c = [Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()];
    for (idx, (name, p, sq, lin)) in [
        ("A11", &op.a11, (2u32, 0u32), (1u32, 0u32)),
        ("A12", &op.a12, (1, 1), (0, 1)),
        ("A21", &op.a21, (1, 1), (1, 0)),
        ("A22", &op.a22, (0, 2), (0, 1)),
    ]
    .into_iter()
    .enumerate()
    {
        let ci = p.coeff(lin.0, lin.1) / &a;
        let mut expect = Poly::monomial(sq.0, sq.1, -a.clone());
        expect.add_term(lin.0, lin.1, &a * &ci);
        if p != &expect {
            return fail(&format!("{name} does not factor as required"));
        }
        c[idx] = ci;
    }
    Ok(Form315::Quadratic { a, c, b, d1, d2 })
}

/// Outcome of the consistency check of a weight with an operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConsistencyVerdict {
    /// Every condition summed to exactly zero.
    ExactTrue,
    /// Truncated sums: every condition's certified interval contains zero;
    /// `eps` is the largest interval magnitude bound encountered.
    ApproxTrue { eps: Rat },
    /// A condition is certified nonzero.
    False { witness: ConsistencyWitness },
    /// Tail bounds were unavailable or not certifiable within the cap.
    Inconclusive { reason: String },
}

impl ConsistencyVerdict {
    pub fn holds(&self) -> bool {
        matches!(
            self,
            ConsistencyVerdict::ExactTrue | ConsistencyVerdict::ApproxTrue { .. }
        )
    }
}

/// Which consistency condition failed, for which test monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyWitness {
    /// 1 or 2 for `L(A_i g) = 0`; 3 for the shifted-kernel symmetry.
    pub condition: u8,
    pub monomial: (u32, u32),
    pub value: String,
}

/// Check consistency of `w` with `op` for all monomials of total degree at
/// most `degree_bound`: the two annihilation conditions `L(A_i g) = 0` and
/// the shifted-kernel symmetry `L(A12 g(·-e2)) = L(A21 g(·-e1))`. Exact on
/// finite supports; certified intervals (truncation cap `cap`) otherwise.
pub fn check_consistency(
    op: &DifferenceOperator,
    w: &WeightFunction,
    degree_bound: u32,
    cap: u32,
) -> ConsistencyVerdict {
    let (a1, a2) = op.first_order_parts();
    let mut worst_eps = Rat::zero();

    let mut check = |condition: u8, monomial: (u32, u32), f: Poly| -> Option<ConsistencyVerdict> {
        match functional(&f, w, cap) {
            Err(VerifyError::TailUnsupported) => Some(ConsistencyVerdict::Inconclusive {
                reason: "no tail bound available for this weight on an infinite support".into(),
            }),
            Err(VerifyError::Weight(WeightError::TailBound { cap })) => {
                Some(ConsistencyVerdict::Inconclusive {
                    reason: format!("tail certificate not reachable within cap {cap}"),
                })
            }
            Err(e) => Some(ConsistencyVerdict::Inconclusive {
                reason: e.to_string(),
            }),
            Ok(bound) => {
                if bound.is_exact() {
                    if bound.lo.is_zero() {
                        None
                    } else {
                        Some(ConsistencyVerdict::False {
                            witness: ConsistencyWitness {
                                condition,
                                monomial,
                                value: format_rat(&bound.lo),
                            },
                        })
                    }
                } else if bound.contains_zero() {
                    let eps = bound.abs_bound();
                    if eps > worst_eps {
                        worst_eps = eps;
                    }
                    None
                } else {
                    Some(ConsistencyVerdict::False {
                        witness: ConsistencyWitness {
                            condition,
                            monomial,
                            value: format!(
                                "[{}, {}]",
                                format_rat(&bound.lo),
                                format_rat(&bound.hi)
                            ),
                        },
                    })
                }
            }
        }
    };

    for total in 0..=degree_bound {
        for i in 0..=total {
            let j = total - i;
            let g = Poly::monomial(i, j, Rat::from_integer(1.into()));
            if let Some(v) = check(1, (i, j), a1.apply(&g)) {
                return v;
            }
            if let Some(v) = check(2, (i, j), a2.apply(&g)) {
                return v;
            }
            let sym = &(&op.a12 * &g.shift((0, -1))) - &(&op.a21 * &g.shift((-1, 0)));
            if let Some(v) = check(3, (i, j), sym) {
                return v;
            }
        }
    }

    if worst_eps.is_zero() {
        ConsistencyVerdict::ExactTrue
    } else {
        ConsistencyVerdict::ApproxTrue { eps: worst_eps }
    }
}

/// Result of a pointwise identity check over lattice points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointwiseCheck {
    pub holds: bool,
    pub witness: Option<Point>,
    pub points_checked: usize,
}

fn weighted(w: &WeightFunction, a: &Poly, p: Point) -> Result<Rat, WeightError> {
    Ok(w.eval_extended(p)? * a.eval_point(p))
}

/// Self-adjointness of `W·D` as a pointwise identity at interior points:
/// `W B1 = Δ1(W A11) + Δ2(W A12)` and `W B2 = Δ1(W A21) + Δ2(W A22)`,
/// with `W` extended by zero off the support.
pub fn check_weighted_self_adjoint(
    op: &DifferenceOperator,
    w: &WeightFunction,
    v: &LatticeSet,
) -> Result<PointwiseCheck, PearsonError> {
    let interior = v.interior()?;
    let mut checked = 0;
    for &p in &interior {
        let (x, y) = p;
        let d1 = |a: &Poly| -> Result<Rat, WeightError> {
            Ok(weighted(w, a, (x + 1, y))? - weighted(w, a, p)?)
        };
        let d2 = |a: &Poly| -> Result<Rat, WeightError> {
            Ok(weighted(w, a, (x, y + 1))? - weighted(w, a, p)?)
        };
        let lhs1 = weighted(w, &op.b1, p)?;
        let rhs1 = d1(&op.a11)? + d2(&op.a12)?;
        let lhs2 = weighted(w, &op.b2, p)?;
        let rhs2 = d1(&op.a21)? + d2(&op.a22)?;
        checked += 1;
        if lhs1 != rhs1 || lhs2 != rhs2 {
            return Ok(PointwiseCheck {
                holds: false,
                witness: Some(p),
                points_checked: checked,
            });
        }
    }
    Ok(PointwiseCheck {
        holds: true,
        witness: None,
        points_checked: checked,
    })
}

/// The alternate self-adjointness identities (forward/backward roles
/// reversed): `W B1 = ∇1(W A11)(·+e1) + ∇2(W A12)(·+e1)` and
/// `W B2 = ∇1(W A21)(·+e2) + ∇2(W A22)(·+e2)`, pointwise at interior
/// points of a finite support.
pub fn check_tilde_self_adjoint(
    op: &DifferenceOperator,
    w: &WeightFunction,
    v: &LatticeSet,
) -> Result<PointwiseCheck, PearsonError> {
    let interior = v.interior()?;
    let mut checked = 0;
    for &p in &interior {
        let (x, y) = p;
        // ∇1(f)(q) = f(q) - f(q - e1), ∇2(f)(q) = f(q) - f(q - e2).
        let nabla = |a: &Poly, q: Point, axis: Axis| -> Result<Rat, WeightError> {
            let (dx, dy) = axis.step();
            Ok(weighted(w, a, q)? - weighted(w, a, (q.0 - dx, q.1 - dy))?)
        };
        let lhs1 = weighted(w, &op.b1, p)?;
        let rhs1 =
            nabla(&op.a11, (x + 1, y), Axis::X1)? + nabla(&op.a12, (x + 1, y), Axis::X2)?;
        let lhs2 = weighted(w, &op.b2, p)?;
        let rhs2 =
            nabla(&op.a21, (x, y + 1), Axis::X1)? + nabla(&op.a22, (x, y + 1), Axis::X2)?;
        checked += 1;
        if lhs1 != rhs1 || lhs2 != rhs2 {
            return Ok(PointwiseCheck {
                holds: false,
                witness: Some(p),
                points_checked: checked,
            });
        }
    }
    Ok(PointwiseCheck {
        holds: true,
        witness: None,
        points_checked: checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

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
    fn charlier_pearson_alpha() {
        let pd = pearson_data(&charlier_product(1, 1));
        let expected = &Poly::affine(int(1), int(0), int(1)) * &Poly::affine(int(0), int(1), int(1));
        assert_eq!(pd.alpha, expected);
    }

    #[test]
    fn zero_operator_pearson_data() {
        let pd = pearson_data(&DifferenceOperator::zero());
        assert!(pd.alpha.is_zero());
        assert!(pd.beta1.is_zero());
        assert!(pd.beta2.is_zero());
        assert_eq!(
            check_compatibility(&DifferenceOperator::zero(), &LatticeSet::type_b_finite(2)),
            Err(PearsonError::DegenerateAlpha)
        );
    }

    #[test]
    fn separable_operator_is_polynomial_identity() {
        let op = charlier_product(2, 3);
        let verdict =
            check_compatibility(&op, &LatticeSet::type_a_finite(4, 4)).unwrap();
        assert_eq!(verdict, Compatibility::PolynomialIdentity);
    }

    #[test]
    fn charlier_weight_synthesis() {
        // Ratios W(x+e1)/W(x) = a1/(x1+1) give the Poisson-type product
        // a1^x1 a2^x2 / (x1! x2!).
        let op = charlier_product(2, 1);
        let v = LatticeSet::type_a_finite(4, 4);
        let w = synthesize_weight(&op, &v).unwrap();
        assert_eq!(w.eval((0, 0)).unwrap(), int(1));
        assert_eq!(w.eval((2, 0)).unwrap(), int(2)); // 2^2/2! = 2
        assert_eq!(w.eval((3, 1)).unwrap(), crate::scalar::frac(8, 6));
    }

    #[test]
    fn boundary_vanish_checks() {
        assert!(check_boundary_vanish(&charlier_product(1, 1)));
        let mut bad = charlier_product(1, 1);
        bad.a11 = Poly::one();
        assert!(!check_boundary_vanish(&bad));
        assert!(check_boundary_vanish(&DifferenceOperator::zero()));
    }

    #[test]
    fn form_315_linear_branch() {
        let op = charlier_product(1, 1);
        match check_form_315(&op).unwrap() {
            Form315::Linear { a1, a4, b, d1, .. } => {
                assert_eq!(a1, int(1));
                assert_eq!(a4, int(1));
                assert_eq!(b, int(-1));
                assert_eq!(d1, int(1));
            }
            other => panic!("expected linear branch, got {other:?}"),
        }
    }

    #[test]
    fn form_315_rejects_stray_terms() {
        let mut op = charlier_product(1, 1);
        op.a11 = Poly::from_terms([(0, 2, int(1))]);
        assert!(check_form_315(&op).is_err());
    }

    #[test]
    fn charlier_consistency_on_box_fails_but_quadrant_is_approx_true() {
        // On a truncated box the Poisson-type weight does not vanish on the
        // outer boundary, so the annihilation conditions fail exactly; on
        // the full quadrant they hold within certified tails.
        let op = charlier_product(1, 1);
        let v = LatticeSet::type_a_finite(5, 5);
        let w = synthesize_weight(&op, &v).unwrap();
        let verdict = check_consistency(&op, &w, 2, 40);
        assert!(matches!(verdict, ConsistencyVerdict::False { .. }));
    }
}
