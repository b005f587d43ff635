//! The classical discrete orthogonal polynomial families of two variables:
//! constructors for their difference operators, supports, closed-form
//! weights and explicit eigenbases, plus the univariate Hahn / Meixner /
//! Krawtchouk / Charlier polynomials they are assembled from.
//!
//! Two families live on the triangle (Hahn and Krawtchouk of two variables);
//! the remaining six are products over rectangles, finite or infinite:
//! Meixner x Meixner, Meixner x Krawtchouk, Meixner x Charlier,
//! Krawtchouk x Krawtchouk, Krawtchouk x Charlier, Charlier x Charlier.
//!
//! Univariate members are produced by solving the family's own difference
//! equation with the factorial-basis triangular solve, in monic
//! normalization. The triangle eigenbases are assembled from factors of the
//! form `(-M)_n Q_n(t; ·, ·, M)` / `(-M)_n K_n(t; p, M)` with `M` itself a
//! polynomial (`N - x1` in the second slot), which keeps every factor a
//! genuine bivariate polynomial and sidesteps the degenerate-parameter
//! normalizations of the bare hypergeometric forms.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::admissible::{eigen_solve, SolveError};
use crate::lattice::{Extent, LatticeSet};
use crate::operator::DifferenceOperator;
use crate::poly::Poly;
use crate::scalar::{factorial, format_rat, int, pow_rat, rising, Rat};
use crate::weight::{ClosedFormWeight, Factor1D, WeightFunction};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degree {degree} is out of range for this family (max {max})")]
    DegreeOutOfRange { degree: u32, max: u32 },
    #[error("eigenfunction solve failed: {0}")]
    Solve(#[from] SolveError),
}

/// The univariate classical discrete families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family1D {
    /// Orthogonal on `0..=N` for `C(α+t, α) C(β+N-t, β)`.
    Hahn { alpha: Rat, beta: Rat, n: u32 },
    /// Orthogonal on the nonnegative integers for `(β)_t/t! c^t`.
    Meixner { beta: Rat, c: Rat },
    /// Orthogonal on `0..=N` for `C(N, t) p^t (1-p)^{N-t}`.
    Krawtchouk { p: Rat, n: u32 },
    /// Orthogonal on the nonnegative integers for `a^t/t!`.
    Charlier { a: Rat },
}

impl Family1D {
    fn validate(&self) -> Result<(), FamilyError> {
        let bad = |msg: &str| Err(FamilyError::InvalidParameter(msg.to_string()));
        match self {
            Family1D::Hahn { alpha, beta, n } => {
                if alpha.is_negative() || beta.is_negative() {
                    return bad("hahn requires alpha, beta >= 0");
                }
                if *n == 0 {
                    return bad("hahn requires N >= 1");
                }
            }
            Family1D::Meixner { beta, c } => {
                if !beta.is_positive() {
                    return bad("meixner requires beta > 0");
                }
                if !c.is_positive() || c >= &Rat::one() {
                    return bad("meixner requires 0 < c < 1");
                }
            }
            Family1D::Krawtchouk { p, n } => {
                if !p.is_positive() || p >= &Rat::one() {
                    return bad("krawtchouk requires 0 < p < 1");
                }
                if *n == 0 {
                    return bad("krawtchouk requires N >= 1");
                }
            }
            Family1D::Charlier { a } => {
                if !a.is_positive() {
                    return bad("charlier requires a > 0");
                }
            }
        }
        Ok(())
    }

    /// The coefficients `(a(t), b(t))` of the family's difference equation
    /// `a(t) Δ∇u + b(t) Δu = λ_n u`, as polynomials in `x1`.
    fn equation(&self) -> (Poly, Poly) {
        let x = Poly::x1();
        match self {
            Family1D::Hahn { alpha, beta, n } => {
                let nn = int(i64::from(*n));
                let a = &x * &Poly::affine(-Rat::one(), Rat::zero(), &nn + beta + Rat::one());
                let b = Poly::affine(
                    -(alpha + beta + int(2)),
                    Rat::zero(),
                    &nn * (alpha + Rat::one()),
                );
                (a, b)
            }
            Family1D::Meixner { beta, c } => {
                let b = Poly::affine(c - Rat::one(), Rat::zero(), c * beta);
                (x, b)
            }
            Family1D::Krawtchouk { p, n } => {
                let a = x.scale(&(Rat::one() - p));
                let b = Poly::affine(-Rat::one(), Rat::zero(), p * int(i64::from(*n)));
                (a, b)
            }
            Family1D::Charlier { a } => {
                let b = Poly::affine(-Rat::one(), Rat::zero(), a.clone());
                (x, b)
            }
        }
    }

    /// Eigenvalue of the degree-`n` member.
    pub fn eigenvalue(&self, n: u32) -> Rat {
        let n_rat = int(i64::from(n));
        match self {
            Family1D::Hahn { alpha, beta, .. } => {
                -&n_rat * (&n_rat + alpha + beta + Rat::one())
            }
            Family1D::Meixner { c, .. } => &n_rat * (c - Rat::one()),
            Family1D::Krawtchouk { .. } | Family1D::Charlier { .. } => -n_rat,
        }
    }

    fn max_degree(&self) -> Option<u32> {
        match self {
            Family1D::Hahn { n, .. } | Family1D::Krawtchouk { n, .. } => Some(*n),
            _ => None,
        }
    }

    fn weight_factor(&self) -> Factor1D {
        match self {
            Family1D::Meixner { beta, c } => Factor1D::Meixner {
                beta: beta.clone(),
                c: c.clone(),
            },
            Family1D::Charlier { a } => Factor1D::Charlier { a: a.clone() },
            Family1D::Krawtchouk { p, n } => Factor1D::Krawtchouk { p: p.clone(), n: *n },
            Family1D::Hahn { .. } => unreachable!("no product family carries a Hahn factor"),
        }
    }
}

/// The monic degree-`n` member of a univariate family, as a polynomial in
/// `x1`, obtained by solving the family's difference equation.
pub fn classical_1d(family: &Family1D, n: u32) -> Result<Poly, FamilyError> {
    family.validate()?;
    if let Some(max) = family.max_degree() {
        if n > max {
            return Err(FamilyError::DegreeOutOfRange { degree: n, max });
        }
    }
    let (a, b) = family.equation();
    let op = DifferenceOperator {
        a11: a,
        b1: b,
        ..DifferenceOperator::zero()
    };
    let solved = eigen_solve(&op, (n, 0), &family.eigenvalue(n))?;
    // The solve normalizes the leading factorial coefficient; rescale to a
    // monic leading monomial.
    Ok(solved.scale(&Rat::from_integer(factorial(n))))
}

/// `(-t)_j` as a polynomial in a polynomial argument `t`.
fn falling_pochhammer(t: &Poly, j: u32) -> Poly {
    let mut acc = Poly::one();
    for r in 0..j {
        acc = &acc * &(&Poly::constant(int(i64::from(r))) - t);
    }
    acc
}

/// `(j - M)_k` as a polynomial in a polynomial argument `M`.
fn shifted_pochhammer(m: &Poly, j: u32, k: u32) -> Poly {
    let mut acc = Poly::one();
    for r in 0..k {
        acc = &acc * &(&Poly::constant(int(i64::from(j + r))) - m);
    }
    acc
}

/// `(-M)_deg Q_deg(t; α, β, M)` for the Hahn family, with both `t` and the
/// truncation parameter `M` polynomials. A nonzero constant multiple of the
/// monic member for every value of `M`, with leading `t`-coefficient
/// `(-1)^deg (deg+α+β+1)_deg / (α+1)_deg` independent of `M`.
fn hahn_factor(deg: u32, alpha: &Rat, beta: &Rat, t: &Poly, m: &Poly) -> Poly {
    let mut acc = Poly::zero();
    for j in 0..=deg {
        let coeff = rising(&int(-i64::from(deg)), j)
            * rising(&(alpha + beta + int(i64::from(deg) + 1)), j)
            / (rising(&(alpha + Rat::one()), j) * Rat::from_integer(factorial(j)));
        let term = &falling_pochhammer(t, j) * &shifted_pochhammer(m, j, deg - j);
        acc = &acc + &term.scale(&coeff);
    }
    acc
}

/// `(-M)_deg K_deg(t; p, M)` for the Krawtchouk family, same conventions.
fn krawtchouk_factor(deg: u32, p: &Rat, t: &Poly, m: &Poly) -> Poly {
    let mut acc = Poly::zero();
    for j in 0..=deg {
        let coeff = rising(&int(-i64::from(deg)), j)
            / (Rat::from_integer(factorial(j)) * pow_rat(p, j));
        let term = &falling_pochhammer(t, j) * &shifted_pochhammer(m, j, deg - j);
        acc = &acc + &term.scale(&coeff);
    }
    acc
}

/// Specification of one of the eight two-variable families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    Hahn2D { sigma: [Rat; 3], n: u32 },
    Krawtchouk2D { p1: Rat, p2: Rat, n: u32 },
    MeixnerMeixner { beta1: Rat, c1: Rat, beta2: Rat, c2: Rat },
    MeixnerKrawtchouk { beta: Rat, c: Rat, p: Rat, n: u32 },
    MeixnerCharlier { beta: Rat, c: Rat, a: Rat },
    KrawtchoukKrawtchouk { p1: Rat, n1: u32, p2: Rat, n2: u32 },
    KrawtchoukCharlier { p: Rat, n: u32, a: Rat },
    CharlierCharlier { a1: Rat, a2: Rat },
}

/// One member of an eigenbasis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisMember {
    pub label: (u32, u32),
    pub poly: Poly,
    pub eigenvalue: Rat,
}

/// All members of one degree: `n + 1` linearly independent eigenfunctions
/// sharing the eigenvalue of that degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenBasis {
    pub degree: u32,
    pub members: Vec<BasisMember>,
}

impl FamilySpec {
    /// Stable command-line names of the families.
    pub const CLI_NAMES: [&'static str; 8] = [
        "hahn2d",
        "kraw2d",
        "meixner2",
        "meixner-kraw",
        "meixner-charlier",
        "kraw2",
        "kraw-charlier",
        "charlier2",
    ];

    pub fn cli_name(&self) -> &'static str {
        match self {
            FamilySpec::Hahn2D { .. } => "hahn2d",
            FamilySpec::Krawtchouk2D { .. } => "kraw2d",
            FamilySpec::MeixnerMeixner { .. } => "meixner2",
            FamilySpec::MeixnerKrawtchouk { .. } => "meixner-kraw",
            FamilySpec::MeixnerCharlier { .. } => "meixner-charlier",
            FamilySpec::KrawtchoukKrawtchouk { .. } => "kraw2",
            FamilySpec::KrawtchoukCharlier { .. } => "kraw-charlier",
            FamilySpec::CharlierCharlier { .. } => "charlier2",
        }
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        let bad = |msg: String| Err(FamilyError::InvalidParameter(msg));
        match self {
            FamilySpec::Hahn2D { sigma, n } => {
                if sigma.iter().any(|s| s.is_negative()) {
                    return bad(format!(
                        "hahn2d requires sigma >= 0, got ({}, {}, {})",
                        format_rat(&sigma[0]),
                        format_rat(&sigma[1]),
                        format_rat(&sigma[2])
                    ));
                }
                if *n == 0 {
                    return bad("hahn2d requires N >= 1".into());
                }
                Ok(())
            }
            FamilySpec::Krawtchouk2D { p1, p2, n } => {
                if !p1.is_positive() || !p2.is_positive() || p1 + p2 >= Rat::one() {
                    return bad("kraw2d requires p1, p2 > 0 with p1 + p2 < 1".into());
                }
                if *n == 0 {
                    return bad("kraw2d requires N >= 1".into());
                }
                Ok(())
            }
            _ => {
                let (f1, f2) = self.product_families().expect("non-triangle family");
                f1.validate()?;
                f2.validate()
            }
        }
    }

    /// The two univariate families of a product-type spec.
    fn product_families(&self) -> Option<(Family1D, Family1D)> {
        match self {
            FamilySpec::MeixnerMeixner { beta1, c1, beta2, c2 } => Some((
                Family1D::Meixner { beta: beta1.clone(), c: c1.clone() },
                Family1D::Meixner { beta: beta2.clone(), c: c2.clone() },
            )),
            FamilySpec::MeixnerKrawtchouk { beta, c, p, n } => Some((
                Family1D::Meixner { beta: beta.clone(), c: c.clone() },
                Family1D::Krawtchouk { p: p.clone(), n: *n },
            )),
            FamilySpec::MeixnerCharlier { beta, c, a } => Some((
                Family1D::Meixner { beta: beta.clone(), c: c.clone() },
                Family1D::Charlier { a: a.clone() },
            )),
            FamilySpec::KrawtchoukKrawtchouk { p1, n1, p2, n2 } => Some((
                Family1D::Krawtchouk { p: p1.clone(), n: *n1 },
                Family1D::Krawtchouk { p: p2.clone(), n: *n2 },
            )),
            FamilySpec::KrawtchoukCharlier { p, n, a } => Some((
                Family1D::Krawtchouk { p: p.clone(), n: *n },
                Family1D::Charlier { a: a.clone() },
            )),
            FamilySpec::CharlierCharlier { a1, a2 } => Some((
                Family1D::Charlier { a: a1.clone() },
                Family1D::Charlier { a: a2.clone() },
            )),
            _ => None,
        }
    }

    /// Whether a product factor's equation enters negated (the mixed
    /// Meixner rows subtract the Krawtchouk / Charlier part so that the
    /// combined eigenvalue comes out as `+n`).
    fn product_signs(&self) -> (Rat, Rat) {
        match self {
            FamilySpec::MeixnerKrawtchouk { .. } | FamilySpec::MeixnerCharlier { .. } => {
                (Rat::one(), -Rat::one())
            }
            _ => (Rat::one(), Rat::one()),
        }
    }

    /// Scaling applied to a factor's difference equation inside the
    /// two-variable operator (`1/(c-1)` for Meixner rows).
    fn factor_scale(f: &Family1D) -> Rat {
        match f {
            Family1D::Meixner { c, .. } => (c - Rat::one()).recip(),
            _ => Rat::one(),
        }
    }

    /// The family's difference operator, exactly as displayed.
    pub fn operator(&self) -> DifferenceOperator {
        match self {
            FamilySpec::Hahn2D { sigma, n } => {
                let one = Rat::one();
                let two = int(2);
                let nn = int(i64::from(*n));
                let [s1, s2, s3] = sigma.clone();
                DifferenceOperator {
                    // x1 (N - x1 + s2 + s3 + 2)
                    a11: &Poly::x1()
                        * &Poly::affine(-one.clone(), Rat::zero(), &nn + &s2 + &s3 + &two),
                    // -x2 (x1 + s1 + 1)
                    a12: &Poly::x2().scale(&-one.clone())
                        * &Poly::affine(one.clone(), Rat::zero(), &s1 + &one),
                    // -x1 (x2 + s2 + 1)
                    a21: &Poly::x1().scale(&-one.clone())
                        * &Poly::affine(Rat::zero(), one.clone(), &s2 + &one),
                    // x2 (N - x2 + s1 + s3 + 2)
                    a22: &Poly::x2()
                        * &Poly::affine(Rat::zero(), -one.clone(), &nn + &s1 + &s3 + &two),
                    // (N - x1)(s1 + 1) - x1 (s2 + s3 + 2)
                    b1: Poly::affine(
                        -(&s1 + &one) - (&s2 + &s3 + &two),
                        Rat::zero(),
                        &nn * (&s1 + &one),
                    ),
                    b2: Poly::affine(
                        Rat::zero(),
                        -(&s2 + &one) - (&s1 + &s3 + &two),
                        &nn * (&s2 + &one),
                    ),
                }
            }
            FamilySpec::Krawtchouk2D { p1, p2, n } => {
                let one = Rat::one();
                let nn = int(i64::from(*n));
                DifferenceOperator {
                    a11: Poly::x1().scale(&(&one - p1)),
                    a12: Poly::x2().scale(&-p1.clone()),
                    a21: Poly::x1().scale(&-p2.clone()),
                    a22: Poly::x2().scale(&(&one - p2)),
                    // p1 (N - x1) - (1 - p1) x1 = p1 N - x1
                    b1: Poly::affine(-one.clone(), Rat::zero(), p1 * &nn),
                    b2: Poly::affine(Rat::zero(), -one.clone(), p2 * &nn),
                }
            }
            _ => {
                let (f1, f2) = self.product_families().expect("product family");
                let (sign1, sign2) = self.product_signs();
                let scale1 = &sign1 * Self::factor_scale(&f1);
                let scale2 = &sign2 * Self::factor_scale(&f2);
                let (a1, b1) = f1.equation();
                let (a2, b2) = f2.equation();
                DifferenceOperator {
                    a11: a1.scale(&scale1),
                    a12: Poly::zero(),
                    a21: Poly::zero(),
                    a22: a2.swap_into_x2().scale(&scale2),
                    b1: b1.scale(&scale1),
                    b2: b2.swap_into_x2().scale(&scale2),
                }
            }
        }
    }

    /// The eigenvalue attached to degree `n` in the family's display.
    pub fn eigenvalue(&self, n: u32) -> Rat {
        let n_rat = int(i64::from(n));
        match self {
            FamilySpec::Hahn2D { sigma, .. } => {
                let total: Rat = sigma.iter().fold(Rat::zero(), |s, x| s + x);
                -&n_rat * (&n_rat + total + int(2))
            }
            FamilySpec::Krawtchouk2D { .. }
            | FamilySpec::KrawtchoukKrawtchouk { .. }
            | FamilySpec::KrawtchoukCharlier { .. }
            | FamilySpec::CharlierCharlier { .. } => -n_rat,
            FamilySpec::MeixnerMeixner { .. }
            | FamilySpec::MeixnerKrawtchouk { .. }
            | FamilySpec::MeixnerCharlier { .. } => n_rat,
        }
    }

    /// The support the family is orthogonal on.
    pub fn lattice(&self) -> LatticeSet {
        match self {
            FamilySpec::Hahn2D { n, .. } | FamilySpec::Krawtchouk2D { n, .. } => {
                LatticeSet::type_b_finite(*n)
            }
            _ => {
                let (f1, f2) = self.product_families().expect("product family");
                let ext = |f: &Family1D| match f.max_degree() {
                    Some(n) => Extent::Finite(n),
                    None => Extent::Infinite,
                };
                LatticeSet::type_a(ext(&f1), ext(&f2))
            }
        }
    }

    /// The closed-form weight on the family's support.
    pub fn weight(&self) -> WeightFunction {
        let closed = match self {
            FamilySpec::Hahn2D { sigma, n } => ClosedFormWeight::HahnTriangle {
                sigma: sigma.clone(),
                n: *n,
            },
            FamilySpec::Krawtchouk2D { p1, p2, n } => ClosedFormWeight::KrawtchoukTriangle {
                p1: p1.clone(),
                p2: p2.clone(),
                n: *n,
            },
            _ => {
                let (f1, f2) = self.product_families().expect("product family");
                ClosedFormWeight::Product {
                    f1: f1.weight_factor(),
                    f2: f2.weight_factor(),
                }
            }
        };
        WeightFunction::from_closed_form(self.lattice(), closed)
    }

    /// Largest degree for which a full basis level exists, if bounded.
    pub fn max_degree(&self) -> Option<u32> {
        match self {
            FamilySpec::Hahn2D { n, .. } | FamilySpec::Krawtchouk2D { n, .. } => Some(*n),
            _ => {
                let (f1, f2) = self.product_families().expect("product family");
                match (f1.max_degree(), f2.max_degree()) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (Some(a), None) | (None, Some(a)) => Some(a),
                    (None, None) => None,
                }
            }
        }
    }

    /// The `n + 1` explicit eigenfunctions of degree `n`.
    pub fn basis(&self, n: u32) -> Result<EigenBasis, FamilyError> {
        self.validate()?;
        if let Some(max) = self.max_degree() {
            if n > max {
                return Err(FamilyError::DegreeOutOfRange { degree: n, max });
            }
        }
        let lambda = self.eigenvalue(n);
        let mut members = Vec::with_capacity(n as usize + 1);
        for l in 0..=n {
            let m = n - l;
            let poly = match self {
                FamilySpec::Hahn2D { sigma, n: nn } => {
                    let [s1, s2, s3] = sigma.clone();
                    // Second factor at stacked parameter N - x1; first
                    // factor truncated at N - m so that the product solves
                    // the two-variable equation.
                    let beta1 = &s2 + &s3 + int(2 * i64::from(m) + 1);
                    let f1 = hahn_factor(
                        l,
                        &s1,
                        &beta1,
                        &Poly::x1(),
                        &Poly::constant(int(i64::from(*nn) - i64::from(m))),
                    );
                    let f2 = hahn_factor(
                        m,
                        &s2,
                        &s3,
                        &Poly::x2(),
                        &Poly::affine(-Rat::one(), Rat::zero(), int(i64::from(*nn))),
                    );
                    &f1 * &f2
                }
                FamilySpec::Krawtchouk2D { p1, p2, n: nn } => {
                    let p2_eff = p2 / (Rat::one() - p1);
                    let f1 = krawtchouk_factor(
                        l,
                        p1,
                        &Poly::x1(),
                        &Poly::constant(int(i64::from(*nn) - i64::from(m))),
                    );
                    let f2 = krawtchouk_factor(
                        m,
                        &p2_eff,
                        &Poly::x2(),
                        &Poly::affine(-Rat::one(), Rat::zero(), int(i64::from(*nn))),
                    );
                    &f1 * &f2
                }
                _ => {
                    let (f1, f2) = self.product_families().expect("product family");
                    let u1 = classical_1d(&f1, l)?;
                    let u2 = classical_1d(&f2, m)?.swap_into_x2();
                    &u1 * &u2
                }
            };
            members.push(BasisMember {
                label: (l, m),
                poly,
                eigenvalue: lambda.clone(),
            });
        }
        Ok(EigenBasis { degree: n, members })
    }

    /// All basis levels through `max_degree`.
    pub fn basis_through(&self, max_degree: u32) -> Result<Vec<EigenBasis>, FamilyError> {
        (0..=max_degree).map(|n| self.basis(n)).collect()
    }
}
