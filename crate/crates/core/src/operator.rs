//! The standard second order partial difference operator and its companion
//! forms.
//!
//! The standard form is
//!
//! ```text
//! D u = A11 Δ1∇1 u + A12 Δ1∇2 u + A21 Δ2∇1 u + A22 Δ2∇2 u + B1 Δ1 u + B2 Δ2 u
//! ```
//!
//! with polynomial coefficients. Everything else in the crate (admissibility,
//! weight synthesis, verification) is phrased against this form; the tilde
//! form (backward first-order part) and the self-adjoint form exist only as
//! conversion sources/targets.

use serde::{Deserialize, Serialize};

use crate::poly::{Axis, Poly};

/// Standard second order partial difference operator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferenceOperator {
    #[serde(rename = "A11")]
    pub a11: Poly,
    #[serde(rename = "A12")]
    pub a12: Poly,
    #[serde(rename = "A21")]
    pub a21: Poly,
    #[serde(rename = "A22")]
    pub a22: Poly,
    #[serde(rename = "B1")]
    pub b1: Poly,
    #[serde(rename = "B2")]
    pub b2: Poly,
}

fn mixed_diff(u: &Poly, fwd: Axis, bwd: Axis) -> Poly {
    u.backward_diff(bwd).forward_diff(fwd)
}

impl DifferenceOperator {
    pub fn zero() -> Self {
        DifferenceOperator {
            a11: Poly::zero(),
            a12: Poly::zero(),
            a21: Poly::zero(),
            a22: Poly::zero(),
            b1: Poly::zero(),
            b2: Poly::zero(),
        }
    }

    /// Apply the operator to a polynomial, exactly.
    pub fn apply(&self, u: &Poly) -> Poly {
        let mut out = &self.a11 * &mixed_diff(u, Axis::X1, Axis::X1);
        out = &out + &(&self.a12 * &mixed_diff(u, Axis::X1, Axis::X2));
        out = &out + &(&self.a21 * &mixed_diff(u, Axis::X2, Axis::X1));
        out = &out + &(&self.a22 * &mixed_diff(u, Axis::X2, Axis::X2));
        out = &out + &(&self.b1 * &u.forward_diff(Axis::X1));
        out = &out + &(&self.b2 * &u.forward_diff(Axis::X2));
        out
    }

    /// The six coefficient polynomials in a fixed order
    /// `[A11, A12, A21, A22, B1, B2]`.
    pub fn coefficients(&self) -> [&Poly; 6] {
        [&self.a11, &self.a12, &self.a21, &self.a22, &self.b1, &self.b2]
    }

    pub fn coefficients_mut(&mut self) -> [&mut Poly; 6] {
        [
            &mut self.a11,
            &mut self.a12,
            &mut self.a21,
            &mut self.a22,
            &mut self.b1,
            &mut self.b2,
        ]
    }

    /// Coefficient-wise polynomial equality with the self-adjointness
    /// conditions `B1 = Δ1 A11 + Δ2 A12` and `B2 = Δ1 A21 + Δ2 A22`.
    pub fn is_self_adjoint(&self) -> bool {
        self.self_adjoint_form().is_some()
    }

    /// When the operator is self-adjoint, the rewriting
    /// `E u = ∇1[σ11 Δ1 u + σ21 Δ2 u] + ∇2[σ12 Δ1 u + σ22 Δ2 u]`
    /// with `σ_ij = A_ij(· + e_j)`; `None` otherwise.
    pub fn self_adjoint_form(&self) -> Option<SelfAdjointForm> {
        let want_b1 = &self.a11.forward_diff(Axis::X1) + &self.a12.forward_diff(Axis::X2);
        let want_b2 = &self.a21.forward_diff(Axis::X1) + &self.a22.forward_diff(Axis::X2);
        if self.b1 != want_b1 || self.b2 != want_b2 {
            return None;
        }
        Some(SelfAdjointForm {
            sigma11: self.a11.shift(Axis::X1.step()),
            sigma12: self.a12.shift(Axis::X2.step()),
            sigma21: self.a21.shift(Axis::X1.step()),
            sigma22: self.a22.shift(Axis::X2.step()),
        })
    }

    /// The first order operators `A_1 = A11 ∇1 + A12 ∇2 + B1` and
    /// `A_2 = A21 ∇1 + A22 ∇2 + B2`, which satisfy
    /// `D u = A_1 Δ1 u + A_2 Δ2 u`.
    pub fn first_order_parts(&self) -> (FirstOrderPart, FirstOrderPart) {
        (
            FirstOrderPart {
                c1: self.a11.clone(),
                c2: self.a12.clone(),
                c0: self.b1.clone(),
            },
            FirstOrderPart {
                c1: self.a21.clone(),
                c2: self.a22.clone(),
                c0: self.b2.clone(),
            },
        )
    }
}

/// Self-adjoint rewriting of a difference operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfAdjointForm {
    pub sigma11: Poly,
    pub sigma12: Poly,
    pub sigma21: Poly,
    pub sigma22: Poly,
}

impl SelfAdjointForm {
    /// Apply `E u = ∇1[σ11 Δ1 u + σ21 Δ2 u] + ∇2[σ12 Δ1 u + σ22 Δ2 u]`.
    pub fn apply(&self, u: &Poly) -> Poly {
        let d1 = u.forward_diff(Axis::X1);
        let d2 = u.forward_diff(Axis::X2);
        let inner1 = &(&self.sigma11 * &d1) + &(&self.sigma21 * &d2);
        let inner2 = &(&self.sigma12 * &d1) + &(&self.sigma22 * &d2);
        &inner1.backward_diff(Axis::X1) + &inner2.backward_diff(Axis::X2)
    }
}

/// Second order operator written with a backward first-order part:
/// `D~ u = Σ A~ij Δi∇j u + B~1 ∇1 u + B~2 ∇2 u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TildeOperator {
    pub a11: Poly,
    pub a12: Poly,
    pub a21: Poly,
    pub a22: Poly,
    pub b1: Poly,
    pub b2: Poly,
}

impl TildeOperator {
    /// Apply the tilde form directly (used to test the conversion).
    pub fn apply(&self, u: &Poly) -> Poly {
        let mut out = &self.a11 * &mixed_diff(u, Axis::X1, Axis::X1);
        out = &out + &(&self.a12 * &mixed_diff(u, Axis::X1, Axis::X2));
        out = &out + &(&self.a21 * &mixed_diff(u, Axis::X2, Axis::X1));
        out = &out + &(&self.a22 * &mixed_diff(u, Axis::X2, Axis::X2));
        out = &out + &(&self.b1 * &u.backward_diff(Axis::X1));
        out = &out + &(&self.b2 * &u.backward_diff(Axis::X2));
        out
    }

    /// Convert to the standard form using `∇_j = Δ_j - Δ_j ∇_j`:
    /// the backward first-order coefficients move into `B_j` and subtract
    /// from the diagonal second-order coefficients.
    pub fn to_standard(&self) -> DifferenceOperator {
        DifferenceOperator {
            a11: &self.a11 - &self.b1,
            a12: self.a12.clone(),
            a21: self.a21.clone(),
            a22: &self.a22 - &self.b2,
            b1: self.b1.clone(),
            b2: self.b2.clone(),
        }
    }
}

/// First order operator `g -> c1 ∇1 g + c2 ∇2 g + c0 g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstOrderPart {
    pub c1: Poly,
    pub c2: Poly,
    pub c0: Poly,
}

impl FirstOrderPart {
    pub fn apply(&self, g: &Poly) -> Poly {
        let mut out = &self.c1 * &g.backward_diff(Axis::X1);
        out = &out + &(&self.c2 * &g.backward_diff(Axis::X2));
        out = &out + &(&self.c0 * g);
        out
    }
}
