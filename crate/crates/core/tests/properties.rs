//! Property tests for the difference calculus, the factorial basis and the
//! operator form conversions.

use proptest::prelude::*;

use ortho2_core::factorial::FactorialExpansion;
use ortho2_core::operator::{DifferenceOperator, TildeOperator};
use ortho2_core::poly::{Axis, Poly};
use ortho2_core::scalar::{frac, Rat};

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-24i64..=24, 1i64..=9).prop_map(|(n, d)| frac(n, d))
}

fn arb_poly(max_degree: u32, max_terms: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(
        (0..=max_degree)
            .prop_flat_map(move |i| (Just(i), 0..=(max_degree - i)))
            .prop_flat_map(|(i, j)| (Just(i), Just(j), arb_rat())),
        0..=max_terms,
    )
    .prop_map(Poly::from_terms)
}

fn arb_operator(max_degree: u32) -> impl Strategy<Value = DifferenceOperator> {
    (
        arb_poly(max_degree, 4),
        arb_poly(max_degree, 4),
        arb_poly(max_degree, 4),
        arb_poly(max_degree, 4),
        arb_poly(max_degree, 4),
        arb_poly(max_degree, 4),
    )
        .prop_map(|(a11, a12, a21, a22, b1, b2)| DifferenceOperator {
            a11,
            a12,
            a21,
            a22,
            b1,
            b2,
        })
}

proptest! {
    /// Forward and backward differences are the same operator read from the
    /// two ends of the step: Δ_i p = ∇_i (p shifted by e_i).
    #[test]
    fn forward_equals_shifted_backward(p in arb_poly(8, 10)) {
        for axis in Axis::BOTH {
            let lhs = p.forward_diff(axis);
            let rhs = p.shift(axis.step()).backward_diff(axis);
            prop_assert_eq!(lhs, rhs);
        }
    }

    /// Factorial-basis round trip is the identity for degree <= 8.
    #[test]
    fn factorial_round_trip(p in arb_poly(8, 12)) {
        let back = FactorialExpansion::from_poly(&p).to_poly();
        prop_assert_eq!(back, p);
    }

    /// Product rule: Δ_i(f g) = f Δ_i g + g(· + e_i) Δ_i f.
    #[test]
    fn difference_product_rule(f in arb_poly(5, 6), g in arb_poly(5, 6)) {
        for axis in Axis::BOTH {
            let lhs = (&f * &g).forward_diff(axis);
            let rhs = &(&f * &g.forward_diff(axis))
                + &(&g.shift(axis.step()) * &f.forward_diff(axis));
            prop_assert_eq!(lhs, rhs);
        }
    }

    /// First-order decomposition: D u = A_1 Δ1 u + A_2 Δ2 u for every
    /// operator, admissible or not.
    #[test]
    fn first_order_decomposition(op in arb_operator(3), u in arb_poly(6, 8)) {
        let (a1, a2) = op.first_order_parts();
        let direct = op.apply(&u);
        let split = &a1.apply(&u.forward_diff(Axis::X1)) + &a2.apply(&u.forward_diff(Axis::X2));
        prop_assert_eq!(direct, split);
    }

    /// Converting the backward first-order form to the standard form never
    /// changes the operator's action.
    #[test]
    fn tilde_conversion_preserves_action(
        coeffs in (arb_poly(2, 3), arb_poly(2, 3), arb_poly(2, 3), arb_poly(2, 3), arb_poly(1, 3), arb_poly(1, 3)),
        u in arb_poly(6, 8),
    ) {
        let (a11, a12, a21, a22, b1, b2) = coeffs;
        let tilde = TildeOperator { a11, a12, a21, a22, b1, b2 };
        prop_assert_eq!(tilde.to_standard().apply(&u), tilde.apply(&u));
    }

    /// Differences annihilate constants, so the operator's action is
    /// invariant under adding a constant.
    #[test]
    fn action_ignores_constants(op in arb_operator(3), u in arb_poly(5, 6), c in arb_rat()) {
        let shifted = &u + &Poly::constant(c);
        prop_assert_eq!(op.apply(&shifted), op.apply(&u));
    }

    /// Shifting is an action of the integer lattice on polynomials.
    #[test]
    fn shifts_compose(p in arb_poly(6, 8), h1 in -3i64..=3, h2 in -3i64..=3, k1 in -3i64..=3, k2 in -3i64..=3) {
        let both = p.shift((h1, h2)).shift((k1, k2));
        let once = p.shift((h1 + k1, h2 + k2));
        prop_assert_eq!(both, once);
    }
}
