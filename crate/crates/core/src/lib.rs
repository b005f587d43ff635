//! Exact-arithmetic classification and verification of second order partial
//! difference equations in two variables with discrete orthogonal polynomial
//! solutions.
//!
//! The crate represents the standard operator
//! `D = Σ A_ij Δ_i ∇_j + Σ B_i Δ_i` with exact rational polynomial
//! coefficients, decides whether it admits full polynomial eigenfamilies,
//! synthesizes the orthogonality weight constructively from the Pearson-type
//! ratio equations, builds the eight classical discrete families of two
//! variables, and verifies every claim (eigen-equations, orthogonality,
//! self-adjointness, consistency) either as an exact polynomial identity or
//! by exact finite summation; infinite supports get certified tail bounds.
//! No floating point is used anywhere.
//!
//! Lattice sums (inner products, Gram matrices, consistency checks) are
//! data-parallel via rayon under the default `parallel` feature; disabling
//! it selects a sequential fallback with identical results.

pub mod admissible;
pub mod factorial;
pub mod families;
pub mod lattice;
pub mod operator;
pub mod par;
pub mod pearson;
pub mod poly;
pub mod report;
pub mod scalar;
pub mod verify;
pub mod weight;

pub use admissible::{build_eigenpolynomial, classify_admissible, AdmissibleParams, Rejection};
pub use lattice::{check_closure, Extent, IndexSet, LatticeSet, Point};
pub use operator::{DifferenceOperator, FirstOrderPart, SelfAdjointForm, TildeOperator};
pub use poly::{Axis, Poly};
pub use report::{full_report, ClassificationReport, ReportOptions, ReportSource};
pub use scalar::Rat;
pub use weight::WeightFunction;
pub use families::FamilySpec;
