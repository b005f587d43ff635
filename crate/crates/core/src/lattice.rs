//! Lattice supports and stair-shaped index sets.
//!
//! A lattice set `V` is a subset of the nonnegative quadrant containing the
//! origin and closed under corner rectangles: whenever `(i, j)` is in `V`,
//! so is every lattice point of the axis-aligned rectangle with corners
//! `(0,0)` and `(i,j)`. The two named shapes are
//!
//! * Type A, the rectangle `{0..=M} x {0..=N}`, and
//! * Type B, the triangle `{x1 >= 0, x2 >= 0, x1 + x2 <= N}`,
//!
//! either extent possibly infinite. Explicit finite sets are validated for
//! closure at construction.
//!
//! For a closed set the boundary decomposes into `d1 = {x in V : x - e1 not
//! in V}` and `d2 = {x in V : x - e2 not in V}`, the edges through which the
//! weight recursion enters; with this orientation `d1` lies on `{x1 = 0}` and
//! `d2` on `{x2 = 0}`, which is the property the summation-by-parts argument
//! needs.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A lattice point.
pub type Point = (i64, i64);

/// A finite or infinite axis extent.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Extent {
    Finite(u32),
    Infinite,
}

impl Extent {
    pub fn is_finite(self) -> bool {
        matches!(self, Extent::Finite(_))
    }

    /// True when the extent admits the value `v`.
    pub fn at_least(self, v: i64) -> bool {
        match self {
            Extent::Finite(n) => v <= i64::from(n),
            Extent::Infinite => true,
        }
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<u32> {
        match self {
            Extent::Finite(n) => Some(n),
            Extent::Infinite => None,
        }
    }

    /// Cap an infinite extent at `cap`; finite extents are kept (never grown).
    pub fn capped(self, cap: u32) -> u32 {
        match self {
            Extent::Finite(n) => n.min(cap),
            Extent::Infinite => cap,
        }
    }
}

impl Serialize for Extent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Extent::Finite(n) => s.serialize_u32(*n),
            Extent::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Extent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u32),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Extent::Finite(n)),
            Raw::Str(s) if s == "inf" => Ok(Extent::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "extent must be an integer or \"inf\", got {s:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("explicit lattice set must contain the origin")]
    MissingOrigin,
    #[error("explicit lattice set contains a negative coordinate at ({0}, {1})")]
    NegativePoint(i64, i64),
    #[error("lattice set is not closed under corner rectangles: ({0}, {1}) is missing")]
    NotClosed(i64, i64),
    #[error("operation requires a finite lattice set")]
    Infinite,
    #[error("index set rows must be non-increasing")]
    RowsNotMonotone,
    #[error("index set violates the standing assumption (needs all monomials of degree <= 2 and one of (2,1), (1,2))")]
    StandingAssumption,
    #[error("degree {0} exceeds the maximal degree of the index set")]
    DegreeOutOfRange(u32),
}

/// Supports for the difference equations: rectangles, triangles, or
/// explicit validated finite sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeSet {
    TypeA { m: Extent, n: Extent },
    TypeB { n: Extent },
    Explicit(BTreeSet<Point>),
}

/// True when every corner rectangle of every listed point stays inside the
/// set (the closure property a lattice support must satisfy).
pub fn check_closure(points: &[Point]) -> bool {
    let set: BTreeSet<Point> = points.iter().copied().collect();
    set.iter()
        .all(|&(i, j)| (0..=i).all(|k| (0..=j).all(|l| set.contains(&(k, l)))))
}

impl LatticeSet {
    pub fn type_a(m: Extent, n: Extent) -> Self {
        LatticeSet::TypeA { m, n }
    }

    pub fn type_a_finite(m: u32, n: u32) -> Self {
        LatticeSet::TypeA {
            m: Extent::Finite(m),
            n: Extent::Finite(n),
        }
    }

    pub fn type_b(n: Extent) -> Self {
        LatticeSet::TypeB { n }
    }

    pub fn type_b_finite(n: u32) -> Self {
        LatticeSet::TypeB {
            n: Extent::Finite(n),
        }
    }

    /// Validate and build an explicit finite set.
    pub fn explicit(points: Vec<Point>) -> Result<Self, LatticeError> {
        for &(i, j) in &points {
            if i < 0 || j < 0 {
                return Err(LatticeError::NegativePoint(i, j));
            }
        }
        let set: BTreeSet<Point> = points.into_iter().collect();
        if !set.contains(&(0, 0)) {
            return Err(LatticeError::MissingOrigin);
        }
        for &(i, j) in &set {
            for k in 0..=i {
                for l in 0..=j {
                    if !set.contains(&(k, l)) {
                        return Err(LatticeError::NotClosed(k, l));
                    }
                }
            }
        }
        Ok(LatticeSet::Explicit(set))
    }

    pub fn contains(&self, p: Point) -> bool {
        if p.0 < 0 || p.1 < 0 {
            return false;
        }
        match self {
            LatticeSet::TypeA { m, n } => m.at_least(p.0) && n.at_least(p.1),
            LatticeSet::TypeB { n } => n.at_least(p.0 + p.1),
            LatticeSet::Explicit(set) => set.contains(&p),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            LatticeSet::TypeA { m, n } => m.is_finite() && n.is_finite(),
            LatticeSet::TypeB { n } => n.is_finite(),
            LatticeSet::Explicit(_) => true,
        }
    }

    /// Enumerate a finite set in lexicographic order.
    pub fn points(&self) -> Result<Vec<Point>, LatticeError> {
        match self {
            LatticeSet::TypeA {
                m: Extent::Finite(m),
                n: Extent::Finite(n),
            } => {
                let mut out = Vec::new();
                for i in 0..=i64::from(*m) {
                    for j in 0..=i64::from(*n) {
                        out.push((i, j));
                    }
                }
                Ok(out)
            }
            LatticeSet::TypeB {
                n: Extent::Finite(n),
            } => {
                let mut out = Vec::new();
                for i in 0..=i64::from(*n) {
                    for j in 0..=(i64::from(*n) - i) {
                        out.push((i, j));
                    }
                }
                Ok(out)
            }
            LatticeSet::Explicit(set) => Ok(set.iter().copied().collect()),
            _ => Err(LatticeError::Infinite),
        }
    }

    /// The points of `V` with both coordinates at most `cap`. For finite sets
    /// this is a plain window intersection; for infinite sets it is the
    /// truncation used by capped sums and scans.
    pub fn points_capped(&self, cap: u32) -> Vec<Point> {
        let (cap1, cap2) = match self {
            LatticeSet::TypeA { m, n } => (m.capped(cap), n.capped(cap)),
            LatticeSet::TypeB { n } => (n.capped(cap), n.capped(cap)),
            LatticeSet::Explicit(_) => (cap, cap),
        };
        let mut out = Vec::new();
        for i in 0..=i64::from(cap1) {
            for j in 0..=i64::from(cap2) {
                if self.contains((i, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Boundary decomposition of a finite set: `full` holds every point with
    /// a missing neighbor, `d1`/`d2` the points whose backward neighbor along
    /// the respective axis is missing.
    pub fn boundary(&self) -> Result<BoundarySets, LatticeError> {
        let points = self.points()?;
        let mut full = BTreeSet::new();
        let mut d1 = BTreeSet::new();
        let mut d2 = BTreeSet::new();
        for &(i, j) in &points {
            let neighbors = [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)];
            if neighbors.iter().any(|&q| !self.contains(q)) {
                full.insert((i, j));
            }
            if !self.contains((i - 1, j)) {
                d1.insert((i, j));
            }
            if !self.contains((i, j - 1)) {
                d2.insert((i, j));
            }
        }
        Ok(BoundarySets { full, d1, d2 })
    }

    /// Interior points of a finite set: all four neighbors present.
    pub fn interior(&self) -> Result<Vec<Point>, LatticeError> {
        let boundary = self.boundary()?;
        Ok(self
            .points()?
            .into_iter()
            .filter(|p| !boundary.full.contains(p))
            .collect())
    }

    /// The stair-shaped index set of monomial exponents spanned on `V`.
    /// For Type A and Type B this is `V` itself read as exponents.
    pub fn index_set(&self) -> Result<IndexSet, LatticeError> {
        match self {
            LatticeSet::TypeA { m, n } => match n {
                Extent::Finite(n) => {
                    IndexSet::from_rows(vec![*m; *n as usize + 1])
                }
                Extent::Infinite => IndexSet::unbounded_rows(*m),
            },
            LatticeSet::TypeB { n } => match n {
                Extent::Finite(n) => IndexSet::from_rows(
                    (0..=*n).rev().map(Extent::Finite).collect(),
                ),
                Extent::Infinite => IndexSet::unbounded_rows(Extent::Infinite),
            },
            LatticeSet::Explicit(set) => {
                let max_j = set.iter().map(|&(_, j)| j).max().unwrap_or(0);
                let rows = (0..=max_j)
                    .map(|j| {
                        let max_i = set
                            .iter()
                            .filter(|&&(_, jj)| jj == j)
                            .map(|&(i, _)| i)
                            .max()
                            .expect("closure guarantees every row up to max_j is nonempty");
                        Extent::Finite(max_i as u32)
                    })
                    .collect();
                IndexSet::from_rows(rows)
            }
        }
    }
}

/// Result of a boundary decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundarySets {
    pub full: BTreeSet<Point>,
    pub d1: BTreeSet<Point>,
    pub d2: BTreeSet<Point>,
}

#[derive(Serialize, Deserialize)]
struct LatticeDto {
    kind: String,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    m: Option<Extent>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    n: Option<Extent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Point>>,
}

impl Serialize for LatticeSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let dto = match self {
            LatticeSet::TypeA { m, n } => LatticeDto {
                kind: "typeA".into(),
                m: Some(*m),
                n: Some(*n),
                points: None,
            },
            LatticeSet::TypeB { n } => LatticeDto {
                kind: "typeB".into(),
                m: None,
                n: Some(*n),
                points: None,
            },
            LatticeSet::Explicit(set) => LatticeDto {
                kind: "explicit".into(),
                m: None,
                n: None,
                points: Some(set.iter().copied().collect()),
            },
        };
        dto.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticeSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let dto = LatticeDto::deserialize(d)?;
        match dto.kind.as_str() {
            "typeA" => Ok(LatticeSet::TypeA {
                m: dto.m.ok_or_else(|| D::Error::custom("typeA requires M"))?,
                n: dto.n.ok_or_else(|| D::Error::custom("typeA requires N"))?,
            }),
            "typeB" => Ok(LatticeSet::TypeB {
                n: dto.n.ok_or_else(|| D::Error::custom("typeB requires N"))?,
            }),
            "explicit" => {
                let points = dto
                    .points
                    .ok_or_else(|| D::Error::custom("explicit requires points"))?;
                LatticeSet::explicit(points).map_err(D::Error::custom)
            }
            other => Err(D::Error::custom(format!("unknown lattice kind {other:?}"))),
        }
    }
}

/// Stair-shaped monomial index set: row `l` (the exponent of `x2`) admits
/// exponents of `x1` from `0` through `n_l`, with `n_0 >= n_1 >= ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSet {
    rows: RowSpec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum RowSpec {
    /// Finitely many rows with the given extents.
    Rows(Vec<Extent>),
    /// Infinitely many rows, all with the same extent.
    Unbounded(Extent),
}

impl IndexSet {
    /// Build from explicit row extents, validating monotonicity and the
    /// standing assumption: all monomials of total degree at most 2 plus at
    /// least one of `(2,1)` and `(1,2)`.
    pub fn from_rows(rows: Vec<Extent>) -> Result<Self, LatticeError> {
        if rows.windows(2).any(|w| w[1] > w[0]) {
            return Err(LatticeError::RowsNotMonotone);
        }
        let set = IndexSet {
            rows: RowSpec::Rows(rows),
        };
        set.check_standing_assumption()?;
        Ok(set)
    }

    /// Infinitely many rows of constant extent.
    pub fn unbounded_rows(extent: Extent) -> Result<Self, LatticeError> {
        let set = IndexSet {
            rows: RowSpec::Unbounded(extent),
        };
        set.check_standing_assumption()?;
        Ok(set)
    }

    fn check_standing_assumption(&self) -> Result<(), LatticeError> {
        let needed = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];
        if !needed.iter().all(|&(k, l)| self.contains(k, l)) {
            return Err(LatticeError::StandingAssumption);
        }
        if !(self.contains(2, 1) || self.contains(1, 2)) {
            return Err(LatticeError::StandingAssumption);
        }
        Ok(())
    }

    fn row(&self, l: u32) -> Option<Extent> {
        match &self.rows {
            RowSpec::Rows(rows) => rows.get(l as usize).copied(),
            RowSpec::Unbounded(e) => Some(*e),
        }
    }

    pub fn contains(&self, k: u32, l: u32) -> bool {
        self.row(l).is_some_and(|e| e.at_least(i64::from(k)))
    }

    /// The maximal total degree `max(n_l + l)` spanned by the index set.
    pub fn max_degree(&self) -> Extent {
        match &self.rows {
            RowSpec::Unbounded(_) => Extent::Infinite,
            RowSpec::Rows(rows) => {
                if rows.iter().any(|e| !e.is_finite()) {
                    return Extent::Infinite;
                }
                Extent::Finite(
                    rows.iter()
                        .enumerate()
                        .map(|(l, e)| e.finite().unwrap() + l as u32)
                        .max()
                        .unwrap_or(0),
                )
            }
        }
    }

    /// Number of index pairs of total degree exactly `k`, by direct count.
    pub fn rank_count(&self, k: u32) -> Result<u32, LatticeError> {
        if !self.max_degree().at_least(i64::from(k)) {
            return Err(LatticeError::DegreeOutOfRange(k));
        }
        Ok((0..=k).filter(|&l| self.contains(k - l, l)).count() as u32)
    }

    /// The closed-form rank expression `k + 1 - sum_l (k - l - n_l)_+`.
    /// Exposed as a diagnostic only: on some stair shapes it disagrees with
    /// the direct count (see `rank_diagnostic`), and the direct count is
    /// authoritative everywhere in this crate.
    pub fn rank_formula(&self, k: u32) -> Result<i64, LatticeError> {
        if !self.max_degree().at_least(i64::from(k)) {
            return Err(LatticeError::DegreeOutOfRange(k));
        }
        let row_count = match &self.rows {
            RowSpec::Rows(rows) => rows.len() as u32,
            // Rows beyond l = k contribute nothing to (k - l - n_l)_+.
            RowSpec::Unbounded(_) => k + 1,
        };
        let mut sum: i64 = 0;
        for l in 0..row_count {
            if let Some(Extent::Finite(n_l)) = self.row(l) {
                sum += (i64::from(k) - i64::from(l) - i64::from(n_l)).max(0);
            }
        }
        Ok(i64::from(k) + 1 - sum)
    }

    /// Direct count and closed-form value side by side.
    pub fn rank_diagnostic(&self, k: u32) -> Result<RankDiagnostic, LatticeError> {
        let direct = self.rank_count(k)?;
        let formula = self.rank_formula(k)?;
        Ok(RankDiagnostic {
            k,
            direct,
            formula,
            agree: i64::from(direct) == formula,
        })
    }

    /// All index pairs with total degree at most `cap` (for brute-force
    /// comparisons in tests).
    pub fn enumerate_up_to(&self, cap: u32) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for l in 0..=cap {
            for k in 0..=cap.saturating_sub(l) {
                if self.contains(k, l) {
                    out.push((k, l));
                }
            }
        }
        out
    }
}

/// Agreement report between the direct rank count and the closed form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankDiagnostic {
    pub k: u32,
    pub direct: u32,
    pub formula: i64,
    pub agree: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_check() {
        assert!(check_closure(&[(0, 0), (1, 0), (0, 1), (1, 1)]));
        assert!(!check_closure(&[(0, 0), (1, 1)]));
        let tri = LatticeSet::type_b_finite(3).points().unwrap();
        assert!(check_closure(&tri));
    }

    #[test]
    fn explicit_validation() {
        assert!(LatticeSet::explicit(vec![(0, 0), (1, 0)]).is_ok());
        assert_eq!(
            LatticeSet::explicit(vec![(1, 0)]),
            Err(LatticeError::MissingOrigin)
        );
        assert_eq!(
            LatticeSet::explicit(vec![(0, 0), (1, 1)]),
            Err(LatticeError::NotClosed(0, 1))
        );
    }

    #[test]
    fn type_b_boundary() {
        // N = 2: all six points touch the outside.
        let v = LatticeSet::type_b_finite(2);
        let b = v.boundary().unwrap();
        assert_eq!(b.full.len(), 6);
        let d1: Vec<Point> = b.d1.iter().copied().collect();
        assert_eq!(d1, vec![(0, 0), (0, 1), (0, 2)]);
        assert!(b.d1.iter().all(|&(i, _)| i == 0));
        assert!(b.d2.iter().all(|&(_, j)| j == 0));
        assert!(b.d1.union(&b.d2).all(|p| b.full.contains(p)));
    }

    #[test]
    fn unit_square_has_no_interior() {
        let v = LatticeSet::type_a_finite(1, 1);
        let b = v.boundary().unwrap();
        assert_eq!(b.full.len(), 4);
        assert!(v.interior().unwrap().is_empty());
    }

    #[test]
    fn single_point_boundary() {
        let v = LatticeSet::type_b_finite(0);
        let b = v.boundary().unwrap();
        assert_eq!(b.full.len(), 1);
        // The origin has no backward neighbors at all.
        assert_eq!(b.d1.len(), 1);
        assert_eq!(b.d2.len(), 1);
    }

    #[test]
    fn interior_of_triangle() {
        let v = LatticeSet::type_b_finite(4);
        let interior = v.interior().unwrap();
        // x1, x2 >= 1 and x1 + x2 <= 3.
        assert_eq!(interior, vec![(1, 1), (1, 2), (2, 1)]);
    }

    #[test]
    fn rank_counts_on_type_b() {
        let idx = LatticeSet::type_b_finite(5).index_set().unwrap();
        for k in 0..=5 {
            assert_eq!(idx.rank_count(k).unwrap(), k + 1);
            assert!(idx.rank_diagnostic(k).unwrap().agree);
        }
        assert_eq!(
            idx.rank_count(6),
            Err(LatticeError::DegreeOutOfRange(6))
        );
    }

    #[test]
    fn rank_formula_disagrees_on_square() {
        // On the 2x2 square of exponents the direct count of degree-2 pairs
        // is 1 (only (1,1)) while the closed form gives 2. The diagnostic
        // reports the discrepancy; nothing downstream consumes the formula.
        let idx = LatticeSet::type_a_finite(2, 2).index_set().unwrap();
        let small = IndexSet {
            rows: RowSpec::Rows(vec![Extent::Finite(1), Extent::Finite(1)]),
        };
        assert_eq!(small.rank_count(2).unwrap(), 1);
        assert_eq!(small.rank_formula(2).unwrap(), 2);
        assert!(!small.rank_diagnostic(2).unwrap().agree);
        // The full validated square is fine at k = 2 but off at k = 3.
        assert_eq!(idx.rank_count(2).unwrap(), 3);
        let d3 = idx.rank_diagnostic(3).unwrap();
        assert_eq!(d3.direct, 2);
        assert_eq!(d3.formula, 3);
        assert!(!d3.agree);
    }

    #[test]
    fn stair_rank_counts() {
        // rows (2, 1): degree-2 pairs are (2,0) and (1,1).
        let idx = IndexSet {
            rows: RowSpec::Rows(vec![Extent::Finite(2), Extent::Finite(1)]),
        };
        assert_eq!(idx.rank_count(2).unwrap(), 2);
        // Sum of rank counts equals the total number of pairs.
        let idx = LatticeSet::type_b_finite(4).index_set().unwrap();
        let total: u32 = (0..=4).map(|k| idx.rank_count(k).unwrap()).sum();
        assert_eq!(total, idx.enumerate_up_to(4).len() as u32);
    }

    #[test]
    fn standing_assumption_enforced() {
        assert_eq!(
            LatticeSet::type_b_finite(2).index_set().unwrap_err(),
            LatticeError::StandingAssumption
        );
        assert!(LatticeSet::type_b_finite(3).index_set().is_ok());
        assert!(LatticeSet::type_a_finite(2, 2).index_set().is_ok());
        assert!(LatticeSet::type_a(Extent::Infinite, Extent::Infinite)
            .index_set()
            .is_ok());
        assert_eq!(
            IndexSet::from_rows(vec![Extent::Finite(1), Extent::Finite(2)]).unwrap_err(),
            LatticeError::RowsNotMonotone
        );
    }

    #[test]
    fn infinite_sets_reject_enumeration() {
        let v = LatticeSet::type_b(Extent::Infinite);
        assert_eq!(v.points(), Err(LatticeError::Infinite));
        assert!(v.contains((100, 200)));
        let window = v.points_capped(3);
        assert_eq!(window.len(), 16);
    }

    #[test]
    fn capped_points_respect_shape() {
        let v = LatticeSet::type_a(Extent::Finite(2), Extent::Infinite);
        let pts = v.points_capped(4);
        assert!(pts.iter().all(|&(i, j)| i <= 2 && j <= 4));
        assert_eq!(pts.len(), 15);
    }

    #[test]
    fn lattice_json_round_trip() {
        for v in [
            LatticeSet::type_b_finite(4),
            LatticeSet::type_a(Extent::Finite(3), Extent::Infinite),
            LatticeSet::explicit(vec![(0, 0), (1, 0), (0, 1)]).unwrap(),
        ] {
            let json = serde_json::to_string(&v).unwrap();
            let back: LatticeSet = serde_json::from_str(&json).unwrap();
            assert_eq!(v, back);
        }
        let inf: LatticeSet = serde_json::from_str(r#"{"kind":"typeA","M":"inf","N":2}"#).unwrap();
        assert_eq!(inf, LatticeSet::type_a(Extent::Infinite, Extent::Finite(2)));
    }
}
