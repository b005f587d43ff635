//! Weight functions on lattice sets.
//!
//! A weight is carried in one of three representations:
//!
//! * `Ratio` — generated from the two exact ratio equations
//!   `W(x + e_i) / W(x) = β_i(x) / α(x)` by path products from the origin,
//!   with `W(0,0) = 1`, mirroring the constructive existence proof. Values
//!   are memoized; the memo table is internally synchronized.
//! * `Closed` — a named family formula (binomial, multinomial,
//!   negative-binomial, Poisson-type products) with exact rational
//!   evaluation. Infinite-axis factors know how to certify geometric tail
//!   bounds for truncated moment sums.
//! * `Table` — explicit point values, used for weights loaded from disk.
//!
//! All evaluation is exact; `f64` appears nowhere.

use std::collections::BTreeMap;
use std::sync::Mutex;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lattice::{Extent, LatticeSet, Point};
use crate::poly::Poly;
use crate::scalar::{factorial, int, parse_rat, pow_rat, rising, Rat};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum WeightError {
    #[error("point ({0}, {1}) lies outside the weight's lattice set")]
    OutsideDomain(i64, i64),
    #[error("point ({0}, {1}) is not tabulated")]
    NotTabulated(i64, i64),
    #[error("ratio denominator vanishes on the generation path at ({0}, {1})")]
    UndefinedRatio(i64, i64),
    #[error("weight vanishes on the lattice at ({0}, {1})")]
    VanishesAt(i64, i64),
    #[error("tail bound certificate not reachable within cap {cap}")]
    TailBound { cap: u32 },
    #[error("operation requires a finite lattice set")]
    InfiniteDomain,
    #[error("malformed weight CSV at line {line}: {detail}")]
    Csv { line: usize, detail: String },
}

/// One axis factor of a product-type closed-form weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor1D {
    /// `(β)_t / t! · c^t` on the nonnegative integers.
    Meixner { beta: Rat, c: Rat },
    /// `a^t / t!` on the nonnegative integers.
    Charlier { a: Rat },
    /// `C(N, t) p^t (1-p)^{N-t}` on `0..=N`.
    Krawtchouk { p: Rat, n: u32 },
}

impl Factor1D {
    pub fn support(&self) -> Extent {
        match self {
            Factor1D::Krawtchouk { n, .. } => Extent::Finite(*n),
            _ => Extent::Infinite,
        }
    }

    /// Exact value at an admissible integer point.
    pub fn eval(&self, t: i64) -> Result<Rat, WeightError> {
        if t < 0 || !self.support().at_least(t) {
            return Err(WeightError::OutsideDomain(t, 0));
        }
        let t32 = t as u32;
        Ok(match self {
            Factor1D::Meixner { beta, c } => {
                rising(beta, t32) * pow_rat(c, t32) / Rat::from_integer(factorial(t32))
            }
            Factor1D::Charlier { a } => pow_rat(a, t32) / Rat::from_integer(factorial(t32)),
            Factor1D::Krawtchouk { p, n } => {
                let q = Rat::one() - p;
                Rat::from_integer(crate::scalar::binomial(u64::from(*n), t as u64))
                    * pow_rat(p, t32)
                    * pow_rat(&q, *n - t32)
            }
        })
    }

    /// Successive-term ratio `w(t+1) / w(t)`.
    fn step_ratio(&self, t: i64) -> Rat {
        match self {
            Factor1D::Meixner { beta, c } => c * (beta + int(t)) / int(t + 1),
            Factor1D::Charlier { a } => a / int(t + 1),
            Factor1D::Krawtchouk { p, n } => {
                let q = Rat::one() - p;
                p / q * int(i64::from(*n) - t) / int(t + 1)
            }
        }
    }

    /// `Σ_t t^power w(t)` over the factor's support: exact for finite
    /// support, otherwise an exact partial sum through a certified cutoff
    /// plus a nonnegative geometric tail bound. The cutoff starts small and
    /// doubles until the ratio certificate `ρ < 1` holds, never exceeding
    /// `cap`.
    pub fn moment_sum(&self, power: u32, cap: u32) -> Result<(Rat, Rat), WeightError> {
        if let Extent::Finite(n) = self.support() {
            let mut sum = Rat::zero();
            let mut w = self.eval(0).expect("0 is in the support");
            for t in 0..=i64::from(n) {
                sum += pow_rat(&int(t), power) * &w;
                if t < i64::from(n) {
                    w *= self.step_ratio(t);
                }
            }
            return Ok((sum, Rat::zero()));
        }

        // For t >= T >= 1 each factor of g(t+1)/g(t) = ((t+1)/t)^power *
        // w(t+1)/w(t) is bounded by its value at T (or by 1 where the factor
        // increases toward 1), giving a valid common ratio rho(T).
        let rho_at = |t: i64| -> Rat {
            let growth = pow_rat(&(int(t + 1) / int(t)), power);
            match self {
                Factor1D::Meixner { beta, c } => {
                    let shift = (beta + int(t)) / int(t + 1);
                    let shift = if shift > Rat::one() { shift } else { Rat::one() };
                    c * growth * shift
                }
                Factor1D::Charlier { a } => a / int(t + 1) * growth,
                Factor1D::Krawtchouk { .. } => unreachable!("finite support handled above"),
            }
        };

        // rho only shrinks as the cutoff grows, so summing through the full
        // cap both maximizes the chance of certification and tightens the
        // tail. The certificate can still fail (e.g. a Poisson-type factor
        // whose terms are still growing at the cap); that is reported, not
        // approximated.
        let cutoff = i64::from(cap.max(1));
        let rho = rho_at(cutoff);
        if rho >= Rat::one() {
            return Err(WeightError::TailBound { cap });
        }
        let mut sum = Rat::zero();
        let mut w = Rat::one();
        for t in 0..=cutoff {
            sum += pow_rat(&int(t), power) * &w;
            if t < cutoff {
                w *= self.step_ratio(t);
            }
        }
        let g_last = pow_rat(&int(cutoff), power) * &w;
        let tail = g_last * &rho / (Rat::one() - &rho);
        Ok((sum, tail))
    }
}

/// Closed-form family weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosedFormWeight {
    /// `C(x1+σ1, σ1) C(x2+σ2, σ2) C(N-x1-x2+σ3, σ3)` on the triangle,
    /// evaluated as rising factorials so rational `σ` stays exact.
    HahnTriangle { sigma: [Rat; 3], n: u32 },
    /// Multinomial `N!/(x1! x2! z!) p1^x1 p2^x2 (1-p1-p2)^z`, `z = N-x1-x2`.
    KrawtchoukTriangle { p1: Rat, p2: Rat, n: u32 },
    /// Product of two one-dimensional factors.
    Product { f1: Factor1D, f2: Factor1D },
}

impl ClosedFormWeight {
    pub fn eval(&self, p: Point) -> Result<Rat, WeightError> {
        match self {
            ClosedFormWeight::HahnTriangle { sigma, n } => {
                let z = i64::from(*n) - p.0 - p.1;
                if p.0 < 0 || p.1 < 0 || z < 0 {
                    return Err(WeightError::OutsideDomain(p.0, p.1));
                }
                let term = |s: &Rat, t: i64| {
                    rising(&(s + Rat::one()), t as u32) / Rat::from_integer(factorial(t as u32))
                };
                Ok(term(&sigma[0], p.0) * term(&sigma[1], p.1) * term(&sigma[2], z))
            }
            ClosedFormWeight::KrawtchoukTriangle { p1, p2, n } => {
                let z = i64::from(*n) - p.0 - p.1;
                if p.0 < 0 || p.1 < 0 || z < 0 {
                    return Err(WeightError::OutsideDomain(p.0, p.1));
                }
                let q = Rat::one() - p1 - p2;
                let multinomial = Rat::from_integer(factorial(*n))
                    / Rat::from_integer(
                        factorial(p.0 as u32) * factorial(p.1 as u32) * factorial(z as u32),
                    );
                Ok(multinomial * pow_rat(p1, p.0 as u32) * pow_rat(p2, p.1 as u32)
                    * pow_rat(&q, z as u32))
            }
            ClosedFormWeight::Product { f1, f2 } => Ok(f1.eval(p.0)? * f2.eval(p.1)?),
        }
    }

    /// The per-axis factors when the weight is a product.
    pub fn product_factors(&self) -> Option<(&Factor1D, &Factor1D)> {
        match self {
            ClosedFormWeight::Product { f1, f2 } => Some((f1, f2)),
            _ => None,
        }
    }
}

/// Ratio-generated weight data: `γ_i = num_i / den` as exact rational
/// functions, memoized path products.
#[derive(Debug)]
pub struct RatioWeight {
    pub num1: Poly,
    pub num2: Poly,
    pub den: Poly,
    memo: Mutex<BTreeMap<Point, Rat>>,
}

impl PartialEq for RatioWeight {
    fn eq(&self, other: &Self) -> bool {
        self.num1 == other.num1 && self.num2 == other.num2 && self.den == other.den
    }
}
impl Eq for RatioWeight {}

impl Clone for RatioWeight {
    fn clone(&self) -> Self {
        RatioWeight {
            num1: self.num1.clone(),
            num2: self.num2.clone(),
            den: self.den.clone(),
            memo: Mutex::new(self.memo.lock().expect("memo lock").clone()),
        }
    }
}

impl RatioWeight {
    pub fn new(num1: Poly, num2: Poly, den: Poly) -> Self {
        let mut memo = BTreeMap::new();
        memo.insert((0, 0), Rat::one());
        RatioWeight {
            num1,
            num2,
            den,
            memo: Mutex::new(memo),
        }
    }

    /// `γ_i` evaluated at a path point.
    fn gamma(&self, axis: usize, p: Point) -> Result<Rat, WeightError> {
        let den = self.den.eval_point(p);
        if den.is_zero() {
            return Err(WeightError::UndefinedRatio(p.0, p.1));
        }
        let num = if axis == 1 {
            self.num1.eval_point(p)
        } else {
            self.num2.eval_point(p)
        };
        Ok(num / den)
    }

    /// Path product along the canonical route: up the `x2` axis first, then
    /// across in `x1`. Single-valuedness over route choice is exactly the
    /// compatibility condition checked before synthesis.
    fn eval(&self, p: Point) -> Result<Rat, WeightError> {
        if p.0 < 0 || p.1 < 0 {
            return Err(WeightError::OutsideDomain(p.0, p.1));
        }
        let mut memo = self.memo.lock().expect("memo lock");
        if let Some(v) = memo.get(&p) {
            return Ok(v.clone());
        }
        for j in 1..=p.1 {
            if !memo.contains_key(&(0, j)) {
                let prev = memo[&(0, j - 1)].clone();
                let v = prev * self.gamma(2, (0, j - 1))?;
                memo.insert((0, j), v);
            }
        }
        for i in 1..=p.0 {
            if !memo.contains_key(&(i, p.1)) {
                let prev = memo[&(i - 1, p.1)].clone();
                let v = prev * self.gamma(1, (i - 1, p.1))?;
                memo.insert((i, p.1), v);
            }
        }
        Ok(memo[&p].clone())
    }
}

/// A weight function on a lattice set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightFunction {
    domain: LatticeSet,
    repr: Repr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Table(BTreeMap<Point, Rat>),
    Ratio(RatioWeight),
    Closed(ClosedFormWeight),
}

/// Result of scanning a weight for improper behavior on (a window of) its
/// lattice set. An undefined ratio or a lattice zero makes the weight
/// unusable; sign changes leave the bilinear form well-defined but
/// indefinite, so they are recorded separately.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ImproperScan {
    pub blocked_at: Option<Point>,
    pub zero_at: Option<Point>,
    pub sign_change_at: Option<(Point, Point)>,
}

impl ImproperScan {
    /// True when the weight cannot serve as an orthogonality weight at all.
    pub fn is_improper(&self) -> bool {
        self.blocked_at.is_some() || self.zero_at.is_some()
    }

    pub fn is_clean(&self) -> bool {
        !self.is_improper() && self.sign_change_at.is_none()
    }
}

impl WeightFunction {
    pub fn from_table(domain: LatticeSet, table: BTreeMap<Point, Rat>) -> Self {
        WeightFunction {
            domain,
            repr: Repr::Table(table),
        }
    }

    pub fn from_ratio(domain: LatticeSet, ratio: RatioWeight) -> Self {
        WeightFunction {
            domain,
            repr: Repr::Ratio(ratio),
        }
    }

    pub fn from_closed_form(domain: LatticeSet, closed: ClosedFormWeight) -> Self {
        WeightFunction {
            domain,
            repr: Repr::Closed(closed),
        }
    }

    pub fn domain(&self) -> &LatticeSet {
        &self.domain
    }

    pub fn closed_form(&self) -> Option<&ClosedFormWeight> {
        match &self.repr {
            Repr::Closed(c) => Some(c),
            _ => None,
        }
    }

    /// Exact value at a point of the lattice set.
    pub fn eval(&self, p: Point) -> Result<Rat, WeightError> {
        if !self.domain.contains(p) {
            return Err(WeightError::OutsideDomain(p.0, p.1));
        }
        match &self.repr {
            Repr::Table(t) => t
                .get(&p)
                .cloned()
                .ok_or(WeightError::NotTabulated(p.0, p.1)),
            Repr::Ratio(r) => r.eval(p),
            Repr::Closed(c) => c.eval(p),
        }
    }

    /// Value extended by zero off the lattice set (the convention the
    /// summation-by-parts identities use).
    pub fn eval_extended(&self, p: Point) -> Result<Rat, WeightError> {
        if !self.domain.contains(p) {
            return Ok(Rat::zero());
        }
        self.eval(p)
    }

    /// Materialize every value on a finite domain into a table,
    /// rejecting lattice zeros. Blocked paths surface as errors.
    pub fn materialize(&self) -> Result<WeightFunction, WeightError> {
        let points = self
            .domain
            .points()
            .map_err(|_| WeightError::InfiniteDomain)?;
        let mut table = BTreeMap::new();
        for p in points {
            let v = self.eval(p)?;
            if v.is_zero() {
                return Err(WeightError::VanishesAt(p.0, p.1));
            }
            table.insert(p, v);
        }
        Ok(WeightFunction::from_table(self.domain.clone(), table))
    }

    /// Scan the lattice set (window `cap` when infinite) for undefined
    /// ratios, zeros and adjacent sign changes.
    pub fn improper_scan(&self, cap: u32) -> ImproperScan {
        let points = self.domain.points_capped(cap);
        let mut values: BTreeMap<Point, Rat> = BTreeMap::new();
        let mut scan = ImproperScan::default();
        for &p in &points {
            match self.eval(p) {
                Err(WeightError::UndefinedRatio(i, j)) => {
                    scan.blocked_at = Some((i, j));
                    return scan;
                }
                Err(_) => continue,
                Ok(v) => {
                    if v.is_zero() && scan.zero_at.is_none() {
                        scan.zero_at = Some(p);
                    }
                    values.insert(p, v);
                }
            }
        }
        for (&p, v) in &values {
            for q in [(p.0 - 1, p.1), (p.0, p.1 - 1)] {
                if let Some(w) = values.get(&q) {
                    if (v.is_positive() && w.is_negative())
                        || (v.is_negative() && w.is_positive())
                    {
                        scan.sign_change_at.get_or_insert((q, p));
                    }
                }
            }
        }
        scan
    }

    /// Dump values as CSV rows `x1,x2,num,den` (finite domains in full,
    /// infinite ones through the window `cap`).
    pub fn to_csv(&self, cap: u32) -> Result<String, WeightError> {
        let points = match self.domain.points() {
            Ok(p) => p,
            Err(_) => self.domain.points_capped(cap),
        };
        let mut out = String::from("x1,x2,num,den\n");
        for p in points {
            let v = self.eval(p)?;
            out.push_str(&format!("{},{},{},{}\n", p.0, p.1, v.numer(), v.denom()));
        }
        Ok(out)
    }

    /// Parse a CSV dump back into a tabulated weight on `domain`.
    pub fn from_csv(domain: LatticeSet, text: &str) -> Result<WeightFunction, WeightError> {
        let mut table = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with("x1,") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            let err = |detail: &str| WeightError::Csv {
                line: idx + 1,
                detail: detail.to_string(),
            };
            if fields.len() != 4 {
                return Err(err("expected 4 fields"));
            }
            let x1: i64 = fields[0].trim().parse().map_err(|_| err("bad x1"))?;
            let x2: i64 = fields[1].trim().parse().map_err(|_| err("bad x2"))?;
            let v = parse_rat(&format!("{}/{}", fields[2].trim(), fields[3].trim()))
                .map_err(|e| err(&e.to_string()))?;
            table.insert((x1, x2), v);
        }
        Ok(WeightFunction::from_table(domain, table))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::frac;

    #[test]
    fn meixner_factor_values() {
        let f = Factor1D::Meixner {
            beta: int(1),
            c: frac(1, 2),
        };
        // (1)_3/3! (1/2)^3 = 1/8
        assert_eq!(f.eval(3).unwrap(), frac(1, 8));
    }

    #[test]
    fn charlier_factor_values() {
        let f = Factor1D::Charlier { a: int(2) };
        assert_eq!(f.eval(0).unwrap(), int(1));
        assert_eq!(f.eval(3).unwrap(), frac(8, 6));
    }

    #[test]
    fn krawtchouk_factor_sums_to_one() {
        let f = Factor1D::Krawtchouk { p: frac(1, 4), n: 5 };
        let (sum, tail) = f.moment_sum(0, 10).unwrap();
        assert_eq!(sum, int(1));
        assert_eq!(tail, int(0));
    }

    #[test]
    fn charlier_moment_sum_brackets_exponential() {
        // Σ a^t/t! = e^a; for a = 1 the partial sums converge to e ≈ 2.718...
        let f = Factor1D::Charlier { a: int(1) };
        let (partial, tail) = f.moment_sum(0, 80).unwrap();
        assert!(tail.is_positive());
        // e is between the partial sum and partial + tail: check against
        // rational brackets 2.7182818 < e < 2.7182819.
        let lo = frac(27_182_818, 10_000_000);
        let hi = frac(27_182_819, 10_000_000);
        assert!(partial < hi);
        assert!(&partial + &tail > lo);
        assert!(tail < frac(1, 1_000_000_000));
    }

    #[test]
    fn meixner_first_moment_exact_value() {
        // Σ t (β)_t/t! c^t = βc/(1-c)^{β+1} at β=1, c=1/2: 0.5/0.25 = 2.
        let f = Factor1D::Meixner {
            beta: int(1),
            c: frac(1, 2),
        };
        let (partial, tail) = f.moment_sum(1, 120).unwrap();
        assert!(partial <= int(2));
        assert!(&partial + &tail >= int(2));
        assert!(tail < frac(1, 100_000_000));
    }

    #[test]
    fn tail_certificate_fails_when_cap_too_small() {
        let f = Factor1D::Charlier { a: int(100) };
        // Ratio 100/(t+1) stays above 1 until t = 99 > cap.
        assert_eq!(
            f.moment_sum(0, 50),
            Err(WeightError::TailBound { cap: 50 })
        );
    }

    #[test]
    fn hahn_triangle_values() {
        let w = ClosedFormWeight::HahnTriangle {
            sigma: [int(0), int(0), int(0)],
            n: 4,
        };
        for p in LatticeSet::type_b_finite(4).points().unwrap() {
            assert_eq!(w.eval(p).unwrap(), int(1));
        }
        let w = ClosedFormWeight::HahnTriangle {
            sigma: [int(1), int(2), int(3)],
            n: 5,
        };
        // (2)_1/1! * (3)_0/0! * (4)_4/4! = 2 * 1 * 35 = 70
        assert_eq!(w.eval((1, 0)).unwrap(), int(70));
        assert!(w.eval((3, 3)).is_err());
    }

    #[test]
    fn krawtchouk_triangle_values() {
        let w = ClosedFormWeight::KrawtchoukTriangle {
            p1: frac(1, 4),
            p2: frac(1, 4),
            n: 2,
        };
        assert_eq!(w.eval((1, 1)).unwrap(), frac(1, 8));
        assert_eq!(w.eval((0, 0)).unwrap(), frac(1, 4));
    }

    #[test]
    fn ratio_weight_path_products() {
        // γ1 = (x1+1)/1, γ2 = (x2+1)/1 generate W(x) = x1! x2!.
        let r = RatioWeight::new(
            Poly::affine(int(1), int(0), int(1)),
            Poly::affine(int(0), int(1), int(1)),
            Poly::one(),
        );
        let w = WeightFunction::from_ratio(LatticeSet::type_a_finite(3, 3), r);
        assert_eq!(w.eval((2, 3)).unwrap(), int(12));
        assert_eq!(w.eval((0, 0)).unwrap(), int(1));
        assert!(w.eval((5, 0)).is_err());
    }

    #[test]
    fn blocked_ratio_reports_path_point() {
        // Denominator x1 - 1 vanishes at the path point (1, 0).
        let r = RatioWeight::new(
            Poly::one(),
            Poly::one(),
            Poly::affine(int(1), int(0), int(-1)),
        );
        let w = WeightFunction::from_ratio(LatticeSet::type_a_finite(3, 0), r);
        assert_eq!(w.eval((3, 0)), Err(WeightError::UndefinedRatio(1, 0)));
        let scan = w.improper_scan(10);
        assert_eq!(scan.blocked_at, Some((1, 0)));
        assert!(scan.is_improper());
    }

    #[test]
    fn scan_detects_zeros_and_sign_changes() {
        // γ2 = -1 alternates the sign along x2; γ1 = x1 puts a zero at (1, ·).
        let r = RatioWeight::new(
            Poly::x1(),
            Poly::constant(int(-1)),
            Poly::one(),
        );
        let w = WeightFunction::from_ratio(LatticeSet::type_a_finite(2, 2), r);
        let scan = w.improper_scan(10);
        assert_eq!(scan.zero_at, Some((1, 0)));
        assert!(scan.sign_change_at.is_some());
        assert!(scan.is_improper());
        assert!(w.materialize().is_err());
    }

    #[test]
    fn csv_round_trip() {
        let w = WeightFunction::from_closed_form(
            LatticeSet::type_b_finite(2),
            ClosedFormWeight::KrawtchoukTriangle {
                p1: frac(1, 4),
                p2: frac(1, 4),
                n: 2,
            },
        );
        let csv = w.to_csv(0).unwrap();
        assert!(csv.starts_with("x1,x2,num,den\n"));
        let back = WeightFunction::from_csv(LatticeSet::type_b_finite(2), &csv).unwrap();
        for p in LatticeSet::type_b_finite(2).points().unwrap() {
            assert_eq!(back.eval(p).unwrap(), w.eval(p).unwrap());
        }
    }
}
