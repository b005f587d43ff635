//! End-to-end classification reports.
//!
//! A report runs the full pipeline — admissibility, compatibility, weight
//! synthesis, boundary conditions, pointwise self-adjointness, consistency,
//! eigen-equations, orthogonality — stopping at the first hard failure and
//! recording every verdict reached. Reports are plain data with rationals
//! rendered as strings, serialized with a fixed field order, so identical
//! inputs produce byte-identical output.

use serde::Serialize;

use crate::admissible::{classify_admissible, eigen_level};
use crate::families::FamilySpec;
use crate::lattice::{LatticeSet, Point};
use crate::operator::DifferenceOperator;
use crate::pearson::{
    check_boundary_vanish, check_compatibility, check_consistency, check_weighted_self_adjoint,
    synthesize_weight, Compatibility, ConsistencyVerdict, PearsonError,
};
use crate::scalar::{format_rat, frac, Rat};
use crate::verify::{gram_matrix, verify_eigen, SumBound};
use crate::weight::{WeightError, WeightFunction};

/// Knobs of a report run; all defaults are recorded in the report header.
#[derive(Clone, Debug)]
pub struct ReportOptions {
    /// Degree bound for the admissibility certificate.
    pub nmax: u32,
    /// Maximal total degree of bases and test monomials.
    pub degrees: u32,
    /// Per-axis truncation cap for sums over infinite supports.
    pub cap: u32,
    /// Tolerance for truncated orthogonality and consistency intervals.
    pub tolerance: Rat,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            nmax: 8,
            degrees: 4,
            cap: 80,
            tolerance: frac(1, 10_000_000_000),
        }
    }
}

/// What to classify: a named family or a bare operator on a support.
#[derive(Clone, Debug)]
pub enum ReportSource {
    Family(FamilySpec),
    Operator {
        op: DifferenceOperator,
        lattice: LatticeSet,
    },
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ReportHeader {
    pub tool: &'static str,
    pub nmax: u32,
    pub degrees: u32,
    pub cap: u32,
    pub tolerance: String,
    pub family: Option<String>,
    pub lattice: LatticeSet,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct AdmissibleReport {
    pub admissible: bool,
    pub reason: Option<String>,
    pub detail: Option<String>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub lambda: Vec<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CompatibilityReport {
    pub verdict: String,
    pub witness: Option<Point>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct WeightReport {
    /// "ok", "improper-pole", "improper-zero", "incompatible", "degenerate",
    /// or "error".
    pub status: String,
    pub detail: Option<String>,
    pub sign_changes: bool,
    /// For family sources: the synthesized weight agrees with the closed
    /// form up to one global constant on the checked points.
    pub matches_closed_form: Option<bool>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PointwiseReport {
    pub holds: bool,
    pub witness: Option<Point>,
    pub points_checked: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub verdict: String,
    pub eps: Option<String>,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct EigenReport {
    pub holds: bool,
    pub members_checked: usize,
    pub witness: Option<(u32, u32)>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct OrthogonalityReport {
    pub holds: bool,
    pub pairs_checked: usize,
    pub max_cross_degree: String,
    /// For explicit family bases: whether the within-degree Gram blocks are
    /// diagonal as well.
    pub diagonal_within_degree: Option<bool>,
    pub witness: Option<String>,
}

/// The full pipeline verdicts. Stages after a hard failure are `None`.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ClassificationReport {
    pub header: ReportHeader,
    pub admissible: AdmissibleReport,
    pub compatibility: Option<CompatibilityReport>,
    pub weight: Option<WeightReport>,
    pub boundary_vanish: Option<bool>,
    pub self_adjoint: Option<PointwiseReport>,
    pub consistency: Option<ConsistencyReport>,
    pub eigen: Option<EigenReport>,
    pub orthogonality: Option<OrthogonalityReport>,
    pub pass: bool,
}

impl ClassificationReport {
    /// Stable serialized form (fixed key order, pretty-printed).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}

fn consistency_report(verdict: &ConsistencyVerdict) -> ConsistencyReport {
    match verdict {
        ConsistencyVerdict::ExactTrue => ConsistencyReport {
            verdict: "exact-true".into(),
            eps: None,
            witness: None,
        },
        ConsistencyVerdict::ApproxTrue { eps } => ConsistencyReport {
            verdict: "approx-true".into(),
            eps: Some(format_rat(eps)),
            witness: None,
        },
        ConsistencyVerdict::False { witness } => ConsistencyReport {
            verdict: "false".into(),
            eps: None,
            witness: Some(format!(
                "condition {} at monomial x1^{} x2^{}: {}",
                witness.condition, witness.monomial.0, witness.monomial.1, witness.value
            )),
        },
        ConsistencyVerdict::Inconclusive { reason } => ConsistencyReport {
            verdict: "inconclusive".into(),
            eps: None,
            witness: Some(reason.clone()),
        },
    }
}

/// Run the full pipeline.
pub fn full_report(source: &ReportSource, opts: &ReportOptions) -> ClassificationReport {
    let (op, lattice, family) = match source {
        ReportSource::Family(spec) => (spec.operator(), spec.lattice(), Some(spec.clone())),
        ReportSource::Operator { op, lattice } => (op.clone(), lattice.clone(), None),
    };
    full_report_with_weight(&op, &lattice, None, family.as_ref(), opts)
}

/// Run the pipeline with an externally supplied weight (e.g. loaded from a
/// dump) substituted for the synthesized one. Every stage downstream of the
/// weight then reproduces the verdicts the same weight produced originally.
pub fn full_report_with_weight(
    op: &DifferenceOperator,
    lattice: &LatticeSet,
    weight_override: Option<&WeightFunction>,
    family: Option<&FamilySpec>,
    opts: &ReportOptions,
) -> ClassificationReport {
    let header = ReportHeader {
        tool: "ortho2",
        nmax: opts.nmax,
        degrees: opts.degrees,
        cap: opts.cap,
        tolerance: format_rat(&opts.tolerance),
        family: family.map(|f| f.cli_name().to_string()),
        lattice: lattice.clone(),
    };
    let mut report = ClassificationReport {
        header,
        admissible: AdmissibleReport {
            admissible: false,
            reason: None,
            detail: None,
            a: None,
            b: None,
            lambda: Vec::new(),
        },
        compatibility: None,
        weight: None,
        boundary_vanish: None,
        self_adjoint: None,
        consistency: None,
        eigen: None,
        orthogonality: None,
        pass: false,
    };

    // Stage 1: admissibility.
    let params = match classify_admissible(op, opts.nmax) {
        Ok(p) => {
            report.admissible = AdmissibleReport {
                admissible: true,
                reason: None,
                detail: None,
                a: Some(format_rat(&p.a)),
                b: Some(format_rat(&p.b)),
                lambda: p.eigenvalues().iter().map(format_rat).collect(),
            };
            p
        }
        Err(rejection) => {
            report.admissible.reason = Some(rejection.code().to_string());
            report.admissible.detail = Some(rejection.to_string());
            return report;
        }
    };

    // Stage 2: compatibility.
    let compat = match check_compatibility(op, lattice) {
        Ok(c) => c,
        Err(PearsonError::DegenerateAlpha) => {
            report.compatibility = Some(CompatibilityReport {
                verdict: "degenerate".into(),
                witness: None,
            });
            return report;
        }
        Err(e) => {
            report.compatibility = Some(CompatibilityReport {
                verdict: format!("error: {e}"),
                witness: None,
            });
            return report;
        }
    };
    report.compatibility = Some(match &compat {
        Compatibility::PolynomialIdentity => CompatibilityReport {
            verdict: "identity".into(),
            witness: None,
        },
        Compatibility::PointwiseOnV => CompatibilityReport {
            verdict: "pointwise".into(),
            witness: None,
        },
        Compatibility::Fails { witness } => CompatibilityReport {
            verdict: "fails".into(),
            witness: Some(*witness),
        },
    });
    if !compat.holds() {
        return report;
    }

    // Stage 3: the weight. Synthesis is the ground truth; for family
    // sources the closed form is cross-checked against it (ratio constancy)
    // and used for the summation stages on infinite supports, where it
    // carries the tail bounds.
    let synthesized = weight_override
        .cloned()
        .map(Ok)
        .unwrap_or_else(|| synthesize_weight(op, lattice));
    let synthesized = match synthesized {
        Ok(w) => w,
        Err(e) => {
            let status = match &e {
                PearsonError::Weight(WeightError::UndefinedRatio(..)) => "improper-pole",
                PearsonError::Weight(WeightError::VanishesAt(..)) => "improper-zero",
                PearsonError::Incompatible { .. } => "incompatible",
                PearsonError::DegenerateAlpha => "degenerate",
                _ => "error",
            };
            report.weight = Some(WeightReport {
                status: status.into(),
                detail: Some(e.to_string()),
                sign_changes: false,
                matches_closed_form: None,
            });
            return report;
        }
    };
    let scan = synthesized.improper_scan(opts.cap.min(24));
    let mut weight_report = WeightReport {
        status: "ok".into(),
        detail: None,
        sign_changes: scan.sign_change_at.is_some(),
        matches_closed_form: None,
    };
    if let Some(p) = scan.blocked_at {
        weight_report.status = "improper-pole".into();
        weight_report.detail = Some(format!("undefined ratio at ({}, {})", p.0, p.1));
    } else if let Some(p) = scan.zero_at {
        weight_report.status = "improper-zero".into();
        weight_report.detail = Some(format!("weight vanishes at ({}, {})", p.0, p.1));
    }

    // Choose the weight driving the summation stages.
    let closed = family.map(|f| f.weight());
    let summation_weight = match (&closed, lattice.is_finite()) {
        (Some(cw), _) => cw,
        (None, _) => &synthesized,
    };
    if let Some(cw) = &closed {
        weight_report.matches_closed_form =
            Some(ratio_constant(&synthesized, cw, lattice, opts.cap.min(12)));
    }
    let improper = weight_report.status != "ok";
    report.weight = Some(weight_report);
    if improper {
        return report;
    }

    // Stage 4: boundary conditions (informative; recorded, not a stopper).
    report.boundary_vanish = Some(check_boundary_vanish(op));

    // Stage 5: pointwise self-adjointness of W·D at interior points
    // (window-restricted on infinite supports).
    let sa_domain = if lattice.is_finite() {
        lattice.clone()
    } else {
        windowed(lattice, opts.cap.min(12))
    };
    match check_weighted_self_adjoint(op, summation_weight, &sa_domain) {
        Ok(check) => {
            report.self_adjoint = Some(PointwiseReport {
                holds: check.holds,
                witness: check.witness,
                points_checked: check.points_checked,
            });
        }
        Err(e) => {
            report.self_adjoint = Some(PointwiseReport {
                holds: false,
                witness: None,
                points_checked: 0,
            });
            report.consistency = Some(ConsistencyReport {
                verdict: "inconclusive".into(),
                eps: None,
                witness: Some(e.to_string()),
            });
            return report;
        }
    }

    // Stage 6: consistency.
    let consistency = check_consistency(op, summation_weight, opts.degrees, opts.cap);
    report.consistency = Some(consistency_report(&consistency));

    // Stage 7: eigen-equations.
    let bases: Result<Vec<Vec<((u32, u32), crate::poly::Poly)>>, String> = match family {
        Some(spec) => {
            let max = spec
                .max_degree()
                .map_or(opts.degrees, |m| m.min(opts.degrees));
            (0..=max)
                .map(|n| {
                    spec.basis(n)
                        .map(|b| {
                            b.members
                                .into_iter()
                                .map(|m| (m.label, m.poly))
                                .collect::<Vec<_>>()
                        })
                        .map_err(|e| e.to_string())
                })
                .collect()
        }
        None => (0..=opts.degrees)
            .map(|n| eigen_level(op, &params, n).map_err(|e| e.to_string()))
            .collect(),
    };
    let bases = match bases {
        Ok(b) => b,
        Err(e) => {
            report.eigen = Some(EigenReport {
                holds: false,
                members_checked: 0,
                witness: None,
            });
            report.orthogonality = Some(OrthogonalityReport {
                holds: false,
                pairs_checked: 0,
                max_cross_degree: e,
                diagonal_within_degree: None,
                witness: None,
            });
            return report;
        }
    };
    let mut eigen = EigenReport {
        holds: true,
        members_checked: 0,
        witness: None,
    };
    for (n, level) in bases.iter().enumerate() {
        let lambda = match family {
            Some(spec) => spec.eigenvalue(n as u32),
            None => params.eigenvalue(n as u32),
        };
        for (label, poly) in level {
            eigen.members_checked += 1;
            if !verify_eigen(op, poly, &lambda) {
                eigen.holds = false;
                eigen.witness.get_or_insert(*label);
            }
        }
    }
    report.eigen = Some(eigen);

    // Stage 8: orthogonality (skipped when consistency failed outright).
    if consistency.holds() {
        report.orthogonality = Some(orthogonality_stage(
            &bases,
            summation_weight,
            opts,
            family.is_some(),
        ));
    }

    report.pass = report.admissible.admissible
        && compat.holds()
        && report.boundary_vanish == Some(true)
        && report.self_adjoint.as_ref().is_some_and(|r| r.holds)
        && consistency.holds()
        && report.eigen.as_ref().is_some_and(|r| r.holds)
        && report.orthogonality.as_ref().is_some_and(|r| r.holds);
    report
}

fn windowed(lattice: &LatticeSet, cap: u32) -> LatticeSet {
    let pts = lattice.points_capped(cap);
    LatticeSet::explicit(pts).expect("window of a closed set is closed")
}

/// True when `a / b` is the same nonzero constant at every checked point.
fn ratio_constant(a: &WeightFunction, b: &WeightFunction, v: &LatticeSet, cap: u32) -> bool {
    let points = match v.points() {
        Ok(p) => p,
        Err(_) => v.points_capped(cap),
    };
    let mut ratio: Option<Rat> = None;
    for p in points {
        let (va, vb) = match (a.eval(p), b.eval(p)) {
            (Ok(x), Ok(y)) => (x, y),
            _ => return false,
        };
        if va.numer().bits() == 0 {
            return false;
        }
        let r = vb / va;
        match &ratio {
            None => ratio = Some(r),
            Some(r0) => {
                if &r != r0 {
                    return false;
                }
            }
        }
    }
    ratio.is_some()
}

fn orthogonality_stage(
    bases: &[Vec<((u32, u32), crate::poly::Poly)>],
    w: &WeightFunction,
    opts: &ReportOptions,
    explicit_family: bool,
) -> OrthogonalityReport {
    let mut flat = Vec::new();
    let mut degrees = Vec::new();
    for (n, level) in bases.iter().enumerate() {
        for (label, poly) in level {
            flat.push(poly.clone());
            degrees.push((n as u32, *label));
        }
    }
    let gram = match gram_matrix(&flat, w, opts.cap) {
        Ok(g) => g,
        Err(e) => {
            return OrthogonalityReport {
                holds: false,
                pairs_checked: 0,
                max_cross_degree: e.to_string(),
                diagonal_within_degree: None,
                witness: None,
            }
        }
    };
    let entry_ok = |e: &SumBound| {
        if e.is_exact() {
            e.lo == Rat::from_integer(0.into())
        } else {
            e.within(&opts.tolerance)
        }
    };
    let mut out = OrthogonalityReport {
        holds: true,
        pairs_checked: 0,
        max_cross_degree: "0".into(),
        diagonal_within_degree: if explicit_family { Some(true) } else { None },
        witness: None,
    };
    let mut max_cross = Rat::from_integer(0.into());
    for i in 0..flat.len() {
        for j in (i + 1)..flat.len() {
            let entry = &gram[i][j];
            if degrees[i].0 != degrees[j].0 {
                out.pairs_checked += 1;
                let bound = entry.abs_bound();
                if bound > max_cross {
                    max_cross = bound;
                }
                if !entry_ok(entry) {
                    out.holds = false;
                    out.witness.get_or_insert(format!(
                        "degrees {} and {}, members {:?} / {:?}: {}",
                        degrees[i].0,
                        degrees[j].0,
                        degrees[i].1,
                        degrees[j].1,
                        entry.display()
                    ));
                }
            } else if explicit_family && !entry_ok(entry) {
                out.diagonal_within_degree = Some(false);
            }
        }
    }
    out.max_cross_degree = format_rat(&max_cross);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};

    #[test]
    fn hahn_family_report_passes_all_stages() {
        let spec = FamilySpec::Hahn2D {
            sigma: [int(1), int(1), int(1)],
            n: 4,
        };
        let report = full_report(&ReportSource::Family(spec), &ReportOptions::default());
        assert!(report.admissible.admissible);
        assert_eq!(report.admissible.a.as_deref(), Some("-1"));
        assert_eq!(report.admissible.b.as_deref(), Some("-6"));
        assert_eq!(
            report.compatibility.as_ref().unwrap().verdict,
            "identity"
        );
        assert_eq!(report.weight.as_ref().unwrap().status, "ok");
        assert_eq!(report.weight.as_ref().unwrap().matches_closed_form, Some(true));
        assert_eq!(report.boundary_vanish, Some(true));
        assert!(report.self_adjoint.as_ref().unwrap().holds);
        assert_eq!(report.consistency.as_ref().unwrap().verdict, "exact-true");
        assert!(report.eigen.as_ref().unwrap().holds);
        let ortho = report.orthogonality.as_ref().unwrap();
        assert!(ortho.holds);
        assert_eq!(ortho.max_cross_degree, "0");
        assert_eq!(ortho.diagonal_within_degree, Some(true));
        assert!(report.pass);
    }

    #[test]
    fn report_is_byte_deterministic() {
        let spec = FamilySpec::Krawtchouk2D {
            p1: frac(1, 4),
            p2: frac(1, 4),
            n: 3,
        };
        let a = full_report(&ReportSource::Family(spec.clone()), &ReportOptions::default());
        let b = full_report(&ReportSource::Family(spec), &ReportOptions::default());
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn rejected_operator_stops_at_admissibility() {
        let op = DifferenceOperator {
            a11: crate::poly::Poly::monomial(3, 0, int(1)),
            ..DifferenceOperator::zero()
        };
        let report = full_report(
            &ReportSource::Operator {
                op,
                lattice: LatticeSet::type_b_finite(3),
            },
            &ReportOptions::default(),
        );
        assert!(!report.admissible.admissible);
        assert_eq!(report.admissible.reason.as_deref(), Some("wrong-degree"));
        assert!(report.compatibility.is_none());
        assert!(!report.pass);
    }
}
