use serde::{Deserialize, Serialize};

use super::{aumann_integrate, integrate, IntegralResult, Method, Tolerances};
use crate::domain::IntervalSet;
use crate::error::{Error, Result};
use crate::geometry::{directed_by_projection, hausdorff_distance};
use crate::multifunctions::Multifunction;

/// A pairwise distance above this multiple of the combined estimate is a
/// violation.
pub const VIOLATION_FACTOR: f64 = 2.0;
/// Slack for the fan-refinement check: d(m) ≤ 1.1·d(m/2) + 1e-9.
pub const FAN_SLACK: (f64, f64) = (1.1, 1e-9);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<IntegralResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default)]
    pub non_converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairEntry {
    pub a: Method,
    pub b: Method,
    pub distance: f64,
    pub combined_estimate: f64,
    pub violation: bool,
}

/// The one-sided checks on the Aumann value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AumannCheck {
    /// Largest distance from an Aumann vertex to the Pettis body.
    pub containment_excess: f64,
    /// Pettis estimate plus Aumann estimate.
    pub containment_allowance: f64,
    pub contained: bool,
    pub coarse_m: Option<usize>,
    /// h(Aumann at m/2, Pettis at m).
    pub coarse_distance: Option<f64>,
    /// h(Aumann at m, Pettis at m).
    pub fine_distance: f64,
    pub monotone: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub multifunction: String,
    pub outcomes: Vec<Outcome>,
    pub pairs: Vec<PairEntry>,
    /// Rows and columns follow `outcomes`.
    pub distance_matrix: Vec<Vec<Option<f64>>>,
    pub estimate_matrix: Vec<Vec<Option<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aumann: Option<AumannCheck>,
    pub violations: Vec<Violation>,
}

impl ComparisonReport {
    pub fn has_violation(&self) -> bool {
        !self.violations.is_empty()
    }

    pub fn non_converged(&self) -> bool {
        self.outcomes.iter().any(|o| o.non_converged)
    }

    pub fn result(&self, m: Method) -> Option<&IntegralResult> {
        self.outcomes
            .iter()
            .find(|o| o.method == m)
            .and_then(|o| o.result.as_ref())
    }

    pub fn pair(&self, a: Method, b: Method) -> Option<&PairEntry> {
        self.pairs
            .iter()
            .find(|p| (p.a, p.b) == (a, b) || (p.a, p.b) == (b, a))
    }
}

/// Run all four integrators and cross-check them.
pub fn compare_all(
    f: &Multifunction,
    a: &IntervalSet,
    tol: &Tolerances,
) -> Result<ComparisonReport> {
    compare_methods(f, a, tol, &Method::ALL)
}

/// Run the given integrators and cross-check them. Integrator failures
/// are recorded in the report rather than returned.
///
/// McShane, Birkhoff and Pettis are compared symmetrically: a violation is
/// a distance above twice the sum of the two estimates. The Aumann value is
/// an inner approximation and is checked one-sidedly: it must lie inside
/// the Pettis body dilated by the two estimates, and its distance to the
/// Pettis value must not grow when the fan is refined from m/2 to m.
pub fn compare_methods(
    f: &Multifunction,
    a: &IntervalSet,
    tol: &Tolerances,
    methods: &[Method],
) -> Result<ComparisonReport> {
    if methods.is_empty() {
        return Err(Error::InvalidInput("no integrators requested".into()));
    }
    tol.validate()?;
    let mut methods = methods.to_vec();
    methods.sort();
    methods.dedup();

    let outcomes: Vec<Outcome> = methods
        .iter()
        .map(|&m| match integrate(m, f, a, tol) {
            Ok(r) => Outcome {
                method: m,
                result: Some(r),
                error: None,
                non_converged: false,
            },
            Err(e) => Outcome {
                method: m,
                result: None,
                non_converged: matches!(e, Error::NoConvergence { .. }),
                error: Some(e.to_string()),
            },
        })
        .collect();

    let n = outcomes.len();
    let mut distance_matrix = vec![vec![None; n]; n];
    let mut estimate_matrix = vec![vec![None; n]; n];
    let mut pairs = Vec::new();
    let mut violations = Vec::new();
    for i in 0..n {
        for j in i..n {
            let (Some(ri), Some(rj)) = (&outcomes[i].result, &outcomes[j].result) else {
                continue;
            };
            let d = hausdorff_distance(&ri.value, &rj.value)?;
            let e = ri.error_estimate + rj.error_estimate;
            distance_matrix[i][j] = Some(d);
            distance_matrix[j][i] = Some(d);
            estimate_matrix[i][j] = Some(e);
            estimate_matrix[j][i] = Some(e);
            if i == j {
                continue;
            }
            let symmetric = ri.method != Method::Aumann && rj.method != Method::Aumann;
            let violation = symmetric && d > VIOLATION_FACTOR * e;
            if violation {
                violations.push(Violation {
                    kind: "pair".into(),
                    detail: format!(
                        "h({:?}, {:?}) = {d:e} exceeds {VIOLATION_FACTOR} × {e:e}",
                        ri.method, rj.method
                    ),
                });
            }
            pairs.push(PairEntry {
                a: ri.method,
                b: rj.method,
                distance: d,
                combined_estimate: e,
                violation,
            });
        }
    }

    let find = |m: Method| {
        outcomes
            .iter()
            .find(|o| o.method == m)
            .and_then(|o| o.result.as_ref())
    };
    let aumann = match (find(Method::Aumann), find(Method::Pettis)) {
        (Some(au), Some(pe)) => Some(aumann_check(f, a, tol, au, pe, &mut violations)?),
        _ => None,
    };

    Ok(ComparisonReport {
        multifunction: f.name().to_string(),
        outcomes,
        pairs,
        distance_matrix,
        estimate_matrix,
        aumann,
        violations,
    })
}

fn aumann_check(
    f: &Multifunction,
    a: &IntervalSet,
    tol: &Tolerances,
    au: &IntegralResult,
    pe: &IntegralResult,
    violations: &mut Vec<Violation>,
) -> Result<AumannCheck> {
    let excess = directed_by_projection(&au.value, &pe.value);
    let allowance = pe.error_estimate + au.error_estimate;
    let contained = excess <= allowance;
    if !contained {
        violations.push(Violation {
            kind: "containment".into(),
            detail: format!("Aumann value leaves the Pettis body by {excess:e} > {allowance:e}"),
        });
    }
    let fine = hausdorff_distance(&au.value, &pe.value)?;
    let coarse_m = (f.dim() == 2 && tol.m.is_multiple_of(2) && tol.m / 2 >= 3).then_some(tol.m / 2);
    let coarse = match coarse_m {
        Some(cm) => {
            let coarse_tol = Tolerances {
                m: cm,
                ..tol.clone()
            };
            match aumann_integrate(f, a, &coarse_tol) {
                Ok(r) => Some(hausdorff_distance(&r.value, &pe.value)?),
                Err(Error::NoConvergence { .. }) => None,
                Err(e) => return Err(e),
            }
        }
        None => None,
    };
    let monotone = coarse.map(|c| fine <= FAN_SLACK.0 * c + FAN_SLACK.1);
    if monotone == Some(false) {
        violations.push(Violation {
            kind: "fan_refinement".into(),
            detail: format!(
                "Aumann distance to Pettis grew from {:e} to {fine:e}",
                coarse.unwrap_or(0.0)
            ),
        });
    }
    Ok(AumannCheck {
        containment_excess: excess,
        containment_allowance: allowance,
        contained,
        coarse_m,
        coarse_distance: coarse,
        fine_distance: fine,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::DeficitMode;
    use crate::multifunctions::{catalog, CatalogSpec};

    #[test]
    fn segment_growth_agrees() {
        let f = catalog(&CatalogSpec::SegmentGrowth {}).unwrap();
        let r = compare_all(&f, &IntervalSet::unit(), &Tolerances::new(1e-3, 16, 8, 5)).unwrap();
        assert!(!r.has_violation(), "{:?}", r.violations);
        assert_eq!(r.outcomes.len(), 4);
        assert_eq!(r.distance_matrix.len(), 4);
        for o in &r.outcomes {
            let v = &o.result.as_ref().unwrap().value;
            let h =
                hausdorff_distance(v, &crate::geometry::ConvexBody::interval(0.0, 0.5).unwrap())
                    .unwrap();
            assert!(h <= 1e-3, "{:?}: {h}", o.method);
        }
    }

    #[test]
    fn tiny_grid_on_a_curved_body_is_flagged() {
        let f = catalog(&CatalogSpec::ScaledDisk { m: 256 }).unwrap();
        let tol = Tolerances::new(1e-3, 4, 8, 5).with_deficit(DeficitMode::GridOnly);
        let r = compare_all(&f, &IntervalSet::unit(), &tol).unwrap();
        assert!(
            r.violations.iter().any(|v| v.kind == "pair"),
            "{:?}",
            r.pairs
        );
        // With the corner bound the same grid is honest about its gap.
        let r = compare_all(&f, &IntervalSet::unit(), &Tolerances::new(1e-3, 4, 8, 5)).unwrap();
        assert!(!r.has_violation(), "{:?}", r.violations);
    }

    #[test]
    fn empty_method_list_rejected() {
        let f = catalog(&CatalogSpec::SegmentGrowth {}).unwrap();
        assert!(compare_methods(
            &f,
            &IntervalSet::unit(),
            &Tolerances::new(1e-3, 16, 8, 5),
            &[]
        )
        .is_err());
    }
}
