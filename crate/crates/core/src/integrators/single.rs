use serde::{Deserialize, Serialize};

use super::{integrate, IntegralResult, Method, Tolerances};
use crate::domain::IntervalSet;
use crate::error::{Error, Result};
use crate::multifunctions::Selection;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleValuedResult {
    pub point: Vec<f64>,
    pub error_estimate: f64,
    /// The multivalued run on t ↦ {f(t)} that produced the point.
    pub result: IntegralResult,
}

/// ∫_A f for a selection f, computed by the multivalued McShane or Birkhoff
/// integrator on the point-valued map t ↦ {f(t)}. Sums of points are
/// points, so the value is a single vertex.
pub fn single_valued_integrate(
    f: &Selection,
    a: &IntervalSet,
    tol: &Tolerances,
    method: Method,
) -> Result<SingleValuedResult> {
    if !matches!(method, Method::McShane | Method::Birkhoff) {
        return Err(Error::InvalidInput(format!(
            "single-valued integration uses McShane or Birkhoff, not {method:?}"
        )));
    }
    let result = integrate(method, &f.as_multifunction(), a, tol)?;
    debug_assert!(result.value.is_point());
    Ok(SingleValuedResult {
        point: result.value.vertex(0).to_vec(),
        error_estimate: result.error_estimate,
        result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multifunctions::{
        catalog, steiner_selection, support_selection, CatalogSpec, SmoothCurve, Term,
    };

    fn curve(coeffs: Vec<f64>) -> Selection {
        let f = catalog(&CatalogSpec::SingleValuedWrap {
            f: SmoothCurve {
                components: vec![vec![Term::Poly { coeffs }]],
            },
        })
        .unwrap();
        steiner_selection(&f).unwrap()
    }

    #[test]
    fn identity_under_mcshane() {
        let seg = catalog(&CatalogSpec::SegmentGrowth {}).unwrap();
        let f = support_selection(&seg, &[1.0]).unwrap();
        let r = single_valued_integrate(
            &f,
            &IntervalSet::unit(),
            &Tolerances::new(1e-3, 2, 4, 1),
            Method::McShane,
        )
        .unwrap();
        assert!((r.point[0] - 0.5).abs() <= 1e-3);
    }

    #[test]
    fn constant_is_exact() {
        let f = curve(vec![2.5]);
        let a = IntervalSet::interval(0.125, 0.625).unwrap();
        for method in [Method::McShane, Method::Birkhoff] {
            let r =
                single_valued_integrate(&f, &a, &Tolerances::new(1e-3, 2, 4, 1), method).unwrap();
            assert_eq!(r.point, vec![1.25]);
        }
    }

    #[test]
    fn square_under_birkhoff() {
        let f = curve(vec![0.0, 0.0, 1.0]);
        let mut last = f64::INFINITY;
        for eps in [1e-2, 1e-3, 1e-4] {
            let r = single_valued_integrate(
                &f,
                &IntervalSet::unit(),
                &Tolerances::new(eps, 2, 4, 1),
                Method::Birkhoff,
            )
            .unwrap();
            let err = (r.point[0] - 1.0 / 3.0).abs();
            assert!(err <= r.error_estimate && err < last);
            last = err;
        }
    }

    #[test]
    fn other_methods_rejected() {
        let f = curve(vec![1.0]);
        let tol = Tolerances::new(1e-3, 2, 4, 1);
        assert!(single_valued_integrate(&f, &IntervalSet::unit(), &tol, Method::Pettis).is_err());
    }
}
