use rayon::prelude::*;

use super::pettis::pieces;
use super::quadrature::{adaptive_simpson_global, Quadrature};
use super::{check_domain, IntegralResult, Method, Tolerances, TraceEntry};
use crate::domain::IntervalSet;
use crate::error::{Error, Result};
use crate::geometry::{embed, hausdorff_distance, reconstruct, ConvexBody};
use crate::multifunctions::{steiner_selection, support_selection, Multifunction, Selection};

const PANELS: usize = 4;
const MAX_EVALS: u64 = 400_000;

/// Inner approximation of the Aumann integral: the hull of the integrals of
/// the support selections for every grid direction plus the Steiner
/// selection.
///
/// Each selection is integrated by globally adaptive vector Simpson with
/// per-component tolerance epsilon/4, which copes with the jumps support
/// selections have when a face of F(t) turns through a grid direction. The
/// estimate is the gap between the hull and the polygon cut out by its own
/// grid support lines, plus the quadrature error.
pub fn aumann_integrate(
    f: &Multifunction,
    a: &IntervalSet,
    tol: &Tolerances,
) -> Result<IntegralResult> {
    tol.validate()?;
    check_domain(a)?;
    if f.dim() > 2 {
        return Err(Error::Unsupported(
            "Aumann selections in dimension 3".into(),
        ));
    }
    let grid = tol.grid(f.dim())?;
    if a.is_empty() {
        return Ok(IntegralResult::zero(Method::Aumann, f.dim(), grid.len()));
    }
    let mut selections: Vec<Selection> = grid
        .directions()
        .map(|d| support_selection(f, d))
        .collect::<Result<_>>()?;
    selections.push(steiner_selection(f)?);

    let pieces = pieces(f, a);
    let tol_each = tol.epsilon / 4.0;
    let integrals: Vec<Quadrature> = selections
        .par_iter()
        .map(|s| adaptive_simpson_global(&|t| s.eval(t), &pieces, tol_each, PANELS, MAX_EVALS))
        .collect();
    let evals: u64 = integrals.iter().map(|q| q.evals).sum();
    let quad = integrals
        .iter()
        .map(Quadrature::error_norm)
        .fold(0.0, f64::max);
    let entry = |estimate: f64, value: Option<ConvexBody>| TraceEntry {
        method: Method::Aumann,
        refinement_param: grid.len() as f64,
        h_to_previous: None,
        error_estimate: estimate,
        evals,
        value,
    };
    if integrals.iter().any(|q| !q.converged) {
        return Err(Error::NoConvergence {
            method: Method::Aumann,
            trace: vec![entry(quad, None)],
        });
    }

    let points: Vec<&[f64]> = integrals.iter().map(|q| q.value.as_slice()).collect();
    let value = ConvexBody::from_points(&points)?;
    let outer = reconstruct(&embed(&value, &grid)?)?;
    let gap = hausdorff_distance(&value, &outer)?;
    let estimate = gap + quad;
    Ok(IntegralResult {
        method: Method::Aumann,
        value: value.clone(),
        error_estimate: estimate,
        trace: vec![entry(estimate, Some(value))],
        budget_used: evals,
        m: grid.len(),
        rigorous: false,
        notes: vec![format!(
            "{} selections, quadrature {quad:e}, fan gap {gap:e}",
            selections.len()
        )],
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::multifunctions::{catalog, CatalogSpec};

    #[test]
    fn segment_growth_selection_hull() {
        let f = catalog(&CatalogSpec::SegmentGrowth {}).unwrap();
        let r =
            aumann_integrate(&f, &IntervalSet::unit(), &Tolerances::new(1e-3, 16, 4, 0)).unwrap();
        assert_eq!(r.value, ConvexBody::interval(0.0, 0.5).unwrap());
        assert_eq!(r.error_estimate, 0.0);
    }

    #[test]
    fn scaled_disk_gives_the_inscribed_polygon() {
        let m = 64;
        let f = catalog(&CatalogSpec::ScaledDisk { m }).unwrap();
        let r =
            aumann_integrate(&f, &IntervalSet::unit(), &Tolerances::new(1e-3, m, 4, 0)).unwrap();
        let half = ConvexBody::regular_polygon(m, 0.5).unwrap();
        assert!(hausdorff_distance(&r.value, &half).unwrap() < 1e-12);
        // Its distance to the true half disk is the inscribed-polygon deficit.
        let disk = ConvexBody::regular_polygon(1 << 14, 0.5).unwrap();
        let h = hausdorff_distance(&r.value, &disk).unwrap();
        assert!((h - 0.5 * (1.0 - (PI / m as f64).cos())).abs() < 1e-8);
    }

    #[test]
    fn rotating_segment_selections_land_on_the_circle() {
        let f = catalog(&CatalogSpec::RotatingSegment {}).unwrap();
        let r =
            aumann_integrate(&f, &IntervalSet::unit(), &Tolerances::new(1e-4, 32, 4, 0)).unwrap();
        for v in r.value.vertices() {
            assert!((v[0].hypot(v[1]) - 2.0 / PI).abs() < 1e-4, "{v:?}");
        }
        assert_eq!(r.value.vertex_count(), 32);
    }
}
