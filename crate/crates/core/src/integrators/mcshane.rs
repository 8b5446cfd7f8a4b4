use rayon::prelude::*;

use super::{
    check_domain, derive_seed, require_bound, riemann_sum, roundoff, singular_points,
    IntegralResult, Method, Tolerances, TraceEntry,
};
use crate::domain::{
    generate_mcshane_partition, midpoint_partition, Gauge, IntervalSet, TaggedPartition,
};
use crate::error::{Error, Result};
use crate::geometry::{hausdorff_distance, max_pairwise_distance, ConvexBody};
use crate::multifunctions::Multifunction;

/// Levels below this never stop the iteration, so that the estimate always
/// includes a measured distance to the previous level.
const MIN_LEVEL: u32 = 2;

/// Multivalued McShane integral over `a`.
///
/// Level k uses the gauge r = 2⁻ᵏ, shrunk to a distance-modulated gauge
/// around the jumps of F·𝟙_A. Each level forms the midpoint-tagged sum and
/// `tag_samples` random Δ-fine sums; the estimate is their Hausdorff
/// diameter plus leak·M, or the distance to the previous level if larger.
pub fn mcshane_integrate(
    f: &Multifunction,
    a: &IntervalSet,
    tol: &Tolerances,
) -> Result<IntegralResult> {
    tol.validate()?;
    check_domain(a)?;
    let bound = require_bound(f)?;
    if tol.leak * bound > tol.epsilon / 10.0 {
        return Err(Error::InvalidInput(format!(
            "leak·M = {} exceeds epsilon/10 = {}",
            tol.leak * bound,
            tol.epsilon / 10.0
        )));
    }
    if a.is_empty() {
        return Ok(IntegralResult::zero(Method::McShane, f.dim(), tol.m));
    }
    let singular = singular_points(f, a);
    let whole = *a == IntervalSet::unit();
    let mut trace: Vec<TraceEntry> = Vec::new();
    let mut prev: Option<ConvexBody> = None;
    let mut evals = 0u64;

    for k in 0..=tol.max_depth {
        let r = 0.5f64.powi(k as i32);
        let gauge = if singular.is_empty() {
            Gauge::constant(r)?
        } else {
            Gauge::distance_modulated(r * r, 0.5, singular.clone(), Some(r))?
        };
        let parts: Vec<TaggedPartition> = (0..=tol.tag_samples)
            .into_par_iter()
            .map(|i| match i {
                0 => midpoint_partition(&gauge),
                _ => generate_mcshane_partition(
                    &gauge,
                    tol.leak,
                    derive_seed(tol.seed, k as u64, i as u64),
                ),
            })
            .collect::<Result<_>>()?;
        let sums: Vec<ConvexBody> = parts
            .par_iter()
            .map(|p| {
                let terms: Vec<(f64, f64)> = p
                    .cells()
                    .iter()
                    .filter_map(|c| {
                        let mu = if whole {
                            c.set.measure()
                        } else {
                            c.set.intersection_measure(a)
                        };
                        (mu > 0.0).then_some((mu, c.tag))
                    })
                    .collect();
                riemann_sum(f, &terms)
            })
            .collect();
        evals += parts.iter().map(|p| p.cells().len() as u64).sum::<u64>();

        let spread = max_pairwise_distance(&sums)?;
        let leak = parts.iter().map(TaggedPartition::leak).fold(0.0, f64::max);
        let value = sums
            .into_iter()
            .next()
            .expect("the midpoint sum is always present");
        let h_prev = prev
            .as_ref()
            .map(|p| hausdorff_distance(&value, p))
            .transpose()?;
        let cells = parts.iter().map(|p| p.cells().len()).max().unwrap_or(0);
        let estimate =
            (spread + leak * bound).max(h_prev.unwrap_or(0.0)) + roundoff(cells, a, bound);
        trace.push(TraceEntry {
            method: Method::McShane,
            refinement_param: r,
            h_to_previous: h_prev,
            error_estimate: estimate,
            evals,
            value: Some(value.clone()),
        });
        if k >= MIN_LEVEL && estimate <= tol.epsilon {
            return Ok(IntegralResult {
                method: Method::McShane,
                value,
                error_estimate: estimate,
                trace,
                budget_used: evals,
                m: tol.grid(f.dim())?.len(),
                rigorous: false,
                notes: vec![format!(
                    "Δ-fine partitions sampled: {} random plus the midpoint partition per level",
                    tol.tag_samples
                )],
            });
        }
        prev = Some(value);
    }
    Err(Error::NoConvergence {
        method: Method::McShane,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multifunctions::{catalog, CatalogSpec};

    #[test]
    fn segment_growth_reaches_half() {
        let f = catalog(&CatalogSpec::SegmentGrowth {}).unwrap();
        let tol = Tolerances::new(1e-3, 16, 8, 3);
        let r = mcshane_integrate(&f, &IntervalSet::unit(), &tol).unwrap();
        let exact = ConvexBody::interval(0.0, 0.5).unwrap();
        assert!(hausdorff_distance(&r.value, &exact).unwrap() <= 1e-3);
        assert!(r.error_estimate <= 1e-3);
        let last = r.trace.last().unwrap();
        assert!(r.error_estimate >= last.h_to_previous.unwrap());
    }

    #[test]
    fn constant_body_is_exact() {
        let k = ConvexBody::from_points(&[[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]]).unwrap();
        let f = catalog(&CatalogSpec::ConstantK { k: k.clone() }).unwrap();
        let a = IntervalSet::interval(0.25, 0.75).unwrap();
        let r = mcshane_integrate(&f, &a, &Tolerances::new(1e-3, 16, 4, 0)).unwrap();
        assert!(crate::geometry::approx_eq(&r.value, &k.scale(0.5).unwrap()));
        for e in &r.trace {
            assert!(crate::geometry::approx_eq(
                e.value.as_ref().unwrap(),
                &k.scale(0.5).unwrap()
            ));
        }
    }

    #[test]
    fn empty_domain_gives_origin() {
        let f = catalog(&CatalogSpec::SegmentGrowth {}).unwrap();
        let r =
            mcshane_integrate(&f, &IntervalSet::empty(), &Tolerances::new(1e-3, 16, 4, 0)).unwrap();
        assert_eq!(r.value, ConvexBody::origin(1));
        assert_eq!(r.error_estimate, 0.0);
    }

    #[test]
    fn depth_budget_exhaustion() {
        let f = catalog(&CatalogSpec::SegmentGrowth {}).unwrap();
        let tol = Tolerances::new(1e-6, 16, 4, 0).with_max_depth(4);
        match mcshane_integrate(&f, &IntervalSet::unit(), &tol) {
            Err(Error::NoConvergence {
                method: Method::McShane,
                trace,
            }) => assert_eq!(trace.len(), 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_bound_refused() {
        let f =
            Multifunction::from_parts("bare", 1, std::sync::Arc::new(|_| ConvexBody::origin(1)));
        assert!(matches!(
            mcshane_integrate(&f, &IntervalSet::unit(), &Tolerances::new(1e-3, 16, 4, 0)),
            Err(Error::UnboundedMultifunction)
        ));
    }
}
