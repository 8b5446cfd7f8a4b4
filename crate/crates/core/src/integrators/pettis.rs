use super::quadrature::adaptive_simpson;
use super::{check_domain, DeficitMode, IntegralResult, Method, Tolerances, TraceEntry};
use crate::domain::IntervalSet;
use crate::error::{Error, Result};
use crate::geometry::{reconstruct_report, ConvexBody, DirectionGrid, SupportVector};
use crate::multifunctions::Multifunction;

/// Initial uniform panels per continuous piece.
const PANELS: usize = 16;

/// Multivalued Pettis integral: the body whose support in each grid
/// direction d is ∫_A δ*(d, F(t)) dt.
///
/// All m support integrals are computed in one vector-valued adaptive
/// Simpson pass with per-component tolerance epsilon/(4m); the jumps of F
/// and the ends of A's intervals are forced break points. The estimate adds
/// the quadrature error, the re-embedding discrepancy of the reconstruction
/// and (in [`DeficitMode::Corner`]) a bound on how far the reconstructed
/// polygon can stick out of the true integral between grid directions.
pub fn pettis_integrate(
    f: &Multifunction,
    a: &IntervalSet,
    tol: &Tolerances,
) -> Result<IntegralResult> {
    tol.validate()?;
    check_domain(a)?;
    if f.dim() > 2 {
        return Err(Error::Unsupported(
            "Pettis reconstruction in dimension 3".into(),
        ));
    }
    let grid = tol.grid(f.dim())?;
    if a.is_empty() {
        return Ok(IntegralResult::zero(Method::Pettis, f.dim(), grid.len()));
    }
    let pieces = pieces(f, a);
    let dirs: Vec<Vec<f64>> = grid.directions().map(<[f64]>::to_vec).collect();
    let integrand = |t: f64| {
        let body = f.eval(t);
        dirs.iter()
            .map(|d| body.support_unchecked(d))
            .collect::<Vec<f64>>()
    };
    let q = adaptive_simpson(
        &integrand,
        &pieces,
        tol.epsilon / (4.0 * grid.len() as f64),
        PANELS,
    );
    let quad = q.max_error();
    let entry = |estimate: f64, value: Option<ConvexBody>| TraceEntry {
        method: Method::Pettis,
        refinement_param: grid.len() as f64,
        h_to_previous: None,
        error_estimate: estimate,
        evals: q.evals,
        value,
    };
    if !q.converged {
        return Err(Error::NoConvergence {
            method: Method::Pettis,
            trace: vec![entry(quad, None)],
        });
    }

    let sv = SupportVector::new(grid.clone(), q.value)?;
    let (value, excess) = reconstruct_report(&sv, sv.default_tolerance().max(4.0 * quad))?;
    let deficit = match tol.pettis_deficit {
        DeficitMode::Corner => corner_deficit(&value, &grid),
        DeficitMode::GridOnly => 0.0,
    };
    let estimate = quad + excess + deficit;
    Ok(IntegralResult {
        method: Method::Pettis,
        value: value.clone(),
        error_estimate: estimate,
        trace: vec![entry(estimate, Some(value))],
        budget_used: q.evals,
        m: grid.len(),
        rigorous: tol.pettis_deficit == DeficitMode::Corner,
        notes: vec![format!(
            "quadrature {quad:e}, re-embedding {excess:e}, reconstruction gap {deficit:e}"
        )],
    })
}

/// The intervals of A, cut at the jumps of F.
pub(super) fn pieces(f: &Multifunction, a: &IntervalSet) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(lo, hi) in a.intervals() {
        let mut start = lo;
        for &j in f.jumps().iter().filter(|&&j| j > lo && j < hi) {
            out.push((start, j));
            start = j;
        }
        out.push((start, hi));
    }
    out
}

/// sup over x in P of dist(x, C), for any convex C whose support values on
/// the grid equal those of the polygon P = ∩ {⟨d_j, x⟩ ≤ I_j}.
///
/// The supremum is attained at a vertex v of P. If some grid direction lies
/// strictly inside v's normal cone, its support line meets P only at v, so
/// v ∈ C. Otherwise C touches both edges at v, and v is no farther from C
/// than from the chord joining the far ends of those edges.
pub(super) fn corner_deficit(p: &ConvexBody, grid: &DirectionGrid) -> f64 {
    let n = p.vertex_count();
    if p.dim() != 2 || n < 3 {
        return 0.0;
    }
    let v = |i: usize| {
        let x = p.vertex(i % n);
        [x[0], x[1]]
    };
    let outward = |a: [f64; 2], b: [f64; 2]| {
        let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
        let l = ex.hypot(ey);
        [ey / l, -ex / l]
    };
    let mut worst = 0.0f64;
    for i in 0..n {
        let (prev, cur, next) = (v(i + n - 1), v(i), v(i + 1));
        let (n0, n1) = (outward(prev, cur), outward(cur, next));
        // Edge normals are grid directions up to the rounding of the
        // vertices, so a direction must clear both by more than that.
        let inside = grid
            .directions()
            .any(|d| n0[0] * d[1] - n0[1] * d[0] > 1e-9 && d[0] * n1[1] - d[1] * n1[0] > 1e-9);
        if !inside {
            worst = worst.max(segment_distance(prev, next, cur));
        }
    }
    worst
}

fn segment_distance(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (ap[0] - t * ab[0]).hypot(ap[1] - t * ab[1])
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::geometry::hausdorff_distance;
    use crate::multifunctions::{catalog, CatalogSpec};

    #[test]
    fn segment_growth_supports() {
        let f = catalog(&CatalogSpec::SegmentGrowth {}).unwrap();
        let r =
            pettis_integrate(&f, &IntervalSet::unit(), &Tolerances::new(1e-3, 256, 4, 0)).unwrap();
        assert!((r.value.support(&[1.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!(r.value.support(&[-1.0]).unwrap().abs() < 1e-15);
        assert_eq!(r.m, 2);
    }

    #[test]
    fn rotating_segment_integrates_to_a_disk() {
        let f = catalog(&CatalogSpec::RotatingSegment {}).unwrap();
        let m = 256;
        let r =
            pettis_integrate(&f, &IntervalSet::unit(), &Tolerances::new(1e-3, m, 4, 0)).unwrap();
        let grid = DirectionGrid::new(2, m).unwrap();
        for d in grid.directions() {
            assert!((r.value.support(d).unwrap() - 2.0 / PI).abs() < 1e-6);
        }
        // Against the true disk the gap is the circumscribed-polygon excess.
        let excess = 2.0 / PI * (1.0 / (PI / m as f64).cos() - 1.0);
        assert!(r.error_estimate >= excess);
        assert!(r.error_estimate < 1e-3);
    }

    #[test]
    fn constant_is_exact() {
        let k = ConvexBody::from_points(&[[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]]).unwrap();
        let f = catalog(&CatalogSpec::ConstantK { k: k.clone() }).unwrap();
        let a = IntervalSet::new(vec![(0.0, 0.25), (0.5, 0.75)]).unwrap();
        let r = pettis_integrate(&f, &a, &Tolerances::new(1e-3, 64, 4, 0)).unwrap();
        let half = k.scale(0.5).unwrap();
        for d in DirectionGrid::new(2, 64).unwrap().directions() {
            assert!((r.value.support(d).unwrap() - half.support(d).unwrap()).abs() < 1e-10);
        }
        // The hypotenuse normal is off the grid, so the polygon overshoots
        // there, within the corner bound.
        let h = hausdorff_distance(&r.value, &half).unwrap();
        assert!(h > 1e-10 && h <= r.error_estimate);
    }

    #[test]
    fn rounded_edge_normals_do_not_pin_a_spike() {
        // ½A ⊕ ½B has edges off the 256-grid; the spikes the reconstruction
        // puts there must all be counted.
        let a = ConvexBody::rectangle([-0.5, -0.5], [0.5, 0.5]).unwrap();
        let b = ConvexBody::from_points(&[[0.0, -0.2], [1.0, 0.3], [0.2, 0.9]]).unwrap();
        let exact = a
            .scale(0.5)
            .unwrap()
            .minkowski_sum(&b.scale(0.5).unwrap())
            .unwrap();
        let f = catalog(&CatalogSpec::PolytopeInterp { a, b }).unwrap();
        let r =
            pettis_integrate(&f, &IntervalSet::unit(), &Tolerances::new(1e-3, 256, 4, 0)).unwrap();
        assert!(hausdorff_distance(&r.value, &exact).unwrap() <= r.error_estimate);
    }

    #[test]
    fn corner_bound_vanishes_when_vertices_are_pinned() {
        let sq = ConvexBody::rectangle([-1.0, -1.0], [1.0, 1.0]).unwrap();
        assert_eq!(corner_deficit(&sq, &DirectionGrid::new(2, 8).unwrap()), 0.0);
        // With only the axis directions nothing pins the corners.
        let d = corner_deficit(&sq, &DirectionGrid::new(2, 4).unwrap());
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn corner_bound_covers_the_circumscribed_gap() {
        for m in [8usize, 32, 256] {
            let f = catalog(&CatalogSpec::ScaledDisk { m: 1024 }).unwrap();
            let r = pettis_integrate(&f, &IntervalSet::unit(), &Tolerances::new(1e-4, m, 4, 0))
                .unwrap();
            let gap = 0.5 * (1.0 / (PI / m as f64).cos() - 1.0);
            assert!(r.error_estimate >= gap, "m = {m}");
        }
    }

    #[test]
    fn grid_only_mode_drops_the_gap() {
        let f = catalog(&CatalogSpec::ScaledDisk { m: 256 }).unwrap();
        let tol = Tolerances::new(1e-3, 4, 4, 0).with_deficit(DeficitMode::GridOnly);
        let r = pettis_integrate(&f, &IntervalSet::unit(), &tol).unwrap();
        assert!(r.error_estimate < 1e-9);
        assert!(!r.rigorous);
    }
}
