use proptest::prelude::*;
use setint::geometry::{
    embed, hausdorff_distance, reconstruct, steiner_point, sup_norm_distance,
    weighted_minkowski_sum, ConvexBody, DirectionGrid,
};

fn polygon() -> impl Strategy<Value = ConvexBody> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..12).prop_map(|pts| {
        ConvexBody::from_points(&pts.iter().map(|&(x, y)| [x, y]).collect::<Vec<_>>()).unwrap()
    })
}

fn direction() -> impl Strategy<Value = [f64; 2]> {
    (0.0..std::f64::consts::TAU).prop_map(|a| [a.cos(), a.sin()])
}

fn magnitude(bodies: &[&ConvexBody]) -> f64 {
    1.0 + bodies.iter().map(|b| b.norm()).sum::<f64>()
}

/// O(n³) hull: (i, j) is an edge when no point lies strictly right of the
/// line through them, and a collinear point never lies outside the segment.
fn brute_force_hull(pts: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut out: Vec<[f64; 2]> = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        for (j, q) in pts.iter().enumerate() {
            if i == j || p == q {
                continue;
            }
            let edge = pts.iter().all(|r| {
                let cross = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
                if cross != 0.0 {
                    return cross > 0.0;
                }
                let t = (r[0] - p[0]) * (q[0] - p[0]) + (r[1] - p[1]) * (q[1] - p[1]);
                let len2 = (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2);
                (0.0..=len2).contains(&t)
            });
            if edge {
                out.push(*p);
                out.push(*q);
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn hull_matches_brute_force(pts in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 3..40)) {
        let pts: Vec<[f64; 2]> = pts.into_iter().map(|(x, y)| [x, y]).collect();
        let body = ConvexBody::from_points(&pts).unwrap();
        let mut ours: Vec<[f64; 2]> = body.vertices().map(|v| [v[0], v[1]]).collect();
        ours.sort_by(|a, b| a.partial_cmp(b).unwrap());
        prop_assert_eq!(ours, brute_force_hull(&pts));
    }

    #[test]
    fn support_is_additive(a in polygon(), b in polygon(), u in direction(), lambda in 0.0..3.0f64) {
        let sum = weighted_minkowski_sum(&[(1.0, &a), (lambda, &b)]).unwrap();
        let lhs = sum.support(&u).unwrap();
        let rhs = a.support(&u).unwrap() + lambda * b.support(&u).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * magnitude(&[&a, &b]) * (1.0 + lambda));
    }

    #[test]
    fn support_point_attains_support(a in polygon(), u in direction()) {
        let p = a.support_point(&u).unwrap();
        prop_assert_eq!(p[0] * u[0] + p[1] * u[1], a.support(&u).unwrap());
    }

    #[test]
    fn embedding_is_linear(a in polygon(), b in polygon(), lambda in 0.0..3.0f64, m in 3usize..200) {
        let grid = DirectionGrid::new(2, m).unwrap();
        let sum = a.minkowski_sum(&b).unwrap();
        let lhs = embed(&sum, &grid).unwrap();
        let rhs = embed(&a, &grid).unwrap().add(&embed(&b, &grid).unwrap()).unwrap();
        let tol = 1e-12 * magnitude(&[&a, &b]);
        prop_assert!(sup_norm_distance(&lhs, &rhs).unwrap() <= tol);
        let scaled = embed(&a.scale(lambda).unwrap(), &grid).unwrap();
        let expected = embed(&a, &grid).unwrap().scale(lambda).unwrap();
        prop_assert!(sup_norm_distance(&scaled, &expected).unwrap() <= tol * (1.0 + lambda));
    }

    #[test]
    fn hausdorff_is_a_metric(a in polygon(), b in polygon(), c in polygon()) {
        let ab = hausdorff_distance(&a, &b).unwrap();
        prop_assert_eq!(ab, hausdorff_distance(&b, &a).unwrap());
        prop_assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
        let ac = hausdorff_distance(&a, &c).unwrap();
        let cb = hausdorff_distance(&c, &b).unwrap();
        prop_assert!(ab <= ac + cb + 1e-12 * magnitude(&[&a, &b, &c]));
    }

    #[test]
    fn grid_distance_never_exceeds_hausdorff(a in polygon(), b in polygon(), m in 3usize..400) {
        let grid = DirectionGrid::new(2, m).unwrap();
        let d = sup_norm_distance(&embed(&a, &grid).unwrap(), &embed(&b, &grid).unwrap()).unwrap();
        prop_assert!(d <= hausdorff_distance(&a, &b).unwrap() + 1e-12 * magnitude(&[&a, &b]));
    }

    #[test]
    fn boxes_survive_the_round_trip(x0 in -2.0..2.0f64, y0 in -2.0..2.0f64, w in 0.01..2.0f64, h in 0.01..2.0f64, k in 1usize..8) {
        let r = ConvexBody::rectangle([x0, y0], [x0 + w, y0 + h]).unwrap();
        let back = reconstruct(&embed(&r, &DirectionGrid::new(2, 4 * k).unwrap()).unwrap()).unwrap();
        prop_assert!(hausdorff_distance(&r, &back).unwrap() <= 1e-12 * magnitude(&[&r]));
        prop_assert_eq!(back.vertex_count(), 4);
    }

    #[test]
    fn steiner_point_is_additive_and_inside(a in polygon(), b in polygon(), lambda in 0.0..3.0f64) {
        let sa = steiner_point(&a).unwrap();
        let sb = steiner_point(&b).unwrap();
        let s_sum = steiner_point(&a.minkowski_sum(&b).unwrap()).unwrap();
        let tol = 1e-12 * magnitude(&[&a, &b]);
        prop_assert!((s_sum[0] - sa[0] - sb[0]).abs() <= tol && (s_sum[1] - sa[1] - sb[1]).abs() <= tol);
        let s_scaled = steiner_point(&a.scale(lambda).unwrap()).unwrap();
        prop_assert!((s_scaled[0] - lambda * sa[0]).abs() <= tol * (1.0 + lambda));
        prop_assert!(a.contains(&sa, tol).unwrap());
    }
}
