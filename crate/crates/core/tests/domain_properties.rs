use proptest::prelude::*;
use setint::domain::{
    generate_birkhoff_partition, generate_mcshane_partition, is_fine, midpoint_partition,
    sample_tags, Gauge,
};
use setint::geometry::ConvexBody;
use setint::multifunctions::{
    catalog, standard_specs, steiner_selection, support_selection, CatalogSpec,
};

fn gauges() -> Vec<Gauge> {
    vec![
        Gauge::constant(0.3).unwrap(),
        Gauge::constant(0.01).unwrap(),
        Gauge::piecewise(vec![0.25, 0.5], vec![0.05, 0.2, 0.02]).unwrap(),
        Gauge::distance_modulated(1e-4, 0.1, vec![0.5], None).unwrap(),
        Gauge::distance_modulated(1e-3, 0.5, vec![0.0, 1.0 / 3.0, 1.0], Some(0.1)).unwrap(),
    ]
}

#[test]
fn generated_partitions_are_fine_and_account_for_leak() {
    for (i, g) in gauges().iter().enumerate() {
        for seed in 0..100 {
            for leak in [0.0, 1e-6] {
                let p = generate_mcshane_partition(g, leak, seed).unwrap();
                assert!(is_fine(&p, g), "gauge {i}, seed {seed}");
                assert!(p.leak() <= leak + 1e-15);
                assert!(
                    (p.covered_measure() + p.leak() - 1.0).abs() < 1e-12,
                    "gauge {i}, seed {seed}"
                );
            }
        }
        assert!(is_fine(&midpoint_partition(g).unwrap(), g));
    }
}

#[test]
fn gauges_stay_positive() {
    for g in gauges() {
        for k in 0..=10_000 {
            assert!(g.radius(k as f64 / 10_000.0) > 0.0);
        }
    }
}

#[test]
fn dyadic_cells_have_exact_measure() {
    for k in 0..=12u32 {
        let cells = generate_birkhoff_partition(k).unwrap();
        assert_eq!(cells.len(), 1 << k);
        let w = 0.5f64.powi(k as i32);
        for (j, c) in cells.iter().enumerate() {
            assert_eq!(c.measure(), w);
            assert_eq!(c.intervals(), &[(j as f64 * w, (j + 1) as f64 * w)]);
        }
    }
}

proptest! {
    #[test]
    fn sampled_tags_lie_in_their_cells(k in 0u32..8, count in 1usize..40, seed in any::<u64>()) {
        let cells = generate_birkhoff_partition(k).unwrap();
        let tags = sample_tags(&cells, count, seed);
        prop_assert_eq!(tags.len(), count);
        for ts in &tags {
            for (c, &t) in cells.iter().zip(ts) {
                prop_assert!(c.contains(t), "tag {} outside {:?}", t, c.intervals());
            }
        }
    }

    #[test]
    fn support_selections_attain_the_support(entry in 0usize..7, angle in 0.0..std::f64::consts::TAU, t in 0.0..1.0f64) {
        let spec = standard_specs()[entry].clone();
        let f = catalog(&spec).unwrap();
        if f.dim() == 2 {
            let u = [angle.cos(), angle.sin()];
            let s = support_selection(&f, &u).unwrap();
            let p = s.eval(t);
            let body = f.eval(t);
            let h = body.support(&u).unwrap();
            prop_assert!((p[0] * u[0] + p[1] * u[1] - h).abs() <= 1e-14 * (1.0 + body.norm()));
        }
    }

    #[test]
    fn steiner_selections_stay_inside(entry in 0usize..7, t in 0.0..1.0f64) {
        let f = catalog(&standard_specs()[entry]).unwrap();
        let s = steiner_selection(&f).unwrap();
        let body = f.eval(t);
        prop_assert!(body.contains(&s.eval(t), 1e-9).unwrap());
    }

    #[test]
    fn random_polytope_interpolations_verify(
        a in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..8),
        b in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..8),
    ) {
        let body = |pts: &[(f64, f64)]| ConvexBody::from_points(&pts.iter().map(|&(x, y)| [x, y]).collect::<Vec<_>>()).unwrap();
        let f = catalog(&CatalogSpec::PolytopeInterp { a: body(&a), b: body(&b) }).unwrap();
        prop_assert!(f.verify().is_ok());
        prop_assert!(steiner_selection(&f).unwrap().verify().is_ok());
    }
}
