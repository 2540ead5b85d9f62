//! Property tests for the geometric and spectral invariants.

use lenscale::geometry::{self, polygon, ConvexDomain, GridSpec, Point, Region};
use lenscale::potential::{self, AffinePiece, Potential};
use lenscale::scales::{compute_l2, l2_window_scan_oracle, ScaleOptions};
use lenscale::sturm1d::{first_eig_1d, ColumnState, MuProfile, Tridiagonal1d};
use proptest::prelude::*;

fn arb_convex_polygon() -> impl Strategy<Value = ConvexDomain> {
    proptest::collection::vec((0.0f64..8.0, 0.0f64..5.0), 6..16).prop_filter_map(
        "degenerate hull",
        |pts| {
            let points: Vec<Point> = pts.iter().map(|&(x, y)| Point::new(x, y)).collect();
            let hull = polygon::convex_hull(&points);
            if hull.len() < 3 || polygon::signed_area(&hull) < 0.5 {
                return None;
            }
            ConvexDomain::from_polygon(hull).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rotation_preserves_inradius_and_diameter(d in arb_convex_polygon(), angle in -3.0f64..3.0) {
        let r0 = geometry::inradius(&Region::Polygon(&d)).unwrap();
        let diam0 = geometry::diameter(&Region::Polygon(&d)).unwrap();
        let rot = geometry::rotate_domain(&d, angle);
        let r1 = geometry::inradius(&Region::Polygon(&rot)).unwrap();
        let diam1 = geometry::diameter(&Region::Polygon(&rot)).unwrap();
        prop_assert!((r0 - r1).abs() < 1e-9, "inradius {r0} vs {r1}");
        prop_assert!((diam0 - diam1).abs() < 1e-9);
        prop_assert!(r0 <= diam0 / 2.0 + 1e-12);
        let back = geometry::rotate_domain(&rot, -angle);
        for (p, q) in d.vertices().iter().zip(back.vertices()) {
            prop_assert!((*p - *q).norm() < 1e-9);
        }
    }

    #[test]
    fn min_width_at_least_twice_inradius(d in arb_convex_polygon()) {
        let (_, w) = geometry::min_width_direction(&Region::Polygon(&d), 720).unwrap();
        let r = geometry::inradius(&Region::Polygon(&d)).unwrap();
        prop_assert!(w >= 2.0 * r - 1e-9, "w = {w}, r = {r}");
    }

    #[test]
    fn john_ellipse_inscribed_with_bounded_dilation(d in arb_convex_polygon()) {
        let (e, kappa) = geometry::john_ellipse(&Region::Polygon(&d), 720).unwrap();
        prop_assert!(kappa >= 1.0 - 1e-12);
        for k in 0..256 {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 256.0;
            prop_assert!(d.contains(e.boundary_point(t), 1e-9));
        }
    }

    #[test]
    fn constructed_heights_stay_concave(
        a1 in -0.3f64..0.3, b1 in -0.3f64..0.3,
        a2 in -0.3f64..0.3, b2 in -0.3f64..0.3,
        seed in 0u64..1000,
    ) {
        let d = ConvexDomain::from_polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(5.0, 0.0),
            Point::new(5.0, 4.0),
            Point::new(0.0, 4.0),
        ]).unwrap();
        let h = potential::make_min_affine(
            vec![
                AffinePiece { a: a1, b: b1, c: 1.0 },
                AffinePiece { a: a2, b: b2, c: 1.2 },
            ],
            &d,
        ).unwrap();
        let report = potential::validate_height(&h, &d, seed);
        prop_assert!(report.max_ok, "max = {}", report.max_value);
        prop_assert_eq!(report.concavity_failures, 0);
    }

    #[test]
    fn sublevel_masks_nest(c1 in 0.05f64..0.5, c2 in 0.5f64..2.0, slope in 0.2f64..0.8) {
        let d = ConvexDomain::from_polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(4.0, 0.0),
            Point::new(4.0, 4.0),
            Point::new(0.0, 4.0),
        ]).unwrap();
        let h = potential::cone(&d, Point::new(2.0, 2.0), slope, 64).unwrap();
        let pot = Potential::new(h);
        let grid = GridSpec::covering(0.0, 4.0, 0.0, 4.0, 0.1);
        let m1 = geometry::sublevel_region(&d, |p| pot.eval_at(p), c1, &grid).unwrap();
        let m2 = geometry::sublevel_region(&d, |p| pot.eval_at(p), c2, &grid).unwrap();
        prop_assert!(m1.subset_of(&m2));
        prop_assert!(!m1.is_empty());
    }

    #[test]
    fn l2_bisection_matches_window_scan(
        n in 60usize..400,
        dx in 0.02f64..0.1,
        x0_frac in 0.2f64..0.8,
        curv in 0.05f64..3.0,
        power in 1.0f64..2.5,
    ) {
        let xs: Vec<f64> = (0..n).map(|i| i as f64 * dx).collect();
        let x0 = x0_frac * xs[n - 1];
        let mu: Vec<f64> = xs.iter().map(|&x| 1.2 + curv * (x - x0).abs().powf(power)).collect();
        let mu_star = mu.iter().cloned().fold(f64::INFINITY, f64::min);
        let x_star = xs[mu.iter().enumerate().min_by(|a, b| a.1.partial_cmp(b.1).unwrap()).unwrap().0];
        let prof = MuProfile {
            xs, mu,
            state: vec![ColumnState::Solved; n],
            v_max: 1e8,
            mu_star, x_star,
        };
        let (l2, interval) = compute_l2(&prof, 1e-6, 1.0, &ScaleOptions::default()).unwrap();
        let oracle = l2_window_scan_oracle(&prof);
        prop_assert!((l2 - oracle).abs() <= 2e-3 * oracle + 1e-12, "{l2} vs {oracle}");
        prop_assert!(interval.1 - interval.0 >= l2 - dx - 1e-9);
    }

    #[test]
    fn sturm_first_eig_certifies_no_eigenvalue_below(
        n in 3usize..120,
        dy in 0.01f64..0.3,
        seed in 0u64..10_000,
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let inv2 = 1.0 / (dy * dy);
        let diag: Vec<f64> = (0..n).map(|_| 2.0 * inv2 + rng.random_range(1.0..30.0)).collect();
        let tri = Tridiagonal1d::new(0.0, dy, diag).unwrap();
        let mu = first_eig_1d(&tri);
        prop_assert_eq!(tri.sturm_count(mu), 0);
        prop_assert!(tri.sturm_count(mu + 1e-9 * (1.0 + mu.abs())) >= 1);
        prop_assert!(mu > 1.0);
    }
}
