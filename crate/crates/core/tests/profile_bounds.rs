//! Structural properties of the μ profile on the oriented extremal
//! family: the eigenvalue band on the middle of the sublevel projection
//! and discrete convexity of μ(x).

use lenscale::geometry::polygon;
use lenscale::potential::{self, Potential};
use lenscale::scales::{compute_l1, orient_domain, ScaleOptions};
use lenscale::sturm1d::mu_profile;

#[test]
fn mu_band_on_middle_of_sublevel_projection() {
    // On the middle half of the x-projection of the sublevel set
    // Ω_{L1⁻²}, the cross-sectional eigenvalue satisfies
    // 1 + 1/(C·L1²) ≤ μ(x) ≤ 1 + C/L1² for a moderate constant.
    let (domain0, height) = potential::triangle_example(4.0, 32.0).unwrap();
    let pot0 = Potential::new(height);
    let opts = ScaleOptions::default();
    let l1r = compute_l1(&domain0, &pot0, &opts).unwrap();
    let (domain, pot, _) = orient_domain(&domain0, &pot0, &l1r, &opts).unwrap();
    let l1 = l1r.l1;
    let sub = pot.sublevel_polygon(&domain, 1.0 / (l1 * l1));
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    for p in &sub {
        xmin = xmin.min(p.x);
        xmax = xmax.max(p.x);
    }
    let quarter = 0.25 * (xmax - xmin);
    let (lo, hi) = (xmin + quarter, xmax - quarter);
    let dy = l1.min(1.0) / 16.0;
    let n = 40;
    let xs: Vec<f64> = (0..=n)
        .map(|k| lo + (hi - lo) * k as f64 / n as f64)
        .collect();
    let prof = mu_profile(&domain, &pot, &xs, dy).unwrap();
    let big_c = 100.0;
    for i in 0..xs.len() {
        assert!(
            prof.solved(i),
            "cross-section at x = {} not solvable",
            xs[i]
        );
        let gap = prof.mu[i] - 1.0;
        assert!(
            gap >= 1.0 / (big_c * l1 * l1),
            "mu({}) - 1 = {gap} below the band",
            xs[i]
        );
        assert!(
            gap <= big_c / (l1 * l1),
            "mu({}) - 1 = {gap} above the band",
            xs[i]
        );
    }
}

#[test]
fn mu_profile_discretely_convex_on_extremal_family() {
    let (domain0, height) = potential::triangle_example(4.0, 16.0).unwrap();
    let pot0 = Potential::new(height);
    let opts = ScaleOptions::default();
    let l1r = compute_l1(&domain0, &pot0, &opts).unwrap();
    let (domain, pot, _) = orient_domain(&domain0, &pot0, &l1r, &opts).unwrap();
    let (a, b) = {
        let mut xmin = f64::INFINITY;
        let mut xmax = f64::NEG_INFINITY;
        for p in domain.vertices() {
            xmin = xmin.min(p.x);
            xmax = xmax.max(p.x);
        }
        (xmin, xmax)
    };
    let dx = (b - a) / 200.0;
    let xs: Vec<f64> = (0..=200).map(|k| a + k as f64 * dx).collect();
    let prof = mu_profile(&domain, &pot, &xs, l1r.l1.min(1.0) / 16.0).unwrap();
    // Test convexity where the cross-sections are genuinely resolved:
    // columns riding the potential cap are the infinite-well surrogate.
    let ceiling = 1e-3 * prof.v_max;
    let mut mu_max = 0.0_f64;
    for i in 0..xs.len() {
        if prof.solved(i) && prof.mu[i] < ceiling {
            mu_max = mu_max.max(prof.mu[i].abs());
        }
    }
    let tol = 1e-8_f64.max(10.0 * dx * dx * mu_max);
    let min_dd = prof.min_second_difference_below(ceiling);
    assert!(
        min_dd >= -tol,
        "second difference {min_dd} below -{tol} (profile not discretely convex)"
    );
}

#[test]
fn oriented_sublevel_thinnest_along_y() {
    let (domain0, height) = potential::triangle_example(4.0, 32.0).unwrap();
    let pot0 = Potential::new(height);
    let opts = ScaleOptions::default();
    let l1r = compute_l1(&domain0, &pot0, &opts).unwrap();
    let (domain, pot, _) = orient_domain(&domain0, &pot0, &l1r, &opts).unwrap();
    let sub = pot.sublevel_polygon(&domain, 1.0 / (l1r.l1 * l1r.l1));
    let wy = polygon::width_along(&sub, lenscale::Point::new(0.0, 1.0));
    let wx = polygon::width_along(&sub, lenscale::Point::new(1.0, 0.0));
    assert!(wy <= wx + 1e-9, "y-width {wy} vs x-width {wx}");
}

#[test]
fn stiff_capped_potential_converges_and_matches_oracle() {
    // A cone whose height hits zero inside the domain puts capped-V
    // (1e8) nodes right inside the mask; the eigensolver must still
    // reach the residual target and the dense oracle.
    use lenscale::eig2d::{self, Grid2d};
    use lenscale::geometry::{ConvexDomain, Point};
    let d = ConvexDomain::from_polygon(vec![
        Point::new(0.0, 0.0),
        Point::new(4.0, 0.0),
        Point::new(4.0, 4.0),
        Point::new(0.0, 4.0),
    ])
    .unwrap();
    let h = potential::cone(&d, Point::new(2.0, 2.0), 0.7, 64).unwrap();
    let pot = Potential::new(h);
    let grid = Grid2d::build(&d, &pot, 0.1).unwrap();
    let op = eig2d::assemble_2d(&pot, &grid).unwrap();
    let mut v_max_seen = 0.0_f64;
    for k in 0..op.n() {
        v_max_seen = v_max_seen.max(op.potential_at_unknown(k));
    }
    assert!(v_max_seen > 1e5, "instance not stiff: max V = {v_max_seen:e}");
    let pair = eig2d::first_eig_2d(&op).unwrap();
    assert!(pair.residual <= 1e-8, "residual {}", pair.residual);
    let (lam_dense, _) = eig2d::dense_oracle_2d(&op).unwrap();
    assert!(
        (pair.lambda - lam_dense).abs() <= 1e-8,
        "{} vs {lam_dense}",
        pair.lambda
    );
    let spec = pair.grid.spec();
    for idx in 0..spec.len() {
        if pair.grid.mask.inside[idx] {
            assert!(pair.u[idx] > 0.0, "nonpositive interior value");
        }
    }
}
