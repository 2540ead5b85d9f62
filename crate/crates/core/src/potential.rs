//! Concave height functions h and the potential V = h⁻².
//!
//! Heights are clipped minima of affine functions, so concavity of the
//! underlying surface holds by construction and the sublevel sets of V
//! are exact convex polygons (intersections of halfplanes with Ω).

use crate::error::Error;
use crate::geometry::{ConvexDomain, Point};
use crate::Result;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const DEFAULT_V_MAX: f64 = 1e8;
/// Nodes with h below this are treated as exterior (Dirichlet) by grids.
pub const H_FLOOR: f64 = 1e-4;

/// One affine piece ℓ(x, y) = a·x + b·y + c.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AffinePiece {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl AffinePiece {
    pub fn eval(&self, p: Point) -> f64 {
        self.a * p.x + self.b * p.y + self.c
    }
}

/// Concave height: h(x, y) = clamp(minᵢ ℓᵢ(x, y), 0, 1).
///
/// The clamp at 1 preserves concavity; the clamp at 0 is an evaluation
/// guard for the region where the surface has already dived below zero
/// (there V is capped and the nodes count as exterior anyway), so
/// concavity statements always refer to the unclipped minimum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeightFunction {
    pieces: Vec<AffinePiece>,
}

impl HeightFunction {
    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    /// Wrap pieces without renormalizing; for transforms of an already
    /// validated height (rotation preserves max = 1).
    pub fn from_pieces_unchecked(pieces: Vec<AffinePiece>) -> Self {
        HeightFunction { pieces }
    }

    /// Unclipped min of the affine pieces.
    pub fn eval_raw(&self, p: Point) -> f64 {
        self.pieces
            .iter()
            .map(|l| l.eval(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Clamped evaluation in [0, 1].
    pub fn eval(&self, p: Point) -> f64 {
        self.eval_raw(p).clamp(0.0, 1.0)
    }

    /// Maximum of the unclipped surface over Ω, found by seeding a grid
    /// (plus the domain vertices) and refining around the best point.
    /// Concavity makes the local refinement converge to the global max.
    pub fn max_over(&self, domain: &ConvexDomain) -> (Point, f64) {
        let (xmin, xmax, ymin, ymax) = domain.bbox();
        let mut best_p = domain.centroid();
        let mut best_v = if domain.contains(best_p, 1e-12) {
            self.eval_raw(best_p)
        } else {
            f64::NEG_INFINITY
        };
        let n = 64;
        for j in 0..=n {
            for i in 0..=n {
                let p = Point::new(
                    xmin + (xmax - xmin) * i as f64 / n as f64,
                    ymin + (ymax - ymin) * j as f64 / n as f64,
                );
                if domain.contains(p, 1e-12) {
                    let v = self.eval_raw(p);
                    if v > best_v {
                        best_v = v;
                        best_p = p;
                    }
                }
            }
        }
        for &v in domain.vertices() {
            let val = self.eval_raw(v);
            if val > best_v {
                best_v = val;
                best_p = v;
            }
        }
        let mut step = ((xmax - xmin).max(ymax - ymin)) / n as f64;
        for _ in 0..60 {
            let mut improved = false;
            for dj in -2i32..=2 {
                for di in -2i32..=2 {
                    let p = Point::new(best_p.x + di as f64 * step, best_p.y + dj as f64 * step);
                    if domain.contains(p, 1e-12) {
                        let v = self.eval_raw(p);
                        if v > best_v {
                            best_v = v;
                            best_p = p;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
            if step < 1e-14 * (1.0 + xmax.abs() + ymax.abs()) {
                break;
            }
        }
        (best_p, best_v)
    }
}

/// Build a height function from raw pieces, additively renormalized so
/// the maximum over Ω equals 1.
pub fn make_min_affine(pieces: Vec<AffinePiece>, domain: &ConvexDomain) -> Result<HeightFunction> {
    if pieces.is_empty() {
        return Err(Error::DegenerateHeight("no affine pieces".into()));
    }
    for l in &pieces {
        if !(l.a.is_finite() && l.b.is_finite() && l.c.is_finite()) {
            return Err(Error::DegenerateHeight(
                "non-finite piece coefficients".into(),
            ));
        }
    }
    let mut h = HeightFunction { pieces };
    let (_, m) = h.max_over(domain);
    if !m.is_finite() {
        return Err(Error::DegenerateHeight(format!(
            "maximum {m} over the domain"
        )));
    }
    let offset = 1.0 - m;
    for l in &mut h.pieces {
        l.c += offset;
    }
    Ok(h)
}

/// h ≡ 1: the constant potential V ≡ 1.
pub fn constant(domain: &ConvexDomain) -> HeightFunction {
    make_min_affine(
        vec![AffinePiece {
            a: 0.0,
            b: 0.0,
            c: 1.0,
        }],
        domain,
    )
    .expect("constant height")
}

/// Radial cone h = 1 - slope·ρ with ρ the distance to `peak`,
/// approximated by `n_pieces` affine cuts.
pub fn cone(
    domain: &ConvexDomain,
    peak: Point,
    slope: f64,
    n_pieces: usize,
) -> Result<HeightFunction> {
    if slope <= 0.0 {
        return Err(Error::DegenerateHeight(
            "cone slope must be positive".into(),
        ));
    }
    let k = n_pieces.max(8);
    let mut pieces = Vec::with_capacity(k);
    for i in 0..k {
        let phi = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
        let (s, c) = phi.sin_cos();
        pieces.push(AffinePiece {
            a: -slope * c,
            b: -slope * s,
            c: 1.0 + slope * (c * peak.x + s * peak.y),
        });
    }
    make_min_affine(pieces, domain)
}

/// Right triangle with legs `n1` (y-direction) and `n2` (x-direction),
/// carrying the extremal ridge height: h = 1 at the vertex (n2, 0) where
/// the hypotenuse meets the long side, h = 0 at the midpoint (0, n1/2) of
/// the short side, linear along the connecting ridge, and decaying
/// linearly in y off the ridge with transverse slope 0.4·n1^(-0.3)
/// (calibrated so the measured L1 rides the N1^(1/5) power law across
/// desk-scale N1).
pub fn triangle_example(n1: f64, n2: f64) -> Result<(ConvexDomain, HeightFunction)> {
    let domain = ConvexDomain::from_polygon(vec![
        Point::new(0.0, 0.0),
        Point::new(n2, 0.0),
        Point::new(0.0, n1),
    ])?;
    let h = ridge_height(&domain, n1, n2, 0.0)?;
    Ok((domain, h))
}

/// Trapezoid interpolating between the triangle (m = 0) and a rectangle
/// (m = 1), with the matching ridge height.
pub fn trapezoid_example(n1: f64, n2: f64, m: f64) -> Result<(ConvexDomain, HeightFunction)> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::InvalidConfig(format!(
            "trapezoid mix {m} outside [0, 1]"
        )));
    }
    let mut verts = vec![Point::new(0.0, 0.0), Point::new(n2, 0.0)];
    if m > 0.0 {
        verts.push(Point::new(n2, m * n1));
    }
    verts.push(Point::new(0.0, n1));
    let domain = ConvexDomain::from_polygon(verts)?;
    let h = ridge_height(&domain, n1, n2, m)?;
    Ok((domain, h))
}

/// Ridge from (n2, m·n1/2) down to (0, n1/2): value x/n2 along the ridge,
/// tilted by ∓s in y on either side.
fn ridge_height(domain: &ConvexDomain, n1: f64, n2: f64, m: f64) -> Result<HeightFunction> {
    let s = 0.4 * n1.powf(-0.3);
    // y_ridge(x) = n1/2 + (m - 1)·(n1/2)·x/n2
    let ry0 = 0.5 * n1;
    let ry_slope = (m - 1.0) * 0.5 * n1 / n2;
    // f± = x/n2 ∓ s·(y - y_ridge(x))
    let plus = AffinePiece {
        a: 1.0 / n2 + s * ry_slope,
        b: -s,
        c: s * ry0,
    };
    let minus = AffinePiece {
        a: 1.0 / n2 - s * ry_slope,
        b: s,
        c: -s * ry0,
    };
    make_min_affine(vec![plus, minus], domain)
}

/// V = min(h⁻², v_max); h = 0 maps to v_max.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Potential {
    pub height: HeightFunction,
    pub v_max: f64,
}

impl Potential {
    pub fn new(height: HeightFunction) -> Self {
        Potential {
            height,
            v_max: DEFAULT_V_MAX,
        }
    }

    pub fn with_cap(height: HeightFunction, v_max: f64) -> Self {
        Potential { height, v_max }
    }

    /// Capped potential value; no domain membership check.
    pub fn eval_at(&self, p: Point) -> f64 {
        let h = self.height.eval(p);
        if h <= 0.0 {
            return self.v_max;
        }
        (1.0 / (h * h)).min(self.v_max)
    }

    pub fn h_at(&self, p: Point) -> f64 {
        self.height.eval(p)
    }

    /// Sublevel set { h ≥ (1+c)^(-1/2) } ∩ Ω as an exact polygon.
    /// Equivalent to { V ≤ 1+c } because the clamp does not change the
    /// superlevel sets of h for thresholds in (0, 1].
    pub fn sublevel_polygon(&self, domain: &ConvexDomain, c: f64) -> Vec<Point> {
        let t = (1.0 + c).powf(-0.5);
        let mut poly = domain.vertices().to_vec();
        for l in self.height.pieces() {
            // ℓ(p) ≥ t  ⇔  (-a, -b)·p ≤ c - t
            poly = crate::geometry::polygon::clip_halfplane(&poly, Point::new(-l.a, -l.b), l.c - t);
            if poly.is_empty() {
                break;
            }
        }
        poly
    }
}

/// Potential value at (x, y); errors outside the domain.
pub fn eval_potential(potential: &Potential, domain: &ConvexDomain, x: f64, y: f64) -> Result<f64> {
    let p = Point::new(x, y);
    if !domain.contains(p, 1e-12) {
        return Err(Error::OutsideDomain(x, y));
    }
    Ok(potential.eval_at(p))
}

/// Validation report for a height function.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeightValidation {
    pub max_value: f64,
    pub max_ok: bool,
    pub range_ok: bool,
    pub concavity_pairs: usize,
    pub concavity_failures: usize,
    pub pass: bool,
}

/// Checks max h = 1 (±1e-6), the [0, 1] range on a sample grid, and
/// midpoint concavity of the underlying min-affine surface on random
/// point pairs inside Ω.
pub fn validate_height(
    height: &HeightFunction,
    domain: &ConvexDomain,
    seed: u64,
) -> HeightValidation {
    let (_, max_value) = height.max_over(domain);
    let max_ok = (max_value - 1.0).abs() <= 1e-6;
    let mut range_ok = true;
    let (xmin, xmax, ymin, ymax) = domain.bbox();
    for j in 0..=40 {
        for i in 0..=40 {
            let p = Point::new(
                xmin + (xmax - xmin) * i as f64 / 40.0,
                ymin + (ymax - ymin) * j as f64 / 40.0,
            );
            if domain.contains(p, 1e-12) {
                let v = height.eval(p);
                if !(0.0..=1.0).contains(&v) {
                    range_ok = false;
                }
            }
        }
    }
    let (pairs, failures) = midpoint_concavity_check(|p| height.eval_raw(p), domain, 10_000, seed);
    HeightValidation {
        max_value,
        max_ok,
        range_ok,
        concavity_pairs: pairs,
        concavity_failures: failures,
        pass: max_ok && range_ok && failures == 0,
    }
}

/// Midpoint concavity spot-check f((p+q)/2) ≥ (f(p)+f(q))/2 - 1e-9 on
/// random pairs inside Ω. Returns (pairs tested, failures).
pub fn midpoint_concavity_check(
    f: impl Fn(Point) -> f64,
    domain: &ConvexDomain,
    n_pairs: usize,
    seed: u64,
) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (xmin, xmax, ymin, ymax) = domain.bbox();
    let sample = |rng: &mut ChaCha8Rng| -> Point {
        loop {
            let p = Point::new(rng.random_range(xmin..=xmax), rng.random_range(ymin..=ymax));
            if domain.contains(p, 1e-12) {
                return p;
            }
        }
    };
    let mut failures = 0;
    for _ in 0..n_pairs {
        let p = sample(&mut rng);
        let q = sample(&mut rng);
        let mid = Point::new(0.5 * (p.x + q.x), 0.5 * (p.y + q.y));
        if f(mid) < 0.5 * (f(p) + f(q)) - 1e-9 {
            failures += 1;
        }
    }
    (n_pairs, failures)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(side: f64) -> ConvexDomain {
        ConvexDomain::from_polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(side, 0.0),
            Point::new(side, side),
            Point::new(0.0, side),
        ])
        .unwrap()
    }

    #[test]
    fn constant_height_gives_unit_potential() {
        let d = square(3.0);
        let h = constant(&d);
        let v = Potential::new(h);
        for &(x, y) in &[(0.5, 0.5), (1.5, 2.0), (2.9, 0.1)] {
            assert_eq!(eval_potential(&v, &d, x, y).unwrap(), 1.0);
        }
    }

    #[test]
    fn algebra_of_v() {
        // h = 1/2 → V = 4; h → 0 → V = cap.
        let d = square(2.0);
        let h = make_min_affine(
            vec![AffinePiece {
                a: -0.25,
                b: 0.0,
                c: 1.0,
            }],
            &d,
        )
        .unwrap();
        let v = Potential::new(h);
        let val = eval_potential(&v, &d, 2.0, 1.0).unwrap();
        assert!((val - 4.0).abs() < 1e-9, "V = {val}");
        let h0 = make_min_affine(
            vec![AffinePiece {
                a: -0.5,
                b: 0.0,
                c: 1.0,
            }],
            &d,
        )
        .unwrap();
        let v0 = Potential::new(h0);
        assert_eq!(eval_potential(&v0, &d, 2.0, 0.5).unwrap(), DEFAULT_V_MAX);
    }

    #[test]
    fn outside_domain_is_rejected() {
        let d = square(1.0);
        let v = Potential::new(constant(&d));
        assert!(matches!(
            eval_potential(&v, &d, 2.0, 0.5),
            Err(Error::OutsideDomain(_, _))
        ));
    }

    #[test]
    fn cone_levels_are_circles() {
        // h = 1 - s·ρ: the level {h = 1-t} is the circle of radius t/s.
        let d = square(4.0);
        let peak = Point::new(2.0, 2.0);
        let slope = 0.5;
        let h = cone(&d, peak, slope, 256).unwrap();
        assert!((h.eval(peak) - 1.0).abs() < 1e-9);
        let poly_err = 1.0 / (std::f64::consts::PI / 256.0).cos() - 1.0;
        for &t in &[0.2, 0.5, 0.8] {
            let r_level = t / slope;
            for k in 0..32 {
                let phi = 2.0 * std::f64::consts::PI * k as f64 / 32.0;
                let p = Point::new(peak.x + r_level * phi.cos(), peak.y + r_level * phi.sin());
                let expect = 1.0 - t;
                let got = h.eval(p);
                assert!(
                    (got - expect).abs() <= slope * r_level * poly_err + 1e-9,
                    "t={t} phi={phi}: h={got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn triangle_example_anchors() {
        let (d, h) = triangle_example(4.0, 64.0).unwrap();
        // h = 1 where the hypotenuse joins the long side, 0 at the
        // midpoint of the short side.
        assert!((h.eval(Point::new(64.0, 0.0)) - 1.0).abs() < 1e-9);
        assert!(h.eval(Point::new(0.0, 2.0)).abs() < 1e-9);
        let report = validate_height(&h, &d, 7);
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn renormalization_lifts_max_to_one() {
        let d = square(2.0);
        let h = make_min_affine(
            vec![AffinePiece {
                a: 0.0,
                b: 0.0,
                c: 0.25,
            }],
            &d,
        )
        .unwrap();
        let (_, m) = h.max_over(&d);
        assert!((m - 1.0).abs() < 1e-9);
    }

    #[test]
    fn validation_passes_for_constructed_heights() {
        let d = square(3.0);
        for h in [
            constant(&d),
            cone(&d, Point::new(1.5, 1.5), 0.3, 64).unwrap(),
        ] {
            let rep = validate_height(&h, &d, 42);
            assert!(rep.pass, "{rep:?}");
            assert_eq!(rep.concavity_failures, 0);
        }
    }

    #[test]
    fn convex_sample_fails_midpoint_check() {
        let d = square(2.0);
        let (_, failures) = midpoint_concavity_check(|p| (p.x - 1.0).powi(2) + p.y, &d, 2000, 1);
        assert!(
            failures > 0,
            "a convex function must fail the concavity check"
        );
    }

    #[test]
    fn sublevel_polygon_against_mask_predicate() {
        let d = square(4.0);
        let h = cone(&d, Point::new(2.0, 2.0), 0.5, 256).unwrap();
        let pot = Potential::new(h);
        let c = 0.25;
        let poly = pot.sublevel_polygon(&d, c);
        // Node-by-node agreement with the defining predicate V ≤ 1+c,
        // away from the polygonized-cone boundary band.
        let t = (1.0_f64 + c).powf(-0.5);
        let band = (1.0 - t) / 0.5 * (1.0 / (std::f64::consts::PI / 256.0).cos() - 1.0) + 1e-9;
        for j in 0..=40 {
            for i in 0..=40 {
                let p = Point::new(i as f64 * 0.1 + 1.0, j as f64 * 0.1 + 1.0);
                let rho = (p - Point::new(2.0, 2.0)).norm();
                if (rho - (1.0 - t) / 0.5).abs() <= band {
                    continue;
                }
                let inside_pred = pot.eval_at(p) <= 1.0 + c;
                let inside_poly = crate::geometry::polygon::contains(&poly, p, 1e-9);
                assert_eq!(inside_pred, inside_poly, "at ({}, {})", p.x, p.y);
            }
        }
    }
}
