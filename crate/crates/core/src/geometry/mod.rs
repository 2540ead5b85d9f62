//! Convex-set primitives: cross-sections, inradius, diameter, width and
//! orientation, sublevel regions, approximate John ellipses.

pub mod mask;
pub mod polygon;

use crate::error::Error;
use crate::Result;
use serde::{Deserialize, Serialize};

pub use mask::{GridSpec, RegionMask};

/// Plain 2D point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Rotate by `angle` (CCW) about `center`.
    pub fn rotated_about(self, angle: f64, center: Point) -> Point {
        let (s, c) = angle.sin_cos();
        let dx = self.x - center.x;
        let dy = self.y - center.y;
        Point::new(center.x + c * dx - s * dy, center.y + s * dx + c * dy)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Bounded convex planar domain as a CCW polygon. A graph form (interval
/// [a, b] with piecewise-linear lower/upper boundaries g1, g2) can be
/// derived from or used to build the polygon.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvexDomain {
    vertices: Vec<Point>,
}

/// Graph form of a domain: g1 convex below, g2 concave above, over [a, b].
#[derive(Clone, Debug)]
pub struct GraphForm {
    pub a: f64,
    pub b: f64,
    pub g1: Vec<Point>,
    pub g2: Vec<Point>,
}

impl ConvexDomain {
    /// Build from an ordered vertex list. The list is normalized to CCW;
    /// consecutive duplicates are dropped. Errors on fewer than 3 distinct
    /// vertices, zero area, or non-convexity.
    pub fn from_polygon(mut vertices: Vec<Point>) -> Result<Self> {
        vertices.dedup_by(|a, b| (*a - *b).norm() < 1e-12);
        if vertices.len() >= 2 && (vertices[0] - *vertices.last().unwrap()).norm() < 1e-12 {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(Error::InvalidDomain(
                "need at least 3 distinct vertices".into(),
            ));
        }
        let area = polygon::signed_area(&vertices);
        if area < 0.0 {
            vertices.reverse();
        }
        let area = area.abs();
        if area <= 1e-300 {
            return Err(Error::InvalidDomain(
                "degenerate polygon with zero area".into(),
            ));
        }
        let scale = polygon::diameter_of(&vertices);
        let m = vertices.len();
        for i in 0..m {
            let a = vertices[i];
            let b = vertices[(i + 1) % m];
            let c = vertices[(i + 2) % m];
            let cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
            if cross < -1e-9 * scale * scale {
                return Err(Error::InvalidDomain(format!(
                    "polygon is not convex at vertex {} (cross = {cross:e})",
                    (i + 1) % m
                )));
            }
        }
        Ok(ConvexDomain { vertices })
    }

    /// Build from the graph form. Validates that g1 is convex, g2 concave
    /// (second differences of breakpoint slopes) and g1 < g2 on (a, b).
    pub fn from_graph(a: f64, b: f64, g1: Vec<Point>, g2: Vec<Point>) -> Result<Self> {
        if !(b > a) {
            return Err(Error::InvalidDomain("graph form needs b > a".into()));
        }
        let check_chain = |g: &[Point], name: &str, convex: bool| -> Result<()> {
            if g.len() < 2 {
                return Err(Error::InvalidDomain(format!(
                    "{name} needs at least 2 breakpoints"
                )));
            }
            if (g[0].x - a).abs() > 1e-9 * (1.0 + b - a)
                || (g.last().unwrap().x - b).abs() > 1e-9 * (1.0 + b - a)
            {
                return Err(Error::InvalidDomain(format!("{name} must span [a, b]")));
            }
            let mut prev_slope = f64::NAN;
            for w in g.windows(2) {
                let dx = w[1].x - w[0].x;
                if dx <= 0.0 {
                    return Err(Error::InvalidDomain(format!(
                        "{name} breakpoints must increase in x"
                    )));
                }
                let slope = (w[1].y - w[0].y) / dx;
                if prev_slope.is_finite() {
                    let dd = slope - prev_slope;
                    if (convex && dd < -1e-9) || (!convex && dd > 1e-9) {
                        return Err(Error::InvalidDomain(format!(
                            "{name} violates {}",
                            if convex { "convexity" } else { "concavity" }
                        )));
                    }
                }
                prev_slope = slope;
            }
            Ok(())
        };
        check_chain(&g1, "g1", true)?;
        check_chain(&g2, "g2", false)?;
        let eval = |g: &[Point], x: f64| -> f64 {
            for (k, w) in g.windows(2).enumerate() {
                if x <= w[1].x || k + 2 == g.len() {
                    let t = ((x - w[0].x) / (w[1].x - w[0].x)).clamp(0.0, 1.0);
                    return w[0].y + t * (w[1].y - w[0].y);
                }
            }
            g.last().unwrap().y
        };
        let mut xs: Vec<f64> = g1.iter().chain(g2.iter()).map(|p| p.x).collect();
        xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
        for &x in &xs {
            if x > a + 1e-12 && x < b - 1e-12 && eval(&g1, x) >= eval(&g2, x) - 1e-12 {
                return Err(Error::InvalidDomain(format!("g1 >= g2 at x = {x}")));
            }
        }
        let mut verts: Vec<Point> = g1.clone();
        verts.extend(g2.iter().rev().cloned());
        ConvexDomain::from_polygon(verts)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Lower/upper boundary chains over the projection interval. Vertical
    /// edges at the left/right extremes belong to neither chain.
    pub fn graph_form(&self) -> GraphForm {
        let m = self.vertices.len();
        let vs = &self.vertices;
        let pick = |better: &dyn Fn(Point, Point) -> bool| -> usize {
            let mut best = 0;
            for i in 1..m {
                if better(vs[i], vs[best]) {
                    best = i;
                }
            }
            best
        };
        let i_ll = pick(&|p, q| (p.x, p.y) < (q.x, q.y));
        let i_rl = pick(&|p, q| (p.x, -p.y) > (q.x, -q.y));
        let i_rh = pick(&|p, q| (p.x, p.y) > (q.x, q.y));
        let i_lh = pick(&|p, q| (p.x, -p.y) < (q.x, -q.y));
        let walk = |from: usize, to: usize| -> Vec<Point> {
            let mut out = Vec::new();
            let mut i = from;
            loop {
                out.push(vs[i]);
                if i == to {
                    break;
                }
                i = (i + 1) % m;
            }
            out
        };
        let g1 = walk(i_ll, i_rl);
        let mut g2 = walk(i_rh, i_lh);
        g2.reverse();
        GraphForm {
            a: vs[i_ll].x,
            b: vs[i_rl].x,
            g1,
            g2,
        }
    }

    pub fn area(&self) -> f64 {
        polygon::signed_area(&self.vertices)
    }

    pub fn centroid(&self) -> Point {
        polygon::centroid(&self.vertices)
    }

    /// Closed membership with absolute slack eps.
    pub fn contains(&self, p: Point, eps: f64) -> bool {
        polygon::contains(&self.vertices, p, eps)
    }

    /// Strict interior test: at distance at least `margin` from every edge.
    pub fn contains_strict(&self, p: Point, margin: f64) -> bool {
        for (n, d) in polygon::edge_halfplanes(&self.vertices) {
            if n.dot(p) > d - margin {
                return false;
            }
        }
        true
    }

    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        let mut xmin = f64::INFINITY;
        let mut xmax = f64::NEG_INFINITY;
        let mut ymin = f64::INFINITY;
        let mut ymax = f64::NEG_INFINITY;
        for v in &self.vertices {
            xmin = xmin.min(v.x);
            xmax = xmax.max(v.x);
            ymin = ymin.min(v.y);
            ymax = ymax.max(v.y);
        }
        (xmin, xmax, ymin, ymax)
    }

    /// Closed y-interval of the domain at abscissa `x`; None outside the
    /// projection interval.
    pub fn cross_section(&self, x: f64) -> Option<(f64, f64)> {
        let (xmin, xmax, _, _) = self.bbox();
        if x < xmin || x > xmax {
            return None;
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let m = self.vertices.len();
        for i in 0..m {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % m];
            if (a.x - x).abs() < 1e-13 * (1.0 + x.abs()) {
                lo = lo.min(a.y);
                hi = hi.max(a.y);
            }
            if (a.x < x && b.x > x) || (a.x > x && b.x < x) {
                let t = (x - a.x) / (b.x - a.x);
                let y = a.y + t * (b.y - a.y);
                lo = lo.min(y);
                hi = hi.max(y);
            }
        }
        if lo > hi {
            None
        } else {
            Some((lo, hi))
        }
    }
}

/// Region abstraction shared by exact polygons and grid masks.
pub enum Region<'a> {
    Polygon(&'a ConvexDomain),
    Hull(&'a [Point]),
    Mask(&'a RegionMask),
}

impl<'a> Region<'a> {
    pub fn is_empty(&self) -> bool {
        match self {
            Region::Polygon(d) => d.vertices.is_empty(),
            Region::Hull(h) => h.is_empty(),
            Region::Mask(m) => m.is_empty(),
        }
    }

    pub fn hull_vertices(&self) -> Vec<Point> {
        match self {
            Region::Polygon(d) => d.vertices.clone(),
            Region::Hull(h) => h.to_vec(),
            Region::Mask(m) => m.hull(),
        }
    }

    pub fn chebyshev(&self) -> Result<(Point, f64)> {
        if self.is_empty() {
            return Err(Error::EmptyRegion("chebyshev center of an empty region"));
        }
        match self {
            Region::Polygon(d) => Ok(polygon::chebyshev(&d.vertices)),
            Region::Hull(h) => Ok(polygon::chebyshev(h)),
            Region::Mask(m) => m
                .chebyshev()
                .ok_or(Error::EmptyRegion("mask has no set node")),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        match self {
            Region::Polygon(d) => d.contains(p, 1e-12),
            Region::Hull(h) => polygon::contains(h, p, 1e-12),
            Region::Mask(m) => {
                let gx = (p.x - m.spec.origin.x) / m.spec.delta;
                let gy = (p.y - m.spec.origin.y) / m.spec.delta;
                let i = gx.round();
                let j = gy.round();
                if i < 0.0 || j < 0.0 || i >= m.spec.nx as f64 || j >= m.spec.ny as f64 {
                    return false;
                }
                m.get(i as usize, j as usize)
            }
        }
    }

    /// Length-scale slack of the representation: Δ for masks, ~0 otherwise.
    pub fn tolerance(&self) -> f64 {
        match self {
            Region::Mask(m) => m.spec.delta,
            _ => 0.0,
        }
    }
}

/// Inradius: exact Chebyshev radius for polygons; distance-transform
/// maximum (error ≤ Δ) for masks.
pub fn inradius(region: &Region) -> Result<f64> {
    region.chebyshev().map(|(_, r)| r)
}

/// Diameter as the maximum pairwise distance over hull vertices.
pub fn diameter(region: &Region) -> Result<f64> {
    if region.is_empty() {
        return Err(Error::EmptyRegion("diameter of an empty region"));
    }
    Ok(polygon::diameter_of(&region.hull_vertices()))
}

/// Direction sweep for the minimal support width.
///
/// Returns `(angle, width)` where `angle` is the rotation (in
/// (-π/2, π/2]) that brings the thinnest direction onto the y-axis, so a
/// domain already thinnest along y reports angle 0. Ties go to the angle
/// closest to 0, positive before negative.
pub fn min_width_direction(region: &Region, steps: usize) -> Result<(f64, f64)> {
    if region.is_empty() {
        return Err(Error::EmptyRegion("width of an empty region"));
    }
    let hull = region.hull_vertices();
    let mut best_r = 0.0;
    let mut best_w = f64::INFINITY;
    for k in 0..steps {
        let r = -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * (k + 1) as f64 / steps as f64;
        // Direction that becomes the y-axis after rotating the region by r.
        let d = Point::new(r.sin(), r.cos());
        let w = polygon::width_along(&hull, d);
        let tie = 1e-9 * (1.0 + best_w.min(w));
        if w < best_w - tie {
            best_w = w;
            best_r = r;
        } else if (w - best_w).abs() <= tie {
            let closer = r.abs() < best_r.abs() - 1e-15
                || ((r.abs() - best_r.abs()).abs() <= 1e-15 && r > best_r);
            if closer {
                best_r = r;
                best_w = best_w.min(w);
            }
        }
    }
    Ok((best_r, best_w))
}

/// Rigid rotation about the centroid; the result is re-validated.
pub fn rotate_domain(domain: &ConvexDomain, angle: f64) -> ConvexDomain {
    let c = domain.centroid();
    let verts: Vec<Point> = domain
        .vertices
        .iter()
        .map(|&p| p.rotated_about(angle, c))
        .collect();
    ConvexDomain::from_polygon(verts).expect("rotation preserves convexity")
}

/// Grid mask of { node ∈ Ω : V(node) ≤ 1 + c }. `v_at` evaluates the
/// (capped) potential. Errors if the grid does not cover the domain.
pub fn sublevel_region(
    domain: &ConvexDomain,
    v_at: impl Fn(Point) -> f64,
    c: f64,
    grid: &GridSpec,
) -> Result<RegionMask> {
    let (xmin, xmax, ymin, ymax) = domain.bbox();
    if !grid.covers(xmin, xmax, ymin, ymax) {
        return Err(Error::GridMismatch(format!(
            "grid does not cover the domain bbox [{xmin}, {xmax}] x [{ymin}, {ymax}]"
        )));
    }
    let mut m = RegionMask::new_empty(grid.clone());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let p = grid.node(i, j);
            if domain.contains(p, 1e-12) && v_at(p) <= 1.0 + c {
                let idx = grid.index(i, j);
                m.inside[idx] = true;
            }
        }
    }
    Ok(m)
}

/// Inscribed ellipse with measured dilation factor.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Ellipse {
    pub center: Point,
    /// Semi-major axis length (p ≥ q > 0).
    pub semi_major: f64,
    pub semi_minor: f64,
    /// Angle of the major axis.
    pub angle: f64,
}

impl Ellipse {
    /// Point at ellipse parameter t.
    pub fn boundary_point(&self, t: f64) -> Point {
        let (s, c) = self.angle.sin_cos();
        let ex = self.semi_major * t.cos();
        let ey = self.semi_minor * t.sin();
        Point::new(
            self.center.x + c * ex - s * ey,
            self.center.y + s * ex + c * ey,
        )
    }

    /// Ellipse "norm" of a point: 1 on the boundary, < 1 inside.
    pub fn gauge(&self, p: Point) -> f64 {
        let (s, c) = self.angle.sin_cos();
        let dx = p.x - self.center.x;
        let dy = p.y - self.center.y;
        let u = (c * dx + s * dy) / self.semi_major;
        let v = (-s * dx + c * dy) / self.semi_minor;
        (u * u + v * v).sqrt()
    }
}

/// Approximate John ellipse: Chebyshev center, axes aligned with the
/// minimal-width direction, semi-axes grown by bisection until tangency.
/// Returns the ellipse together with the measured dilation factor κ such
/// that center + κ(E - center) contains the region's hull.
pub fn john_ellipse(region: &Region, width_steps: usize) -> Result<(Ellipse, f64)> {
    if region.is_empty() {
        return Err(Error::EmptyRegion("john ellipse of an empty region"));
    }
    let (center, _) = region.chebyshev()?;
    let (rot, w_min) = min_width_direction(region, width_steps)?;
    let hull = region.hull_vertices();
    // Thin direction maps to y after rotating by rot, so the major axis
    // lies at angle -rot in the original frame.
    let angle = -rot;
    let d_major = Point::new(angle.cos(), angle.sin());
    let w_major = polygon::width_along(&hull, d_major);
    let slack = region.tolerance();
    let p0 = (0.5 * w_major).max(1e-12);
    let q0 = (0.5 * w_min).max(1e-12);
    let fits = |t: f64| -> bool {
        let e = Ellipse {
            center,
            semi_major: t * p0,
            semi_minor: t * q0,
            angle,
        };
        (0..256).all(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / 256.0;
            let bp = e.boundary_point(th);
            region.contains(bp) || {
                // Grid masks get half-cell slack.
                slack > 0.0 && {
                    let inner = Ellipse {
                        center,
                        semi_major: (t * p0 - slack).max(1e-12),
                        semi_minor: (t * q0 - slack).max(1e-12),
                        angle,
                    };
                    region.contains(inner.boundary_point(th))
                }
            }
        })
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    while fits(hi) && hi < 8.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo <= 0.0 {
        return Err(Error::EmptyRegion(
            "region too thin for an inscribed ellipse",
        ));
    }
    let mut e = Ellipse {
        center,
        semi_major: lo * p0,
        semi_minor: lo * q0,
        angle,
    };
    if e.semi_minor > e.semi_major {
        std::mem::swap(&mut e.semi_major, &mut e.semi_minor);
        e.angle += std::f64::consts::FRAC_PI_2;
    }
    let kappa = hull.iter().map(|&v| e.gauge(v)).fold(1.0_f64, f64::max);
    Ok((e, kappa))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(a: f64, b: f64) -> ConvexDomain {
        ConvexDomain::from_polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(a, 0.0),
            Point::new(a, b),
            Point::new(0.0, b),
        ])
        .unwrap()
    }

    #[test]
    fn cross_section_rectangle() {
        let d = rect(4.0, 1.0);
        assert_eq!(d.cross_section(2.0), Some((0.0, 1.0)));
        assert_eq!(d.cross_section(-1.0), None);
    }

    #[test]
    fn cross_section_triangle_hypotenuse() {
        let d = ConvexDomain::from_polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(4.0, 0.0),
            Point::new(0.0, 3.0),
        ])
        .unwrap();
        let (lo, hi) = d.cross_section(2.0).unwrap();
        assert!((lo - 0.0).abs() < 1e-12 && (hi - 1.5).abs() < 1e-12);
    }

    #[test]
    fn inradius_square_and_triangle() {
        let sq = rect(2.0, 2.0);
        assert!((inradius(&Region::Polygon(&sq)).unwrap() - 1.0).abs() < 1e-9);
        let tri = ConvexDomain::from_polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(4.0, 0.0),
            Point::new(0.0, 3.0),
        ])
        .unwrap();
        assert!((inradius(&Region::Polygon(&tri)).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn min_width_aligned_rectangle() {
        let d = rect(4.0, 1.0);
        let (r, w) = min_width_direction(&Region::Polygon(&d), 720).unwrap();
        assert!(r.abs() < 1e-12, "r = {r}");
        assert!((w - 1.0).abs() < 1e-9);
    }

    #[test]
    fn min_width_triangle_altitude() {
        // Min width of the 3-4-5 triangle is the altitude onto the
        // hypotenuse: 2·area/5 = 2.4 (frozen from a π/7200 sweep).
        let d = ConvexDomain::from_polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(4.0, 0.0),
            Point::new(0.0, 3.0),
        ])
        .unwrap();
        let (_, w) = min_width_direction(&Region::Polygon(&d), 7200).unwrap();
        assert!((w - 2.4).abs() < 5e-4, "w = {w}");
    }

    #[test]
    fn min_width_tie_break_square() {
        let d = rect(2.0, 2.0);
        let (r, w) = min_width_direction(&Region::Polygon(&d), 720).unwrap();
        assert!(r.abs() < 1e-12, "tie should resolve to 0, got {r}");
        assert!((w - 2.0).abs() < 1e-9);
    }

    #[test]
    fn rotation_round_trip_and_isometry() {
        let d = ConvexDomain::from_polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(3.0, 0.0),
            Point::new(4.0, 2.0),
            Point::new(1.0, 3.0),
        ])
        .unwrap();
        let r0 = inradius(&Region::Polygon(&d)).unwrap();
        let diam0 = diameter(&Region::Polygon(&d)).unwrap();
        let rot = rotate_domain(&d, 0.7);
        assert!((inradius(&Region::Polygon(&rot)).unwrap() - r0).abs() < 1e-9);
        assert!((diameter(&Region::Polygon(&rot)).unwrap() - diam0).abs() < 1e-9);
        let back = rotate_domain(&rot, -0.7);
        for (p, q) in d.vertices().iter().zip(back.vertices()) {
            assert!((*p - *q).norm() < 1e-12);
        }
        let same = rotate_domain(&d, 0.0);
        for (p, q) in d.vertices().iter().zip(same.vertices()) {
            assert!((*p - *q).norm() < 1e-15);
        }
    }

    #[test]
    fn john_ellipse_square_is_incircle() {
        let d = rect(2.0, 2.0);
        let (e, kappa) = john_ellipse(&Region::Polygon(&d), 720).unwrap();
        assert!((e.center.x - 1.0).abs() < 1e-6 && (e.center.y - 1.0).abs() < 1e-6);
        assert!((e.semi_major - 1.0).abs() < 1e-6, "p = {}", e.semi_major);
        assert!((e.semi_minor - 1.0).abs() < 1e-6, "q = {}", e.semi_minor);
        assert!((kappa - 2.0_f64.sqrt()).abs() < 1e-5, "kappa = {kappa}");
    }

    #[test]
    fn john_ellipse_rectangle_axes() {
        let d = rect(4.0, 1.0);
        let (e, kappa) = john_ellipse(&Region::Polygon(&d), 720).unwrap();
        assert!((e.semi_major - 2.0).abs() < 1e-6);
        assert!((e.semi_minor - 0.5).abs() < 1e-6);
        assert!((kappa - 2.0_f64.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn john_ellipse_unit_right_triangle() {
        // Chebyshev-center construction: center at the incenter, which is
        // near the Steiner-inellipse center (1/3, 1/3).
        let d = ConvexDomain::from_polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap();
        let (e, kappa) = john_ellipse(&Region::Polygon(&d), 720).unwrap();
        assert!((e.center.x - 1.0 / 3.0).abs() < 0.06);
        assert!((e.center.y - 1.0 / 3.0).abs() < 0.06);
        assert!((1.0..=4.0).contains(&kappa), "kappa = {kappa}");
        for k in 0..256 {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 256.0;
            assert!(d.contains(e.boundary_point(t), 1e-9));
        }
    }

    #[test]
    fn graph_form_round_trip() {
        let d = ConvexDomain::from_graph(
            0.0,
            4.0,
            vec![Point::new(0.0, 0.0), Point::new(4.0, 0.0)],
            vec![
                Point::new(0.0, 1.0),
                Point::new(2.0, 2.0),
                Point::new(4.0, 1.0),
            ],
        )
        .unwrap();
        assert!((d.area() - 6.0).abs() < 1e-12);
        let gf = d.graph_form();
        assert_eq!(gf.a, 0.0);
        assert_eq!(gf.b, 4.0);
        assert_eq!(gf.g1.len(), 2);
        assert_eq!(gf.g2.len(), 3);
    }

    #[test]
    fn graph_form_rejects_nonconvex_lower() {
        let r = ConvexDomain::from_graph(
            0.0,
            4.0,
            vec![
                Point::new(0.0, 0.0),
                Point::new(2.0, 0.5),
                Point::new(4.0, 0.0),
            ],
            vec![Point::new(0.0, 2.0), Point::new(4.0, 2.0)],
        );
        assert!(r.is_err());
    }

    #[test]
    fn sublevel_monotone_in_c() {
        let d = rect(2.0, 2.0);
        let grid = GridSpec::covering(0.0, 2.0, 0.0, 2.0, 0.1);
        // A synthetic convex potential.
        let v = |p: Point| 1.0 + (p.x - 1.0).powi(2) + (p.y - 1.0).powi(2);
        let m1 = sublevel_region(&d, v, 0.2, &grid).unwrap();
        let m2 = sublevel_region(&d, v, 0.8, &grid).unwrap();
        assert!(m1.subset_of(&m2));
        assert!(!m1.is_empty());
    }

    #[test]
    fn sublevel_grid_mismatch() {
        let d = rect(2.0, 2.0);
        let grid = GridSpec::covering(0.0, 1.0, 0.0, 1.0, 0.1);
        let r = sublevel_region(&d, |_| 1.0, 0.1, &grid);
        assert!(matches!(r, Err(Error::GridMismatch(_))));
    }

    #[test]
    fn width_at_least_twice_inradius() {
        let d = ConvexDomain::from_polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(5.0, -1.0),
            Point::new(6.0, 3.0),
            Point::new(2.0, 4.0),
        ])
        .unwrap();
        let (_, w) = min_width_direction(&Region::Polygon(&d), 720).unwrap();
        let r = inradius(&Region::Polygon(&d)).unwrap();
        assert!(w >= 2.0 * r - 1e-9, "w = {w}, r = {r}");
    }
}
