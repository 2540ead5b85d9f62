//! Free functions on convex polygons given as CCW vertex lists.

use super::Point;

/// Signed area via the shoelace formula. Positive for CCW orientation.
pub fn signed_area(vs: &[Point]) -> f64 {
    if vs.len() < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..vs.len() {
        let a = vs[i];
        let b = vs[(i + 1) % vs.len()];
        s += a.x * b.y - b.x * a.y;
    }
    0.5 * s
}

/// Area centroid. Falls back to the vertex average for degenerate polygons.
pub fn centroid(vs: &[Point]) -> Point {
    let a = signed_area(vs);
    if a.abs() < 1e-300 {
        let n = vs.len() as f64;
        let (mut sx, mut sy) = (0.0, 0.0);
        for v in vs {
            sx += v.x;
            sy += v.y;
        }
        return Point::new(sx / n, sy / n);
    }
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..vs.len() {
        let p = vs[i];
        let q = vs[(i + 1) % vs.len()];
        let w = p.x * q.y - q.x * p.y;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    Point::new(cx / (6.0 * a), cy / (6.0 * a))
}

/// Convex hull (Andrew monotone chain), returned CCW without the closing point.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    pts.dedup_by(|a, b| a.x == b.x && a.y == b.y);
    let n = pts.len();
    if n <= 2 {
        return pts;
    }
    let cross =
        |o: Point, a: Point, b: Point| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    let mut hull: Vec<Point> = Vec::with_capacity(2 * n);
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev() {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Clip a convex polygon against the halfplane { p : n·p ≤ d }.
/// Sutherland–Hodgman for a single plane; output may be empty or degenerate.
pub fn clip_halfplane(vs: &[Point], n: Point, d: f64) -> Vec<Point> {
    let mut out = Vec::with_capacity(vs.len() + 1);
    let m = vs.len();
    if m == 0 {
        return out;
    }
    for i in 0..m {
        let a = vs[i];
        let b = vs[(i + 1) % m];
        let fa = n.dot(a) - d;
        let fb = n.dot(b) - d;
        if fa <= 0.0 {
            out.push(a);
        }
        if (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) {
            let t = fa / (fa - fb);
            out.push(Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
        }
    }
    out
}

/// Membership test for a convex CCW polygon with absolute slack `eps`.
pub fn contains(vs: &[Point], p: Point, eps: f64) -> bool {
    let m = vs.len();
    if m == 0 {
        return false;
    }
    if m == 1 {
        return (p - vs[0]).norm() <= eps;
    }
    for i in 0..m {
        let a = vs[i];
        let b = vs[(i + 1) % m];
        let cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        let len = (b - a).norm().max(1e-300);
        if cross / len < -eps {
            return false;
        }
    }
    true
}

/// Halfplane representation of the polygon edges: (outward unit normal, offset).
/// The polygon is { p : n_i·p ≤ d_i for all i }.
pub fn edge_halfplanes(vs: &[Point]) -> Vec<(Point, f64)> {
    let m = vs.len();
    let mut hs = Vec::with_capacity(m);
    for i in 0..m {
        let a = vs[i];
        let b = vs[(i + 1) % m];
        let e = b - a;
        let len = e.norm();
        if len < 1e-300 {
            continue;
        }
        // CCW polygon: outward normal points right of the edge direction.
        let n = Point::new(e.y / len, -e.x / len);
        hs.push((n, n.dot(a)));
    }
    hs
}

/// Chebyshev center and radius of a convex polygon: the deepest point and
/// the inradius. Solved by bisection on the inward offset r; the polygon
/// shrunk by r is the intersection of the edge halfplanes offset by r.
pub fn chebyshev(vs: &[Point]) -> (Point, f64) {
    let hs = edge_halfplanes(vs);
    if hs.is_empty() {
        let c = if vs.is_empty() {
            Point::new(0.0, 0.0)
        } else {
            vs[0]
        };
        return (c, 0.0);
    }
    let shrink = |r: f64| -> Vec<Point> {
        let mut poly = vs.to_vec();
        for &(n, d) in &hs {
            poly = clip_halfplane(&poly, n, d - r);
            if poly.is_empty() {
                break;
            }
        }
        poly
    };
    let mut lo = 0.0;
    let mut hi = 0.5 * diameter_of(vs) + 1e-9;
    let mut core = vs.to_vec();
    for _ in 0..200 {
        if hi - lo <= 1e-14 * (1.0 + hi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let poly = shrink(mid);
        if poly.is_empty() {
            hi = mid;
        } else {
            lo = mid;
            core = poly;
        }
    }
    // The core at lo ≈ r* is a sliver around the center; its area centroid
    // is numerically unstable, so average the vertices instead.
    let n = core.len() as f64;
    let (mut cx, mut cy) = (0.0, 0.0);
    for v in &core {
        cx += v.x;
        cy += v.y;
    }
    (Point::new(cx / n, cy / n), lo)
}

/// Maximum pairwise distance between vertices.
pub fn diameter_of(vs: &[Point]) -> f64 {
    let mut best = 0.0_f64;
    for i in 0..vs.len() {
        for j in (i + 1)..vs.len() {
            best = best.max((vs[i] - vs[j]).norm());
        }
    }
    best
}

/// Support width of a point set along the unit direction `d`.
pub fn width_along(vs: &[Point], d: Point) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in vs {
        let t = v.dot(d);
        lo = lo.min(t);
        hi = hi.max(t);
    }
    if hi < lo {
        0.0
    } else {
        hi - lo
    }
}

/// Euclidean distance from `p` to the polygon boundary (edges).
pub fn dist_to_boundary(vs: &[Point], p: Point) -> f64 {
    let m = vs.len();
    if m == 0 {
        return f64::INFINITY;
    }
    if m == 1 {
        return (p - vs[0]).norm();
    }
    let mut best = f64::INFINITY;
    for i in 0..m {
        let a = vs[i];
        let b = vs[(i + 1) % m];
        let e = b - a;
        let l2 = e.dot(e);
        let t = if l2 > 0.0 {
            ((p - a).dot(e) / l2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let q = Point::new(a.x + t * e.x, a.y + t * e.y);
        best = best.min((p - q).norm());
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square2() -> Vec<Point> {
        vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(2.0, 2.0),
            Point::new(0.0, 2.0),
        ]
    }

    #[test]
    fn chebyshev_of_square() {
        let (c, r) = chebyshev(&square2());
        assert!((r - 1.0).abs() < 1e-10, "r = {r}");
        assert!((c.x - 1.0).abs() < 1e-6 && (c.y - 1.0).abs() < 1e-6);
    }

    #[test]
    fn chebyshev_of_right_triangle_3_4() {
        // Classical incircle radius (3 + 4 - 5)/2 = 1 cross-checks the bisection.
        let tri = vec![
            Point::new(0.0, 0.0),
            Point::new(4.0, 0.0),
            Point::new(0.0, 3.0),
        ];
        let (c, r) = chebyshev(&tri);
        assert!((r - 1.0).abs() < 1e-10, "r = {r}");
        assert!((c.x - 1.0).abs() < 1e-6 && (c.y - 1.0).abs() < 1e-6);
    }

    #[test]
    fn clip_keeps_halfplane_side() {
        let sq = square2();
        let cut = clip_halfplane(&sq, Point::new(1.0, 0.0), 1.0);
        assert!((signed_area(&cut) - 2.0).abs() < 1e-12);
        for v in &cut {
            assert!(v.x <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn clip_to_empty() {
        let sq = square2();
        let cut = clip_halfplane(&sq, Point::new(1.0, 0.0), -1.0);
        assert!(cut.is_empty());
    }

    #[test]
    fn hull_of_grid_points() {
        let mut pts = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                pts.push(Point::new(i as f64, j as f64));
            }
        }
        let h = convex_hull(&pts);
        assert_eq!(h.len(), 4);
        assert!((signed_area(&h) - 16.0).abs() < 1e-12);
    }

    #[test]
    fn diameter_of_rectangle() {
        let r = vec![
            Point::new(0.0, 0.0),
            Point::new(3.0, 0.0),
            Point::new(3.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        assert!((diameter_of(&r) - 10.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn boundary_distance() {
        let sq = square2();
        assert!((dist_to_boundary(&sq, Point::new(1.0, 1.0)) - 1.0).abs() < 1e-12);
        assert!((dist_to_boundary(&sq, Point::new(3.0, 1.0)) - 1.0).abs() < 1e-12);
    }
}
