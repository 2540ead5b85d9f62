//! The 2D Dirichlet eigenproblem on the masked grid: assembly, smallest
//! eigenpair, the cross-section mass profile H(x), level sets and the
//! log-concavity diagnostics.

pub mod marching;
pub mod solver;

use crate::error::Error;
use crate::geometry::{self, polygon, ConvexDomain, Ellipse, GridSpec, Point, Region, RegionMask};
use crate::potential::{Potential, H_FLOOR};
use crate::Result;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Interior grid: nodes strictly inside Ω with h ≥ 1e-4, largest
/// 4-connected component.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Grid2d {
    pub mask: RegionMask,
    /// Nodes dropped when keeping the largest connected component.
    pub dropped_nodes: usize,
}

impl Grid2d {
    pub fn build(domain: &ConvexDomain, potential: &Potential, delta: f64) -> Result<Grid2d> {
        let (xmin, xmax, ymin, ymax) = domain.bbox();
        let spec = GridSpec::covering(xmin, xmax, ymin, ymax, delta);
        let scale = (xmax - xmin).max(ymax - ymin);
        let margin = 1e-12 * (1.0 + scale);
        let mut mask = RegionMask::new_empty(spec);
        for j in 0..mask.spec.ny {
            for i in 0..mask.spec.nx {
                let p = mask.spec.node(i, j);
                if domain.contains_strict(p, margin) && potential.h_at(p) >= H_FLOOR {
                    let idx = mask.spec.index(i, j);
                    mask.inside[idx] = true;
                }
            }
        }
        let dropped_nodes = mask.keep_largest_component();
        if mask.is_empty() {
            return Err(Error::EmptyDomain("no interior grid node"));
        }
        Ok(Grid2d {
            mask,
            dropped_nodes,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.mask.spec
    }

    pub fn delta(&self) -> f64 {
        self.mask.spec.delta
    }

    /// Abscissas of the grid columns.
    pub fn x_levels(&self) -> Vec<f64> {
        (0..self.mask.spec.nx)
            .map(|i| self.mask.spec.node(i, 0).x)
            .collect()
    }
}

/// Resolution rule Δ ≤ min(1, L1)/16, with 1% slack covering the
/// bisection tolerance of the L1 estimate.
pub fn validate_resolution(delta: f64, l1: f64) -> Result<()> {
    let bound = l1.min(1.0) / 16.0;
    if delta > bound * (1.0 + 1e-2) {
        return Err(Error::ResolutionTooCoarse(format!(
            "delta = {delta} exceeds min(1, L1)/16 = {bound}"
        )));
    }
    Ok(())
}

/// Sparse symmetric 5-point operator -Δ + V on the interior nodes, with
/// Dirichlet conditions imposed by excluding exterior nodes.
#[derive(Clone, Debug)]
pub struct Operator2d {
    pub grid: Grid2d,
    /// Unknown index per grid node, -1 for exterior.
    unknown_of_node: Vec<i32>,
    /// Grid node per unknown.
    node_of_unknown: Vec<u32>,
    /// Potential at each unknown.
    v: Vec<f64>,
}

impl Operator2d {
    pub fn n(&self) -> usize {
        self.node_of_unknown.len()
    }

    pub fn delta(&self) -> f64 {
        self.grid.delta()
    }

    pub fn potential_at_unknown(&self, k: usize) -> f64 {
        self.v[k]
    }

    pub fn node_of(&self, k: usize) -> (usize, usize) {
        let idx = self.node_of_unknown[k] as usize;
        (idx % self.grid.spec().nx, idx / self.grid.spec().nx)
    }

    pub fn diag(&self) -> Vec<f64> {
        let inv2 = 1.0 / (self.delta() * self.delta());
        self.v.iter().map(|vi| 4.0 * inv2 + vi).collect()
    }

    /// y = A x, rows in parallel (each row is an independent fixed
    /// expression, so the result does not depend on thread count).
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let nx = self.grid.spec().nx as i64;
        let inv2 = 1.0 / (self.delta() * self.delta());
        let uon = &self.unknown_of_node;
        let non = &self.node_of_unknown;
        let v = &self.v;
        y.par_iter_mut().enumerate().for_each(|(k, yk)| {
            let idx = non[k] as i64;
            let mut s = (4.0 * inv2 + v[k]) * x[k];
            for d in [-1i64, 1, -nx, nx] {
                let nb = idx + d;
                let u = uon[nb as usize];
                if u >= 0 {
                    s -= inv2 * x[u as usize];
                }
            }
            *yk = s;
        });
    }

    pub fn rayleigh(&self, x: &[f64]) -> f64 {
        let mut ax = vec![0.0; x.len()];
        self.matvec(x, &mut ax);
        let num: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum();
        let den: f64 = x.iter().map(|a| a * a).sum();
        num / den
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.n();
        let nx = self.grid.spec().nx as i64;
        let inv2 = 1.0 / (self.delta() * self.delta());
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = 4.0 * inv2 + self.v[k];
            let idx = self.node_of_unknown[k] as i64;
            for d in [-1i64, 1, -nx, nx] {
                let u = self.unknown_of_node[(idx + d) as usize];
                if u >= 0 {
                    m[(k, u as usize)] = -inv2;
                }
            }
        }
        m
    }

    /// Scatter an unknown-ordered vector onto the full grid (0 outside).
    pub fn scatter(&self, x: &[f64]) -> Vec<f64> {
        let mut field = vec![0.0; self.grid.spec().len()];
        for (k, &node) in self.node_of_unknown.iter().enumerate() {
            field[node as usize] = x[k];
        }
        field
    }

    /// Overwrite the entries on strongly diagonally dominated rows
    /// (diag ≥ threshold·(1+|ρ|), i.e. deep in the capped-potential
    /// region) with the value slaved to their neighbors by the row
    /// equation (A - ρ)x = 0. Gauss-Seidel sweeps in fixed row order;
    /// removes iteration noise that the huge diagonals would otherwise
    /// amplify into the residual.
    pub fn slave_stiff_rows(&self, x: &mut [f64], rho: f64, threshold: f64) {
        let nx = self.grid.spec().nx as i64;
        let inv2 = 1.0 / (self.delta() * self.delta());
        let bar = threshold * (1.0 + rho.abs());
        let stiff: Vec<usize> = (0..self.n())
            .filter(|&k| 4.0 * inv2 + self.v[k] >= bar)
            .collect();
        if stiff.is_empty() {
            return;
        }
        for _ in 0..60 {
            let mut change = 0.0_f64;
            for &k in &stiff {
                let idx = self.node_of_unknown[k] as i64;
                let mut s = 0.0;
                for d in [-1i64, 1, -nx, nx] {
                    let u = self.unknown_of_node[(idx + d) as usize];
                    if u >= 0 {
                        s += x[u as usize];
                    }
                }
                let new = s * inv2 / (4.0 * inv2 + self.v[k] - rho);
                change = change.max((new - x[k]).abs());
                x[k] = new;
            }
            if change <= 1e-18 {
                break;
            }
        }
    }
}

/// Assemble the operator on the masked grid. The boundary rows never
/// reference exterior nodes, which is exactly the Dirichlet condition.
pub fn assemble_2d(potential: &Potential, grid: &Grid2d) -> Result<Operator2d> {
    let spec = grid.spec();
    // One node of margin exists on every side by construction, so the
    // ±1/±nx neighbor indexing never leaves the array.
    let mut unknown_of_node = vec![-1i32; spec.len()];
    let mut node_of_unknown = Vec::new();
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let idx = spec.index(i, j);
            if grid.mask.inside[idx] {
                unknown_of_node[idx] = node_of_unknown.len() as i32;
                node_of_unknown.push(idx as u32);
            }
        }
    }
    if node_of_unknown.is_empty() {
        return Err(Error::EmptyDomain("empty interior mask"));
    }
    let v: Vec<f64> = node_of_unknown
        .iter()
        .map(|&idx| {
            let i = idx as usize % spec.nx;
            let j = idx as usize / spec.nx;
            potential.eval_at(spec.node(i, j))
        })
        .collect();
    Ok(Operator2d {
        grid: grid.clone(),
        unknown_of_node,
        node_of_unknown,
        v,
    })
}

/// First eigenpair with the max-normalization convention.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenPair2d {
    pub lambda: f64,
    /// Field on the full grid, 0 on masked-out nodes, max = 1.
    pub u: Vec<f64>,
    pub residual: f64,
    pub grid: Grid2d,
}

impl EigenPair2d {
    pub fn u_at(&self, i: usize, j: usize) -> f64 {
        self.u[self.grid.spec().index(i, j)]
    }

    /// Node of the maximum (row-major first on ties).
    pub fn argmax_node(&self) -> (usize, usize) {
        let mut best = 0;
        for (idx, &v) in self.u.iter().enumerate() {
            if v > self.u[best] {
                best = idx;
            }
        }
        (best % self.grid.spec().nx, best / self.grid.spec().nx)
    }
}

/// Smallest eigenpair of the assembled operator; the eigenvector is
/// renormalized to max u = 1 after the L²-normalized iteration.
pub fn first_eig_2d(op: &Operator2d) -> Result<EigenPair2d> {
    let (lambda, x, residual) = solver::smallest_eigenpair(op, 500)?;
    let mut u = op.scatter(&x);
    let umax = u.iter().cloned().fold(0.0_f64, f64::max);
    if umax <= 0.0 {
        return Err(Error::EigSolveFailed(
            "eigenvector has no positive part".into(),
        ));
    }
    for v in &mut u {
        *v /= umax;
    }
    Ok(EigenPair2d {
        lambda,
        u,
        residual,
        grid: op.grid.clone(),
    })
}

/// Dense cross-validation oracle (n ≤ 4000): full symmetric
/// eigendecomposition, smallest pair, same normalization.
pub fn dense_oracle_2d(op: &Operator2d) -> Result<(f64, Vec<f64>)> {
    let (lambda, x) = solver::dense_smallest(op, 4000)?;
    let mut u = op.scatter(&x);
    let umax = u.iter().cloned().fold(0.0_f64, f64::max);
    for v in &mut u {
        *v /= umax;
    }
    Ok((lambda, u))
}

/// μ profile built from the operator's own mask columns: each column's
/// interior nodes form a tridiagonal -d²/dy² + V with the same implied
/// Dirichlet boundary as the 5-point scheme. With this profile the
/// discrete sandwich μ ≤ λ holds sharply (no O(Δ) boundary mismatch),
/// so it feeds the eigenvalue and Carleman checks.
pub fn column_mu_profile(op: &Operator2d) -> crate::sturm1d::MuProfile {
    use crate::sturm1d::ColumnState;
    let spec = op.grid.spec();
    let delta = op.delta();
    let inv2 = 1.0 / (delta * delta);
    let v_max = crate::potential::DEFAULT_V_MAX;
    let mut xs = Vec::with_capacity(spec.nx);
    let mut mu = Vec::with_capacity(spec.nx);
    let mut state = Vec::with_capacity(spec.nx);
    // Smallest eigenvalue of a symmetric tridiagonal with constant
    // off-diagonal -1/Δ², valid for any n ≥ 1.
    let smallest = |diag: &[f64]| -> f64 {
        let e2 = inv2 * inv2;
        let count_below = |lam: f64| -> usize {
            let guard = 1e-300_f64;
            let mut count = 0;
            let mut q = diag[0] - lam;
            if q < 0.0 {
                count += 1;
            }
            for &d in &diag[1..] {
                let qs = if q.abs() < guard {
                    if q >= 0.0 {
                        guard
                    } else {
                        -guard
                    }
                } else {
                    q
                };
                q = (d - lam) - e2 / qs;
                if q < 0.0 {
                    count += 1;
                }
            }
            count
        };
        let mut lo = diag.iter().cloned().fold(f64::INFINITY, f64::min) - 2.0 * inv2 - 1.0;
        let mut hi = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 2.0 * inv2 + 1.0;
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 1e-10 * (1.0 + mid.abs()) {
                break;
            }
            if count_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    };
    for i in 0..spec.nx {
        xs.push(spec.node(i, 0).x);
        let mut diag = Vec::new();
        for j in 0..spec.ny {
            let idx = spec.index(i, j);
            if op.grid.mask.inside[idx] {
                let u = op.unknown_of_node[idx];
                diag.push(2.0 * inv2 + op.v[u as usize]);
            }
        }
        if diag.is_empty() {
            mu.push(v_max);
            state.push(ColumnState::Empty);
        } else {
            mu.push(smallest(&diag));
            state.push(ColumnState::Solved);
        }
    }
    let mut mu_star = f64::INFINITY;
    let mut x_star = xs[0];
    for i in 0..xs.len() {
        if state[i] == ColumnState::Solved && mu[i] < mu_star {
            mu_star = mu[i];
            x_star = xs[i];
        }
    }
    crate::sturm1d::MuProfile {
        xs,
        mu,
        state,
        v_max,
        mu_star,
        x_star,
    }
}

/// Cross-section mass profile H(x) = ∫ u(x, ·)² dy per grid column.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HProfile {
    pub xs: Vec<f64>,
    pub h: Vec<f64>,
    pub a_max: f64,
    pub x_at_max: f64,
}

pub fn h_profile(pair: &EigenPair2d) -> HProfile {
    let spec = pair.grid.spec();
    let dy = spec.delta;
    let mut xs = Vec::with_capacity(spec.nx);
    let mut h = Vec::with_capacity(spec.nx);
    let mut a_max = 0.0;
    let mut x_at_max = spec.node(0, 0).x;
    for i in 0..spec.nx {
        let x = spec.node(i, 0).x;
        // Trapezoid rule; the boundary values are zero so this is the
        // plain sum over the column.
        let mut s = 0.0;
        for j in 0..spec.ny {
            let v = pair.u[spec.index(i, j)];
            s += v * v;
        }
        let hx = s * dy;
        if hx > a_max {
            a_max = hx;
            x_at_max = x;
        }
        xs.push(x);
        h.push(hx);
    }
    HProfile {
        xs,
        h,
        a_max,
        x_at_max,
    }
}

/// ∫ u² over the grid (2D trapezoid; zero outside the mask).
pub fn mass_l2(pair: &EigenPair2d) -> f64 {
    let d = pair.grid.delta();
    pair.u.iter().map(|v| v * v).sum::<f64>() * d * d
}

/// Superlevel-set geometry at one level.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelSetReport {
    pub level: f64,
    pub polylines: Vec<Vec<Point>>,
    pub mask: RegionMask,
    pub x_extent: f64,
    pub y_extent: f64,
    pub inradius: f64,
    pub diameter: f64,
    pub ellipse: Ellipse,
    pub ellipse_kappa: f64,
    pub eccentricity: f64,
    /// mask area / hull area, with the discretization bound it must meet.
    pub hull_area_ratio: f64,
    pub hull_area_bound: f64,
}

/// Level set { u ≥ c } with its contours and geometric measurements.
pub fn level_set(pair: &EigenPair2d, c: f64) -> Result<LevelSetReport> {
    if !(0.0 < c && c < 1.0) {
        return Err(Error::InvalidConfig(format!("level {c} outside (0, 1)")));
    }
    let spec = pair.grid.spec().clone();
    let mut mask = RegionMask::new_empty(spec.clone());
    for idx in 0..spec.len() {
        if pair.u[idx] >= c {
            mask.inside[idx] = true;
        }
    }
    if mask.is_empty() {
        return Err(Error::LevelEmpty(c));
    }
    let polylines = marching::contours(&pair.u, &spec, c);
    let pts: Vec<Point> = if polylines.is_empty() {
        mask.node_points()
    } else {
        polylines.iter().flatten().cloned().collect()
    };
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for p in &pts {
        xmin = xmin.min(p.x);
        xmax = xmax.max(p.x);
        ymin = ymin.min(p.y);
        ymax = ymax.max(p.y);
    }
    let region = Region::Mask(&mask);
    let inradius = geometry::inradius(&region)?;
    let diameter = polygon::diameter_of(&pts).max(0.0);
    let (ellipse, ellipse_kappa) = geometry::john_ellipse(&region, 720)?;
    let area = mask.area();
    let perimeter = mask.perimeter();
    let hull_area_ratio = mask.hull_area_ratio();
    let hull_area_bound = 1.0 - 5.0 * spec.delta * perimeter / area.max(1e-300);
    Ok(LevelSetReport {
        level: c,
        polylines,
        mask,
        x_extent: xmax - xmin,
        y_extent: ymax - ymin,
        inradius,
        diameter,
        ellipse,
        ellipse_kappa,
        eccentricity: if inradius > 0.0 {
            diameter / inradius
        } else {
            f64::INFINITY
        },
        hull_area_ratio,
        hull_area_bound,
    })
}

/// Discrete log-concavity report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LogConcavityReport {
    pub floor: f64,
    pub tolerance: f64,
    pub max_grad_log: f64,
    pub tested: usize,
    pub violations: usize,
    pub worst_excess: f64,
    pub pass: bool,
}

/// Second differences of log u along x, y and both diagonals on nodes
/// above the floor: all must stay ≤ 10·Δ·max|∇ log u|.
///
/// Nodes in the first lattice ring next to the mask complement are
/// excluded: the masked Dirichlet boundary is a staircase, and u carries
/// a fixed O(1) log-kink along slanted boundaries there (it does not
/// shrink with Δ), which says nothing about the concavity of the
/// underlying eigenfunction.
pub fn log_concavity_check(pair: &EigenPair2d, floor: f64) -> LogConcavityReport {
    let spec = pair.grid.spec();
    let (nx, ny) = (spec.nx, spec.ny);
    let at = |i: usize, j: usize| pair.u[spec.index(i, j)];
    let delta = spec.delta;
    let edt = pair.grid.mask.distance_to_complement();
    let interior = |i: usize, j: usize| edt[spec.index(i, j)] >= 2.0 * delta;
    // Gradient of log u where all four axis neighbors clear the floor.
    let mut max_grad = 0.0_f64;
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let u0 = at(i, j);
            if u0 <= floor {
                continue;
            }
            let (l, r, d, u) = (at(i - 1, j), at(i + 1, j), at(i, j - 1), at(i, j + 1));
            if l > floor && r > floor && d > floor && u > floor {
                let gx = (r.ln() - l.ln()) / (2.0 * delta);
                let gy = (u.ln() - d.ln()) / (2.0 * delta);
                max_grad = max_grad.max(gx.hypot(gy));
            }
        }
    }
    let tolerance = 10.0 * delta * max_grad;
    let dirs: [(i64, i64); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];
    let mut tested = 0usize;
    let mut violations = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let u0 = at(i, j);
            if u0 <= floor || !interior(i, j) {
                continue;
            }
            for (dx, dy) in dirs {
                let ip = (i as i64 + dx) as usize;
                let jp = (j as i64 + dy) as usize;
                let im = (i as i64 - dx) as usize;
                let jm = (j as i64 - dy) as usize;
                let up = at(ip, jp);
                let um = at(im, jm);
                if up <= floor || um <= floor {
                    continue;
                }
                tested += 1;
                let step2 = ((dx * dx + dy * dy) as f64) * delta * delta;
                let second = (up.ln() - 2.0 * u0.ln() + um.ln()) / step2;
                worst = worst.max(second - tolerance);
                if second > tolerance {
                    violations += 1;
                }
            }
        }
    }
    LogConcavityReport {
        floor,
        tolerance,
        max_grad_log: max_grad,
        tested,
        violations,
        worst_excess: if worst.is_finite() { worst } else { 0.0 },
        pass: violations == 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential;

    fn rect_domain(a: f64, b: f64) -> ConvexDomain {
        ConvexDomain::from_polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(a, 0.0),
            Point::new(a, b),
            Point::new(0.0, b),
        ])
        .unwrap()
    }

    fn rect_setup(a: f64, b: f64, delta: f64) -> (ConvexDomain, Potential, Operator2d) {
        let d = rect_domain(a, b);
        let pot = Potential::new(potential::constant(&d));
        let grid = Grid2d::build(&d, &pot, delta).unwrap();
        let op = assemble_2d(&pot, &grid).unwrap();
        (d, pot, op)
    }

    #[test]
    fn stencil_matches_hand_written_3x3() {
        // 3×3 interior block with V ≡ 1 and Δ = 1.
        let spec = GridSpec::covering(0.0, 4.0, 0.0, 4.0, 1.0);
        let mut mask = RegionMask::new_empty(spec);
        for j in 2..5 {
            for i in 2..5 {
                let idx = mask.spec.index(i, j);
                mask.inside[idx] = true;
            }
        }
        let grid = Grid2d {
            mask,
            dropped_nodes: 0,
        };
        let d = rect_domain(4.0, 4.0);
        let pot = Potential::new(potential::constant(&d));
        let op = assemble_2d(&pot, &grid).unwrap();
        assert_eq!(op.n(), 9);
        let m = op.to_dense();
        for k in 0..9 {
            assert_eq!(m[(k, k)], 5.0);
        }
        // Interior node 4 couples to 1, 3, 5, 7.
        for &nb in &[1usize, 3, 5, 7] {
            assert_eq!(m[(4, nb)], -1.0);
        }
        assert_eq!(m[(0, 4)], 0.0);
        // Symmetry is exact.
        let mt = m.transpose();
        assert_eq!(m, mt);
        // Gershgorin lower bound ≥ min V = 1 (here Δ = 1).
        for k in 0..9 {
            let off: f64 = (0..9).filter(|&l| l != k).map(|l| m[(k, l)].abs()).sum();
            assert!(m[(k, k)] - off >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn rectangle_separable_eigenvalue() {
        let (_, _, op) = rect_setup(2.0, 1.0, 1.0 / 32.0);
        let pair = first_eig_2d(&op).unwrap();
        let pi = std::f64::consts::PI;
        let exact = 1.0 + pi * pi / 4.0 + pi * pi;
        assert!(
            (pair.lambda - exact).abs() < 0.01 * exact,
            "lambda = {}, exact = {exact}",
            pair.lambda
        );
        assert!(pair.residual <= 1e-8);
        assert!(pair.lambda >= 1.0);
        // Positive on interior unknowns, maximum 1 attained inside.
        let spec = pair.grid.spec();
        let mut max_v = 0.0;
        for idx in 0..spec.len() {
            if pair.grid.mask.inside[idx] {
                assert!(pair.u[idx] > 0.0);
                max_v = f64::max(max_v, pair.u[idx]);
            }
        }
        assert_eq!(max_v, 1.0);
        let (im, jm) = pair.argmax_node();
        assert!(pair.grid.mask.get(im, jm));
    }

    #[test]
    fn iterative_matches_dense_oracle() {
        let (_, _, op) = rect_setup(1.5, 1.0, 1.0 / 16.0);
        assert!(op.n() <= 2500, "n = {}", op.n());
        let pair = first_eig_2d(&op).unwrap();
        let (lam_d, u_d) = dense_oracle_2d(&op).unwrap();
        assert!(
            (pair.lambda - lam_d).abs() < 1e-8,
            "{} vs {lam_d}",
            pair.lambda
        );
        let err: f64 = pair
            .u
            .iter()
            .zip(&u_d)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "eigenvector deviation {err}");
    }

    #[test]
    fn single_node_system() {
        let spec = GridSpec::covering(0.0, 2.0, 0.0, 2.0, 1.0);
        let mut mask = RegionMask::new_empty(spec);
        let idx = mask.spec.index(2, 2);
        mask.inside[idx] = true;
        let grid = Grid2d {
            mask,
            dropped_nodes: 0,
        };
        let d = rect_domain(2.0, 2.0);
        let pot = Potential::new(potential::constant(&d));
        let op = assemble_2d(&pot, &grid).unwrap();
        let pair = first_eig_2d(&op).unwrap();
        assert!(
            (pair.lambda - 5.0).abs() < 1e-10,
            "lambda = {}",
            pair.lambda
        );
        let (lam_d, _) = dense_oracle_2d(&op).unwrap();
        assert!((lam_d - 5.0).abs() < 1e-12);
    }

    #[test]
    fn two_node_chain_analytic() {
        let spec = GridSpec::covering(0.0, 3.0, 0.0, 3.0, 1.0);
        let mut mask = RegionMask::new_empty(spec);
        for i in [2usize, 3] {
            let idx = mask.spec.index(i, 2);
            mask.inside[idx] = true;
        }
        let grid = Grid2d {
            mask,
            dropped_nodes: 0,
        };
        let d = rect_domain(3.0, 3.0);
        let pot = Potential::new(potential::constant(&d));
        let op = assemble_2d(&pot, &grid).unwrap();
        // [[5, -1], [-1, 5]] → eigenvalues 4 and 6.
        let (lam, _) = dense_oracle_2d(&op).unwrap();
        assert!((lam - 4.0).abs() < 1e-12);
        let pair = first_eig_2d(&op).unwrap();
        assert!((pair.lambda - 4.0).abs() < 1e-9);
    }

    #[test]
    fn reflection_symmetry_of_u() {
        let (_, _, op) = rect_setup(2.0, 1.0, 1.0 / 16.0);
        let pair = first_eig_2d(&op).unwrap();
        let spec = pair.grid.spec();
        // Mirror the grid in x about the rectangle center x = 1.
        for j in 0..spec.ny {
            for i in 0..spec.nx {
                let p = spec.node(i, j);
                let xm = 2.0 - p.x;
                let im = ((xm - spec.origin.x) / spec.delta).round() as isize;
                if im >= 0 && (im as usize) < spec.nx {
                    let v = pair.u[spec.index(i, j)];
                    let vm = pair.u[spec.index(im as usize, j)];
                    assert!((v - vm).abs() < 1e-8, "asym {v} vs {vm}");
                }
            }
        }
    }

    #[test]
    fn rayleigh_quotient_equals_lambda() {
        let (_, _, op) = rect_setup(2.0, 1.0, 1.0 / 16.0);
        let pair = first_eig_2d(&op).unwrap();
        // Collect the unknown-ordered vector back.
        let mut x = Vec::with_capacity(op.n());
        for k in 0..op.n() {
            let (i, j) = op.node_of(k);
            x.push(pair.u[op.grid.spec().index(i, j)]);
        }
        let rho = op.rayleigh(&x);
        assert!((rho - pair.lambda).abs() <= 1e-10 * (1.0 + pair.lambda));
    }

    #[test]
    fn grid_refinement_second_order() {
        let pi = std::f64::consts::PI;
        let exact = 1.0 + pi * pi / 4.0 + pi * pi;
        let (_, _, op1) = rect_setup(2.0, 1.0, 1.0 / 16.0);
        let (_, _, op2) = rect_setup(2.0, 1.0, 1.0 / 32.0);
        let e1 = (first_eig_2d(&op1).unwrap().lambda - exact).abs();
        let e2 = (first_eig_2d(&op2).unwrap().lambda - exact).abs();
        let ratio = e1 / e2;
        assert!(ratio > 2.5 && ratio < 6.0, "refinement ratio {ratio}");
    }

    #[test]
    fn h_profile_consistency() {
        let (_, _, op) = rect_setup(2.0, 1.0, 1.0 / 16.0);
        let pair = first_eig_2d(&op).unwrap();
        let prof = h_profile(&pair);
        assert!(prof.h.iter().all(|&v| v >= 0.0));
        let total: f64 = prof.h.iter().sum::<f64>() * pair.grid.delta();
        let mass = mass_l2(&pair);
        assert!((total - mass).abs() < 1e-10 * (1.0 + mass));
        // Separable case: H(x) ∝ sin²(πx/2).
        let pi = std::f64::consts::PI;
        let a_max = prof.a_max;
        for (x, hv) in prof.xs.iter().zip(&prof.h) {
            if *x <= 0.0 || *x >= 2.0 {
                assert_eq!(*hv, 0.0);
                continue;
            }
            let expect = a_max * (pi * x / 2.0).sin().powi(2);
            assert!(
                (hv - expect).abs() < 0.02 * a_max,
                "H({x}) = {hv} vs {expect}"
            );
        }
    }

    #[test]
    fn level_sets_nest_and_measure() {
        let (_, _, op) = rect_setup(2.0, 1.0, 1.0 / 32.0);
        let pair = first_eig_2d(&op).unwrap();
        let l25 = level_set(&pair, 0.25).unwrap();
        let l50 = level_set(&pair, 0.5).unwrap();
        let l75 = level_set(&pair, 0.75).unwrap();
        assert!(l75.mask.subset_of(&l50.mask));
        assert!(l50.mask.subset_of(&l25.mask));
        // Analytic extents of {sin·sin ≥ c} in the separable rectangle.
        let pi = std::f64::consts::PI;
        for (rep, c) in [(&l25, 0.25_f64), (&l50, 0.5), (&l75, 0.75)] {
            let y_half = (pi - 2.0 * c.asin()) / (2.0 * pi);
            let x_expect = 2.0 * y_half * 2.0;
            let y_expect = 2.0 * y_half;
            assert!(
                (rep.x_extent - x_expect).abs() < 0.08,
                "c={c}: x_extent {} vs {x_expect}",
                rep.x_extent
            );
            assert!(
                (rep.y_extent - y_expect).abs() < 0.08,
                "c={c}: y_extent {} vs {y_expect}",
                rep.y_extent
            );
            assert!(rep.hull_area_ratio >= rep.hull_area_bound, "hull ratio");
            assert!(rep.ellipse_kappa >= 1.0);
        }
        assert!(matches!(
            level_set(&pair, 1.5),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn log_concavity_of_separable_ground_state() {
        let (_, _, op) = rect_setup(2.0, 1.0, 1.0 / 32.0);
        let pair = first_eig_2d(&op).unwrap();
        let rep = log_concavity_check(&pair, 1e-8);
        assert!(rep.pass, "{rep:?}");
        assert!(rep.tested > 1000);

        // Corrupt the field with a bump: the check must fail.
        let mut bad = pair.clone();
        let spec = bad.grid.spec().clone();
        for j in 0..spec.ny {
            for i in 0..spec.nx {
                let idx = spec.index(i, j);
                if bad.grid.mask.inside[idx] {
                    let p = spec.node(i, j);
                    let bump = 0.5 * (-((p.x - 0.5).powi(2) + (p.y - 0.3).powi(2)) / 0.002).exp();
                    bad.u[idx] = (bad.u[idx] + bump).min(1.0);
                }
            }
        }
        let rep_bad = log_concavity_check(&bad, 1e-8);
        assert!(!rep_bad.pass, "corrupted field must fail");
    }

    #[test]
    fn resolution_rule() {
        assert!(validate_resolution(1.0 / 64.0, 0.5).is_ok());
        assert!(validate_resolution(1.0 / 15.0, 0.5).is_err());
    }
}
