//! One-dimensional eigenvalue machinery: cross-sectional operators
//! -d²/dy² + V(x, ·), the profile μ(x), the surrogate operator
//! -d²/dx² + μ(x), and the ∂ₓψ diagnostic.

use crate::error::Error;
use crate::geometry::{ConvexDomain, Point};
use crate::potential::Potential;
use crate::Result;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Symmetric tridiagonal discretization of -d²/dy² + V on a uniform grid
/// with Dirichlet ends: diagonal 2/Δy² + V(yᵢ), off-diagonal -1/Δy².
#[derive(Clone, Debug)]
pub struct Tridiagonal1d {
    /// First interior node.
    pub y0: f64,
    pub dy: f64,
    pub diag: Vec<f64>,
}

impl Tridiagonal1d {
    pub fn new(y0: f64, dy: f64, diag: Vec<f64>) -> Result<Self> {
        if diag.len() < 3 {
            return Err(Error::CrossSectionTooThin(diag.len()));
        }
        Ok(Tridiagonal1d { y0, dy, diag })
    }

    /// Discretize the cross-section Ω(x) with spacing at most `dy_target`
    /// (the grid is fitted so both interval endpoints are Dirichlet
    /// nodes). Cross-sections thinner than 3·dy_target are rejected.
    pub fn from_cross_section(
        domain: &ConvexDomain,
        potential: &Potential,
        x: f64,
        dy_target: f64,
    ) -> Result<Self> {
        let (g1, g2) = domain
            .cross_section(x)
            .ok_or(Error::CrossSectionTooThin(0))?;
        let width = g2 - g1;
        if width < 3.0 * dy_target {
            return Err(Error::CrossSectionTooThin((width / dy_target) as usize));
        }
        let n_sub = (width / dy_target).ceil().max(4.0) as usize;
        let dy = width / n_sub as f64;
        let inv2 = 1.0 / (dy * dy);
        let diag: Vec<f64> = (1..n_sub)
            .map(|i| 2.0 * inv2 + potential.eval_at(Point::new(x, g1 + i as f64 * dy)))
            .collect();
        Tridiagonal1d::new(g1 + dy, dy, diag)
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    #[inline]
    pub fn offdiag(&self) -> f64 {
        -1.0 / (self.dy * self.dy)
    }

    /// Number of eigenvalues strictly below `lambda` (Sturm sequence via
    /// the LDLᵀ pivot signs).
    pub fn sturm_count(&self, lambda: f64) -> usize {
        let e2 = self.offdiag() * self.offdiag();
        let guard = 1e-300_f64;
        let mut count = 0;
        let mut q = self.diag[0] - lambda;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let q_safe = if q.abs() < guard {
                if q >= 0.0 {
                    guard
                } else {
                    -guard
                }
            } else {
                q
            };
            q = (self.diag[i] - lambda) - e2 / q_safe;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin bounds for the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let e = self.offdiag().abs();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let n = self.diag.len();
        for (i, &d) in self.diag.iter().enumerate() {
            let r = if i == 0 || i + 1 == n {
                e * if n == 1 { 0.0 } else { 1.0 }
            } else {
                2.0 * e
            };
            let r = if n == 1 { 0.0 } else { r };
            lo = lo.min(d - r);
            hi = hi.max(d + r);
        }
        (lo, hi)
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n();
        let e = self.offdiag();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += e * v[i - 1];
            }
            if i + 1 < n {
                s += e * v[i + 1];
            }
            out[i] = s;
        }
        out
    }
}

/// Smallest eigenvalue by Sturm-sequence bisection. The returned value is
/// the lower end of the final bracket, so no eigenvalue lies below it;
/// bracket width at termination is ≤ 1e-10·(1 + |μ|).
pub fn first_eig_1d(tri: &Tridiagonal1d) -> f64 {
    let (mut lo, mut hi) = tri.gershgorin();
    lo -= 1.0;
    hi += 1.0;
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-10 * (1.0 + mid.abs()) {
            break;
        }
        if tri.sturm_count(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// First eigenpair on a cross-section: eigenvalue, samples on the y-grid
/// (interior nodes), normalized so the trapezoid rule gives ∫ψ² dy = 1,
/// positive in the interior.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenPair1d {
    pub mu: f64,
    pub psi: Vec<f64>,
    pub y0: f64,
    pub dy: f64,
}

impl EigenPair1d {
    /// Linear interpolation with the Dirichlet zeros at both ends;
    /// 0 outside the cross-section.
    pub fn eval_at(&self, y: f64) -> f64 {
        let n = self.psi.len();
        // Grid including the boundary zeros: y0 - dy .. y0 + n·dy.
        let t = (y - (self.y0 - self.dy)) / self.dy;
        if t <= 0.0 || t >= (n + 1) as f64 {
            return 0.0;
        }
        let k = t.floor() as usize;
        let frac = t - k as f64;
        let at = |idx: usize| -> f64 {
            if idx == 0 || idx > n {
                0.0
            } else {
                self.psi[idx - 1]
            }
        };
        at(k) * (1.0 - frac) + at(k + 1) * frac
    }
}

/// Inverse iteration with a shift just below μ. Errors after 200 sweeps
/// without reaching residual 1e-8.
pub fn first_eigfun_1d(tri: &Tridiagonal1d, mu: f64) -> Result<EigenPair1d> {
    let n = tri.n();
    let shift = mu - 1e-8;
    let e = tri.offdiag();
    // Thomas factorization of the SPD matrix T - shift·I.
    let mut c_prime = vec![0.0; n];
    let mut denom = vec![0.0; n];
    denom[0] = tri.diag[0] - shift;
    c_prime[0] = e / denom[0];
    for i in 1..n {
        denom[i] = (tri.diag[i] - shift) - e * c_prime[i - 1];
        if denom[i].abs() < 1e-300 {
            denom[i] = 1e-300;
        }
        if i + 1 < n {
            c_prime[i] = e / denom[i];
        }
    }
    let solve = |rhs: &[f64]| -> Vec<f64> {
        let mut z = vec![0.0; n];
        z[0] = rhs[0] / denom[0];
        for i in 1..n {
            z[i] = (rhs[i] - e * z[i - 1]) / denom[i];
        }
        for i in (0..n - 1).rev() {
            z[i] -= c_prime[i] * z[i + 1];
        }
        z
    };
    // Positive deterministic start close to the ground state.
    let mut v: Vec<f64> = (0..n)
        .map(|i| (std::f64::consts::PI * (i + 1) as f64 / (n + 1) as f64).sin())
        .collect();
    normalize_l2(&mut v);
    let mut ok = false;
    for _ in 0..200 {
        let mut z = solve(&v);
        normalize_l2(&mut z);
        v = z;
        let av = tri.matvec(&v);
        let res: f64 = av
            .iter()
            .zip(&v)
            .map(|(a, x)| (a - mu * x) * (a - mu * x))
            .sum::<f64>()
            .sqrt();
        if res <= 1e-8 {
            ok = true;
            break;
        }
    }
    if !ok {
        return Err(Error::EigSolveFailed(
            "inverse iteration did not converge in 200 sweeps".into(),
        ));
    }
    let total: f64 = v.iter().sum();
    if total < 0.0 {
        for x in &mut v {
            *x = -*x;
        }
    }
    // Trapezoid normalization (boundary values are zero).
    let mass: f64 = v.iter().map(|x| x * x).sum::<f64>() * tri.dy;
    let scale = 1.0 / mass.sqrt();
    for x in &mut v {
        *x *= scale;
    }
    Ok(EigenPair1d {
        mu,
        psi: v,
        y0: tri.y0,
        dy: tri.dy,
    })
}

fn normalize_l2(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

/// Per-column state of the μ profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnState {
    /// Eigenvalue from an actual 1D solve.
    Solved,
    /// Cross-section thinner than 3Δy: capped at V_max.
    Capped,
    /// No cross-section at this x.
    Empty,
}

/// Sampled cross-sectional eigenvalues μ(x).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MuProfile {
    pub xs: Vec<f64>,
    pub mu: Vec<f64>,
    pub state: Vec<ColumnState>,
    pub v_max: f64,
    /// Minimum over solved columns.
    pub mu_star: f64,
    /// Leftmost minimizer.
    pub x_star: f64,
}

impl MuProfile {
    pub fn solved(&self, i: usize) -> bool {
        self.state[i] == ColumnState::Solved
    }

    /// Smallest second difference of μ over consecutive solved triples
    /// (discrete convexity diagnostic).
    pub fn min_second_difference(&self) -> f64 {
        self.min_second_difference_below(f64::INFINITY)
    }

    /// Convexity diagnostic restricted to triples with μ below a
    /// ceiling: columns whose eigenvalue rides the potential cap are an
    /// infinite-well surrogate, not a resolved cross-section, and the
    /// cap plateau has no convexity to test.
    pub fn min_second_difference_below(&self, ceiling: f64) -> f64 {
        let mut best = f64::INFINITY;
        for i in 1..self.xs.len().saturating_sub(1) {
            if self.solved(i - 1)
                && self.solved(i)
                && self.solved(i + 1)
                && self.mu[i - 1] < ceiling
                && self.mu[i] < ceiling
                && self.mu[i + 1] < ceiling
            {
                best = best.min(self.mu[i + 1] - 2.0 * self.mu[i] + self.mu[i - 1]);
            }
        }
        best
    }
}

/// μ(x) for every grid abscissa. Columns are independent 1D solves and
/// run in parallel; results are positionally deterministic.
pub fn mu_profile(
    domain: &ConvexDomain,
    potential: &Potential,
    xs: &[f64],
    dy: f64,
) -> Result<MuProfile> {
    let cols: Vec<(f64, ColumnState)> = xs
        .par_iter()
        .map(
            |&x| match Tridiagonal1d::from_cross_section(domain, potential, x, dy) {
                Ok(tri) => (first_eig_1d(&tri), ColumnState::Solved),
                Err(Error::CrossSectionTooThin(0)) => (potential.v_max, ColumnState::Empty),
                Err(_) => (potential.v_max, ColumnState::Capped),
            },
        )
        .collect();
    let mu: Vec<f64> = cols.iter().map(|c| c.0).collect();
    let state: Vec<ColumnState> = cols.iter().map(|c| c.1).collect();
    if !state.iter().any(|&s| s != ColumnState::Empty) {
        return Err(Error::EmptyDomain("all cross-sections are empty"));
    }
    let mut mu_star = f64::INFINITY;
    let mut x_star = xs[0];
    for i in 0..xs.len() {
        if state[i] == ColumnState::Solved && mu[i] < mu_star {
            mu_star = mu[i];
            x_star = xs[i];
        }
    }
    if !mu_star.is_finite() {
        return Err(Error::EmptyDomain(
            "no cross-section is wide enough to solve",
        ));
    }
    Ok(MuProfile {
        xs: xs.to_vec(),
        mu,
        state,
        v_max: potential.v_max,
        mu_star,
        x_star,
    })
}

/// First eigenvalue of -d²/dx² + μ(x) with Dirichlet conditions at the
/// first and last x-nodes with nonempty cross-section. Capped columns in
/// between stay as (huge) diagonal entries, approximating the infinite
/// well.
pub fn operator_a_first_eig(profile: &MuProfile, dx: f64) -> Result<f64> {
    let first = profile
        .state
        .iter()
        .position(|&s| s != ColumnState::Empty)
        .ok_or(Error::EmptyDomain("empty profile"))?;
    let last = profile
        .state
        .iter()
        .rposition(|&s| s != ColumnState::Empty)
        .unwrap();
    if last - first < 2 {
        return Err(Error::CrossSectionTooThin(last - first));
    }
    let inv2 = 1.0 / (dx * dx);
    let diag: Vec<f64> = (first + 1..last)
        .map(|i| 2.0 * inv2 + profile.mu[i])
        .collect();
    let tri = Tridiagonal1d::new(profile.xs[first + 1], dx, diag)?;
    Ok(first_eig_1d(&tri))
}

/// Variant matching the grid-mask convention: every nonempty column is
/// an unknown and the implied Dirichlet zeros sit one lattice step beyond
/// the range, exactly as the 5-point scheme treats excluded nodes. Used
/// with column-matched profiles so the discrete sandwich μ ≤ λ holds
/// sharply.
pub fn operator_a_first_eig_inclusive(profile: &MuProfile, dx: f64) -> Result<f64> {
    let first = profile
        .state
        .iter()
        .position(|&s| s != ColumnState::Empty)
        .ok_or(Error::EmptyDomain("empty profile"))?;
    let last = profile
        .state
        .iter()
        .rposition(|&s| s != ColumnState::Empty)
        .unwrap();
    let inv2 = 1.0 / (dx * dx);
    let diag: Vec<f64> = (first..=last).map(|i| 2.0 * inv2 + profile.mu[i]).collect();
    if diag.len() < 3 {
        return Err(Error::CrossSectionTooThin(diag.len()));
    }
    let tri = Tridiagonal1d::new(profile.xs[first], dx, diag)?;
    Ok(first_eig_1d(&tri))
}

/// One ∂ₓψ sample: the squared L² norm of the central difference of the
/// cross-sectional ground state, and the discrete orthogonality defect
/// ∫(∂ₓψ)ψ dy.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DpsiSample {
    pub value: f64,
    pub orthogonality: f64,
}

/// Central finite difference of ψ between x-δx and x+δx, each extended
/// by zero outside its own cross-section, evaluated on a common y-grid.
pub fn dpsi_dx_l2(
    domain: &ConvexDomain,
    potential: &Potential,
    x: f64,
    delta_x: f64,
    dy: f64,
) -> Result<DpsiSample> {
    let solve = |xx: f64| -> Result<EigenPair1d> {
        let tri =
            Tridiagonal1d::from_cross_section(domain, potential, xx, dy).map_err(|e| match e {
                Error::CrossSectionTooThin(_) => {
                    Error::AtDomainEdge(format!("cross-section at x = {xx} is empty or too thin"))
                }
                other => other,
            })?;
        let mu = first_eig_1d(&tri);
        first_eigfun_1d(&tri, mu)
    };
    let minus = solve(x - delta_x)?;
    let plus = solve(x + delta_x)?;
    let y_lo = (minus.y0 - minus.dy).min(plus.y0 - plus.dy);
    let y_hi = (minus.y0 + minus.psi.len() as f64 * minus.dy)
        .max(plus.y0 + plus.psi.len() as f64 * plus.dy);
    let m = ((y_hi - y_lo) / dy).ceil().max(4.0) as usize;
    let dy_c = (y_hi - y_lo) / m as f64;
    let mut value = 0.0;
    let mut ortho = 0.0;
    for k in 0..=m {
        let y = y_lo + k as f64 * dy_c;
        let pm = minus.eval_at(y);
        let pp = plus.eval_at(y);
        let d = (pp - pm) / (2.0 * delta_x);
        let avg = 0.5 * (pp + pm);
        let w = if k == 0 || k == m { 0.5 } else { 1.0 };
        value += w * d * d * dy_c;
        ortho += w * d * avg * dy_c;
    }
    Ok(DpsiSample {
        value,
        orthogonality: ortho,
    })
}
