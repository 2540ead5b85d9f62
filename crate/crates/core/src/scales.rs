//! The length scales L1 and L2, domain orientation, and the scale bounds.

use crate::error::Error;
use crate::geometry::{self, polygon, ConvexDomain, Point, Region};
use crate::potential::{AffinePiece, HeightFunction, Potential};
use crate::sturm1d::MuProfile;
use crate::Result;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScaleOptions {
    /// Comparability constant: L1_tilde ≤ c_tilde·L1 means "comparable".
    pub c_tilde: f64,
    /// Relative tolerance of the length bisections.
    pub bisect_rel_tol: f64,
    /// Angular resolution of the width sweep.
    pub width_steps: usize,
}

impl Default for ScaleOptions {
    fn default() -> Self {
        ScaleOptions {
            c_tilde: 8.0,
            bisect_rel_tol: 1e-3,
            width_steps: 720,
        }
    }
}

/// Result of the L1 bisection. The sublevel polygon at L1⁻² is kept for
/// the orientation step.
#[derive(Clone, Debug)]
pub struct L1Result {
    pub l1: f64,
    pub l1_tilde: f64,
    pub sublevel: Vec<Point>,
}

/// Largest L such that { V ≤ 1 + L⁻² } has inradius at least L.
///
/// The predicate is monotone non-increasing in L (growing L shrinks the
/// sublevel set and raises the bar), so bisection applies; monotonicity
/// over the evaluated samples is asserted. Sublevel sets are exact
/// polygons because h is a min of affine pieces.
pub fn compute_l1(
    domain: &ConvexDomain,
    potential: &Potential,
    opts: &ScaleOptions,
) -> Result<L1Result> {
    let n1 = polygon::chebyshev(domain.vertices()).1;
    let holds = |l: f64| -> bool {
        let poly = potential.sublevel_polygon(domain, 1.0 / (l * l));
        if poly.len() < 3 {
            return false;
        }
        polygon::chebyshev(&poly).1 >= l
    };
    let mut samples: Vec<(f64, bool)> = Vec::new();
    let eval = |l: f64, samples: &mut Vec<(f64, bool)>| -> bool {
        let ok = holds(l);
        samples.push((l, ok));
        ok
    };
    let l_min = 1e-6 * n1;
    if !eval(l_min, &mut samples) {
        return Err(Error::ResolutionTooCoarse(format!(
            "sublevel inradius predicate fails even at L = {l_min:.3e}"
        )));
    }
    let mut lo = l_min;
    let mut hi = n1 * (1.0 + 1e-9) + 1e-12;
    if eval(hi, &mut samples) {
        lo = hi;
    } else {
        while (hi - lo) > opts.bisect_rel_tol * lo {
            let mid = 0.5 * (lo + hi);
            if eval(mid, &mut samples) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut seen_false = false;
    for &(_, ok) in &samples {
        if !ok {
            seen_false = true;
        }
        assert!(
            !(ok && seen_false),
            "L1 predicate is not monotone on the sampled lattice"
        );
    }
    let sublevel = potential.sublevel_polygon(domain, 1.0 / (lo * lo));
    let l1_tilde = polygon::diameter_of(&sublevel);
    Ok(L1Result {
        l1: lo,
        l1_tilde,
        sublevel,
    })
}

fn rotate_height(h: &HeightFunction, angle: f64, center: Point) -> HeightFunction {
    let (s, c) = angle.sin_cos();
    let pieces: Vec<AffinePiece> = h
        .pieces()
        .iter()
        .map(|l| {
            let ga = c * l.a - s * l.b;
            let gb = s * l.a + c * l.b;
            let cc = l.c + (l.a * center.x + l.b * center.y) - (ga * center.x + gb * center.y);
            AffinePiece {
                a: ga,
                b: gb,
                c: cc,
            }
        })
        .collect();
    HeightFunction::from_pieces_unchecked(pieces)
}

/// Rotate domain and potential so the y-projection of the sublevel set
/// Ω_{L1⁻²} is the smallest among all directions. Returns the rotated
/// pair and the applied angle.
pub fn orient_domain(
    domain: &ConvexDomain,
    potential: &Potential,
    l1: &L1Result,
    opts: &ScaleOptions,
) -> Result<(ConvexDomain, Potential, f64)> {
    let (theta, _) = geometry::min_width_direction(&Region::Hull(&l1.sublevel), opts.width_steps)?;
    let center = domain.centroid();
    let rotated = geometry::rotate_domain(domain, theta);
    let height = rotate_height(&potential.height, theta, center);
    let rotated_potential = Potential::with_cap(height, potential.v_max);
    Ok((rotated, rotated_potential, theta))
}

/// L2 and the witness interval I.
///
/// Comparable case (L1_tilde ≤ c_tilde·L1): L2 = L1 with I centered at
/// x*. Otherwise the largest L with a window of length ≥ L on which
/// μ(x) ≤ μ* + L⁻², found by bisection over the monotone window
/// predicate; I is the leftmost maximal such window.
pub fn compute_l2(
    profile: &MuProfile,
    l1: f64,
    l1_tilde: f64,
    opts: &ScaleOptions,
) -> Result<(f64, (f64, f64))> {
    let xs = &profile.xs;
    if xs.is_empty() {
        return Err(Error::EmptyDomain("empty profile"));
    }
    let first = profile
        .state
        .iter()
        .position(|&s| s != crate::sturm1d::ColumnState::Empty)
        .ok_or(Error::EmptyDomain("empty profile"))?;
    let last = profile
        .state
        .iter()
        .rposition(|&s| s != crate::sturm1d::ColumnState::Empty)
        .unwrap();
    let x_lo = xs[first];
    let x_hi = xs[last];
    if l1_tilde <= opts.c_tilde * l1 {
        let mut a = profile.x_star - 0.5 * l1;
        let mut b = profile.x_star + 0.5 * l1;
        if a < x_lo {
            b += x_lo - a;
            a = x_lo;
        }
        if b > x_hi {
            a -= b - x_hi;
            b = x_hi;
        }
        a = a.max(x_lo);
        return Ok((l1, (a, b)));
    }
    let q_holds = |l: f64| -> bool {
        let thr = profile.mu_star + 1.0 / (l * l);
        let mut start = 0usize;
        for j in 0..xs.len() {
            if profile.mu[j] > thr {
                start = j + 1;
            } else if xs[j] - xs[start] >= l {
                return true;
            }
        }
        false
    };
    let mut samples: Vec<(f64, bool)> = Vec::new();
    let eval = |l: f64, samples: &mut Vec<(f64, bool)>| -> bool {
        let ok = q_holds(l);
        samples.push((l, ok));
        ok
    };
    let extent = x_hi - x_lo;
    let mut lo = (1e-6 * extent).max(1e-12);
    if !eval(lo, &mut samples) {
        return Err(Error::ResolutionTooCoarse(
            "window predicate fails even at the smallest length".into(),
        ));
    }
    let mut hi = extent * (1.0 + 1e-9) + 1e-12;
    if eval(hi, &mut samples) {
        lo = hi;
    } else {
        while (hi - lo) > opts.bisect_rel_tol * lo {
            let mid = 0.5 * (lo + hi);
            if eval(mid, &mut samples) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut seen_false = false;
    for &(_, ok) in &samples {
        if !ok {
            seen_false = true;
        }
        assert!(
            !(ok && seen_false),
            "L2 predicate is not monotone on the sampled lattice"
        );
    }
    let l2 = lo;
    // Leftmost maximal window at the certified level.
    let thr = profile.mu_star + 1.0 / (l2 * l2);
    let mut run_start: Option<usize> = None;
    let mut interval = (profile.x_star - 0.5 * l2, profile.x_star + 0.5 * l2);
    for j in 0..=xs.len() {
        let good = j < xs.len() && profile.mu[j] <= thr;
        if good && run_start.is_none() {
            run_start = Some(j);
        }
        if !good {
            if let Some(s) = run_start.take() {
                if xs[j - 1] - xs[s] >= l2 * (1.0 - 1e-9) {
                    interval = (xs[s], xs[j - 1]);
                    break;
                }
            }
        }
    }
    Ok((l2, interval))
}

/// Exhaustive O(n²) window scan: the exact supremum of L over all
/// sampled windows. Used as the oracle for `compute_l2`.
pub fn l2_window_scan_oracle(profile: &MuProfile) -> f64 {
    let xs = &profile.xs;
    let mut best = 0.0_f64;
    for i in 0..xs.len() {
        let mut max_mu = f64::NEG_INFINITY;
        for j in i..xs.len() {
            max_mu = max_mu.max(profile.mu[j]);
            let extent = xs[j] - xs[i];
            let gap = max_mu - profile.mu_star;
            let cap = if gap <= 0.0 {
                f64::INFINITY
            } else {
                1.0 / gap.sqrt()
            };
            best = best.max(extent.min(cap));
        }
    }
    best
}

/// One named comparability check with its measured ratio.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundConfig {
    /// Floor for the lower-bound ratios.
    pub lower_floor: f64,
    /// Ceiling K for L2 ≤ K·L1_tilde.
    pub l2_upper_k: f64,
    /// Slack on the exact upper bound L1 ≤ N1.
    pub upper_tol: f64,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            lower_floor: 0.05,
            l2_upper_k: 4.0,
            upper_tol: 5e-3,
        }
    }
}

/// Measured ratios for the two-sided bounds on L1 and L2:
/// L1 ≤ N1, L1 ≥ c·N1^(1/5), L2 ≥ c·L1_tilde^(1/3)·L1^(2/3), L2 ≤ K·L1_tilde.
pub fn check_scale_bounds(
    l1: f64,
    l1_tilde: f64,
    l2: f64,
    n1: f64,
    cfg: &BoundConfig,
) -> Vec<BoundCheck> {
    let r1 = l1 / n1;
    let r2 = l1 / n1.powf(0.2);
    let r3 = l2 / (l1_tilde.powf(1.0 / 3.0) * l1.powf(2.0 / 3.0));
    let r4 = l2 / l1_tilde;
    vec![
        BoundCheck {
            name: "l1_le_n1".into(),
            ratio: r1,
            pass: r1 <= 1.0 + cfg.upper_tol,
        },
        BoundCheck {
            name: "l1_ge_c_n1_pow_1_5".into(),
            ratio: r2,
            pass: r2 >= cfg.lower_floor,
        },
        BoundCheck {
            name: "l2_ge_c_l1tilde_1_3_l1_2_3".into(),
            ratio: r3,
            pass: r3 >= cfg.lower_floor,
        },
        BoundCheck {
            name: "l2_le_k_l1tilde".into(),
            ratio: r4,
            pass: r4 <= cfg.l2_upper_k,
        },
    ]
}

/// Full scale report: the lengths, the applied orientation, the witness
/// interval, and the comparability bound checks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScaleReport {
    pub l1: f64,
    pub l1_tilde: f64,
    pub theta: f64,
    pub l2: f64,
    pub interval: (f64, f64),
    pub comparable: bool,
    pub c_tilde: f64,
    pub n1: f64,
    pub n2: f64,
    pub bound_checks: Vec<BoundCheck>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{self, Potential};
    use crate::sturm1d::{mu_profile, ColumnState};

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
    fn l1_equals_inradius_for_constant_potential() {
        let d = rect(6.0, 4.0);
        let pot = Potential::new(potential::constant(&d));
        let r = compute_l1(&d, &pot, &ScaleOptions::default()).unwrap();
        assert!((r.l1 - 2.0).abs() < 2.0 * 2e-3, "l1 = {}", r.l1);
        let diam = (36.0_f64 + 16.0).sqrt();
        assert!((r.l1_tilde - diam).abs() < 1e-6);
    }

    #[test]
    fn l1_of_thin_rectangle() {
        let d = rect(8.0, 1.0);
        let pot = Potential::new(potential::constant(&d));
        let r = compute_l1(&d, &pot, &ScaleOptions::default()).unwrap();
        assert!((r.l1 - 0.5).abs() < 0.5 * 2e-3, "l1 = {}", r.l1);
        assert!((r.l1_tilde - 65.0_f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn triangle_example_l1_scaling() {
        // Sweep the extremal family: log L1 vs log N1 slope near 1/5.
        let mut logs = Vec::new();
        for &n1 in &[16.0, 32.0, 64.0, 128.0_f64] {
            let (d, h) = potential::triangle_example(n1, n1 * n1).unwrap();
            let pot = Potential::new(h);
            let r = compute_l1(&d, &pot, &ScaleOptions::default()).unwrap();
            logs.push((n1.ln(), r.l1.ln()));
        }
        let n = logs.len() as f64;
        let sx: f64 = logs.iter().map(|p| p.0).sum();
        let sy: f64 = logs.iter().map(|p| p.1).sum();
        let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!(
            (slope - 0.2).abs() < 0.08,
            "slope = {slope}, logs = {logs:?}"
        );
    }

    #[test]
    fn orientation_recovers_rotation() {
        let base = rect(4.0, 1.0);
        let pot0 = Potential::new(potential::constant(&base));
        let opts = ScaleOptions::default();
        let l1r = compute_l1(&base, &pot0, &opts).unwrap();
        let (_, _, theta0) = orient_domain(&base, &pot0, &l1r, &opts).unwrap();
        assert!(theta0.abs() < 1e-12, "theta0 = {theta0}");

        let tilted = geometry::rotate_domain(&base, 0.3);
        let pot1 = Potential::new(potential::constant(&tilted));
        let l1r1 = compute_l1(&tilted, &pot1, &opts).unwrap();
        let (rd, _, theta1) = orient_domain(&tilted, &pot1, &l1r1, &opts).unwrap();
        assert!(
            (theta1 + 0.3).abs() < std::f64::consts::PI / 720.0 + 1e-9,
            "theta1 = {theta1}"
        );
        let gf = rd.graph_form();
        assert!(gf.b - gf.a > 3.9, "rotated back to the long axis");
    }

    #[test]
    fn orientation_rotates_potential_with_domain() {
        // After rotating, the potential must follow the domain: evaluate
        // at matched points.
        let (d, h) = potential::triangle_example(4.0, 16.0).unwrap();
        let pot = Potential::new(h);
        let center = d.centroid();
        let rot = geometry::rotate_domain(&d, 0.7);
        let hrot = super::rotate_height(&pot.height, 0.7, center);
        let prot = Potential::with_cap(hrot, pot.v_max);
        for &(x, y) in &[(2.0, 1.0), (10.0, 0.5), (5.0, 2.0)] {
            let p = Point::new(x, y);
            let q = p.rotated_about(0.7, center);
            assert!(rot.contains(q, 1e-9));
            assert!((pot.eval_at(p) - prot.eval_at(q)).abs() < 1e-9);
        }
    }

    #[test]
    fn l2_comparable_case() {
        let d = rect(4.0, 3.0);
        let pot = Potential::new(potential::constant(&d));
        let opts = ScaleOptions::default();
        let l1r = compute_l1(&d, &pot, &opts).unwrap();
        let xs: Vec<f64> = (0..=80).map(|i| i as f64 * 0.05).collect();
        let prof = mu_profile(&d, &pot, &xs, 0.05).unwrap();
        let (l2, i) = compute_l2(&prof, l1r.l1, l1r.l1_tilde, &opts).unwrap();
        assert_eq!(l2, l1r.l1);
        assert!(i.1 - i.0 <= l1r.l1 + 1e-9);
    }

    #[test]
    fn l2_constant_profile_fills_extent() {
        // Elongated rectangle: μ constant on the interior, so the window
        // is limited only by the profile extent.
        let d = rect(20.0, 1.0);
        let pot = Potential::new(potential::constant(&d));
        let opts = ScaleOptions::default();
        let l1r = compute_l1(&d, &pot, &opts).unwrap();
        assert!(l1r.l1_tilde > opts.c_tilde * l1r.l1);
        let xs: Vec<f64> = (0..=400).map(|i| i as f64 * 0.05).collect();
        let prof = mu_profile(&d, &pot, &xs, 0.02).unwrap();
        let (l2, interval) = compute_l2(&prof, l1r.l1, l1r.l1_tilde, &opts).unwrap();
        assert!((l2 - 20.0).abs() < 0.1, "l2 = {l2}");
        assert!(interval.1 - interval.0 >= l2 - 0.05 - 1e-9);
        let oracle = l2_window_scan_oracle(&prof);
        assert!(
            (l2 - oracle).abs() <= 2e-3 * oracle,
            "{l2} vs oracle {oracle}"
        );
    }

    #[test]
    fn l2_quadratic_profile_matches_analytics_and_oracle() {
        // μ(x) = μ* + (x − x*)²: window [x*−a, x*+b] allows
        // L ≤ min(a+b, max(a,b)^{-2...-1/2}) → L2 = √2.
        let n = 2001;
        let xs: Vec<f64> = (0..n).map(|i| i as f64 * 0.005).collect();
        let mu: Vec<f64> = xs.iter().map(|&x| 2.0 + (x - 5.0) * (x - 5.0)).collect();
        let prof = MuProfile {
            xs,
            mu,
            state: vec![ColumnState::Solved; n],
            v_max: 1e8,
            mu_star: 2.0,
            x_star: 5.0,
        };
        let opts = ScaleOptions::default();
        let (l2, interval) = compute_l2(&prof, 0.1, 10.0, &opts).unwrap();
        let oracle = l2_window_scan_oracle(&prof);
        assert!(
            (l2 - oracle).abs() <= 2e-3 * oracle,
            "{l2} vs oracle {oracle}"
        );
        assert!((l2 - 2.0_f64.sqrt()).abs() < 0.02, "l2 = {l2}");
        assert!(interval.0 <= 5.0 && 5.0 <= interval.1);
    }

    #[test]
    fn oracle_equivalence_on_random_profiles() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let n = rng.random_range(50..800);
            let dx = rng.random_range(0.01..0.1);
            let xs: Vec<f64> = (0..n).map(|i| i as f64 * dx).collect();
            let x0 = rng.random_range(0.2..0.8) * xs[n - 1];
            let a = rng.random_range(0.01..2.0);
            let mu: Vec<f64> = xs
                .iter()
                .map(|&x| 1.5 + a * (x - x0).abs().powf(1.5))
                .collect();
            let mu_star = mu.iter().cloned().fold(f64::INFINITY, f64::min);
            let x_star = xs[mu
                .iter()
                .enumerate()
                .min_by(|p, q| p.1.partial_cmp(q.1).unwrap())
                .unwrap()
                .0];
            let prof = MuProfile {
                xs,
                mu,
                state: vec![ColumnState::Solved; n],
                v_max: 1e8,
                mu_star,
                x_star,
            };
            let (l2, _) = compute_l2(&prof, 1e-3, 1e3, &ScaleOptions::default()).unwrap();
            let oracle = l2_window_scan_oracle(&prof);
            assert!(
                (l2 - oracle).abs() <= 2e-3 * oracle + 1e-12,
                "{l2} vs {oracle}"
            );
        }
    }

    #[test]
    fn scale_bounds_constant_square() {
        let d = rect(4.0, 4.0);
        let pot = Potential::new(potential::constant(&d));
        let opts = ScaleOptions::default();
        let r = compute_l1(&d, &pot, &opts).unwrap();
        let checks = check_scale_bounds(r.l1, r.l1_tilde, r.l1, 2.0, &BoundConfig::default());
        let upper = checks.iter().find(|c| c.name == "l1_le_n1").unwrap();
        assert!(upper.pass && (upper.ratio - 1.0).abs() < 5e-3);
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
    }
}
