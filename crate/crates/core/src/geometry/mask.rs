//! Grid masks and the exact Euclidean distance transform.

use super::{polygon, Point};
use serde::{Deserialize, Serialize};

/// Uniform rectangular grid: node (i, j) sits at origin + (i·Δ, j·Δ).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: Point,
    pub delta: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn node(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.origin.x + i as f64 * self.delta,
            self.origin.y + j as f64 * self.delta,
        )
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid covering the bounding box [xmin, xmax] × [ymin, ymax] with one
    /// node of margin on every side, nodes aligned to multiples of Δ.
    pub fn covering(xmin: f64, xmax: f64, ymin: f64, ymax: f64, delta: f64) -> GridSpec {
        let ox = (xmin / delta).floor() * delta - delta;
        let oy = (ymin / delta).floor() * delta - delta;
        let nx = ((xmax - ox) / delta).ceil() as usize + 2;
        let ny = ((ymax - oy) / delta).ceil() as usize + 2;
        GridSpec {
            origin: Point::new(ox, oy),
            delta,
            nx,
            ny,
        }
    }

    pub fn covers(&self, xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> bool {
        let x1 = self.origin.x + (self.nx - 1) as f64 * self.delta;
        let y1 = self.origin.y + (self.ny - 1) as f64 * self.delta;
        self.origin.x <= xmin + 1e-12
            && self.origin.y <= ymin + 1e-12
            && x1 >= xmax - 1e-12
            && y1 >= ymax - 1e-12
    }
}

/// Boolean membership on a grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegionMask {
    pub spec: GridSpec,
    pub inside: Vec<bool>,
}

impl RegionMask {
    pub fn new_empty(spec: GridSpec) -> Self {
        let n = spec.len();
        RegionMask {
            spec,
            inside: vec![false; n],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.inside[self.spec.index(i, j)]
    }

    pub fn count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.inside.iter().any(|&b| b)
    }

    /// Points of all set nodes, row-major order.
    pub fn node_points(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for j in 0..self.spec.ny {
            for i in 0..self.spec.nx {
                if self.get(i, j) {
                    out.push(self.spec.node(i, j));
                }
            }
        }
        out
    }

    /// Set inclusion, node by node (requires identical grids).
    pub fn subset_of(&self, other: &RegionMask) -> bool {
        self.inside.len() == other.inside.len()
            && self
                .inside
                .iter()
                .zip(&other.inside)
                .all(|(&a, &b)| !a || b)
    }

    /// Physical-distance transform: for every set node, distance to the
    /// nearest node outside the mask (nodes beyond the grid edge count as
    /// outside). Unset nodes get 0.
    pub fn distance_to_complement(&self) -> Vec<f64> {
        let (nx, ny) = (self.spec.nx, self.spec.ny);
        let inf = (nx + ny + 2) as f64;
        let inf2 = inf * inf;
        // Squared distance in lattice units, then two 1D passes.
        let mut f = vec![0.0f64; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                f[j * nx + i] = if self.inside[j * nx + i] { inf2 } else { 0.0 };
            }
        }
        let mut tmp = vec![0.0f64; nx.max(ny) + 2];
        // Columns: pad with 0 at both ends so the grid edge acts as complement.
        for i in 0..nx {
            let m = ny + 2;
            tmp[0] = 0.0;
            tmp[m - 1] = 0.0;
            for j in 0..ny {
                tmp[j + 1] = f[j * nx + i];
            }
            let d = dt1d(&tmp[..m], inf2);
            for j in 0..ny {
                f[j * nx + i] = d[j + 1];
            }
        }
        for j in 0..ny {
            let m = nx + 2;
            tmp[0] = 0.0;
            tmp[m - 1] = 0.0;
            for i in 0..nx {
                tmp[i + 1] = f[j * nx + i];
            }
            let d = dt1d(&tmp[..m], inf2);
            for i in 0..nx {
                f[j * nx + i] = d[i + 1];
            }
        }
        f.iter().map(|&s| s.sqrt() * self.spec.delta).collect()
    }

    /// Deepest node and its distance to the complement. Ties go to the
    /// smallest row-major index.
    pub fn chebyshev(&self) -> Option<(Point, f64)> {
        let d = self.distance_to_complement();
        let mut best: Option<(usize, f64)> = None;
        for (idx, &v) in d.iter().enumerate() {
            if self.inside[idx] && best.is_none_or(|(_, bv)| v > bv) {
                best = Some((idx, v));
            }
        }
        best.map(|(idx, v)| {
            let i = idx % self.spec.nx;
            let j = idx / self.spec.nx;
            (self.spec.node(i, j), v)
        })
    }

    /// Hull of the set node centers.
    pub fn hull(&self) -> Vec<Point> {
        polygon::convex_hull(&self.node_points())
    }

    /// Area of the mask as node count times Δ².
    pub fn area(&self) -> f64 {
        self.count() as f64 * self.spec.delta * self.spec.delta
    }

    /// Perimeter estimate: exposed 4-neighbor edges times Δ.
    pub fn perimeter(&self) -> f64 {
        let (nx, ny) = (self.spec.nx, self.spec.ny);
        let mut exposed = 0usize;
        for j in 0..ny {
            for i in 0..nx {
                if !self.get(i, j) {
                    continue;
                }
                if i == 0 || !self.get(i - 1, j) {
                    exposed += 1;
                }
                if i + 1 == nx || !self.get(i + 1, j) {
                    exposed += 1;
                }
                if j == 0 || !self.get(i, j - 1) {
                    exposed += 1;
                }
                if j + 1 == ny || !self.get(i, j + 1) {
                    exposed += 1;
                }
            }
        }
        exposed as f64 * self.spec.delta
    }

    /// Ratio of mask area to the area of the convex hull of its nodes.
    /// Close to 1 for convex regions (up to discretization).
    pub fn hull_area_ratio(&self) -> f64 {
        let h = self.hull();
        if h.len() < 3 {
            return 1.0;
        }
        // Hull of node centers sits half a cell inside the covered area;
        // pad each node with its cell when comparing.
        let hull_area = polygon::signed_area(&h);
        if hull_area <= 0.0 {
            return 1.0;
        }
        self.area() / hull_area
    }

    /// Keep the largest 4-connected component, dropping the rest.
    /// Returns the number of dropped nodes.
    pub fn keep_largest_component(&mut self) -> usize {
        let (nx, ny) = (self.spec.nx, self.spec.ny);
        let mut label = vec![0u32; nx * ny];
        let mut sizes = vec![0usize];
        let mut stack = Vec::new();
        for start in 0..nx * ny {
            if !self.inside[start] || label[start] != 0 {
                continue;
            }
            let id = sizes.len() as u32;
            sizes.push(0);
            stack.push(start);
            label[start] = id;
            while let Some(idx) = stack.pop() {
                sizes[id as usize] += 1;
                let i = idx % nx;
                let j = idx / nx;
                let visit = |ii: usize, jj: usize, stack: &mut Vec<usize>, label: &mut Vec<u32>| {
                    let k = jj * nx + ii;
                    if self.inside[k] && label[k] == 0 {
                        label[k] = id;
                        stack.push(k);
                    }
                };
                if i > 0 {
                    visit(i - 1, j, &mut stack, &mut label);
                }
                if i + 1 < nx {
                    visit(i + 1, j, &mut stack, &mut label);
                }
                if j > 0 {
                    visit(i, j - 1, &mut stack, &mut label);
                }
                if j + 1 < ny {
                    visit(i, j + 1, &mut stack, &mut label);
                }
            }
        }
        let Some((best, _)) = sizes
            .iter()
            .enumerate()
            .skip(1)
            .max_by_key(|&(i, &s)| (s, usize::MAX - i))
        else {
            return 0;
        };
        let mut dropped = 0;
        for idx in 0..nx * ny {
            if self.inside[idx] && label[idx] != best as u32 {
                self.inside[idx] = false;
                dropped += 1;
            }
        }
        dropped
    }
}

/// 1D squared-distance transform (lower envelope of parabolas).
fn dt1d(f: &[f64], inf2: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0f64; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let fq = f[q].min(inf2);
        loop {
            let p = v[k];
            let fp = f[p].min(inf2);
            let s = ((fq + (q * q) as f64) - (fp + (p * p) as f64)) / (2.0 * (q - p) as f64);
            if s <= z[k] {
                if k == 0 {
                    break;
                }
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
                break;
            }
        }
    }
    k = 0;
    for q in 0..n {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dq = q as f64 - p as f64;
        d[q] = dq * dq + f[p].min(inf2);
    }
    d
}
