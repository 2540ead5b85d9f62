//! Agmon distance on the classically forbidden region: Dijkstra on the
//! 8-connected grid graph with edge weights (1/2)·mean(√ν*)·length.

use crate::geometry::{ConvexDomain, RegionMask};
use crate::potential::Potential;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// ν* = V - λ and the path metric h* on Ω₁ = { V ≥ 1 + C·L1⁻² }.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AgmonField {
    pub mask: RegionMask,
    /// Full-grid layout; infinity off Ω₁ and on unreachable pockets.
    pub h_star: Vec<f64>,
    /// max(V - λ, 0) on Ω₁ nodes, 0 elsewhere.
    pub nu_star: Vec<f64>,
    pub n_sources: usize,
    pub n_unreachable: usize,
    /// Nodes where V - λ < 0 had to be clamped to 0.
    pub clamped_negative: usize,
    pub threshold: f64,
}

struct HeapItem {
    dist: f64,
    node: usize,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist && self.node == other.node
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on distance, ties by node index for determinism.
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Build Ω₁ on the grid of `mask_template` and run Dijkstra from its
/// inner boundary (nodes adjacent to the potential well). Returns None
/// when Ω₁ or its inner boundary is empty at this resolution.
pub fn agmon_distance(
    domain: &ConvexDomain,
    potential: &Potential,
    lambda: f64,
    l1: f64,
    mask_template: &RegionMask,
    c: f64,
) -> Option<AgmonField> {
    let spec = mask_template.spec.clone();
    let threshold = 1.0 + c / (l1 * l1);
    let (nx, ny) = (spec.nx, spec.ny);
    let mut mask = RegionMask::new_empty(spec.clone());
    let mut in_omega = vec![false; spec.len()];
    let mut nu_star = vec![0.0; spec.len()];
    let mut clamped_negative = 0usize;
    for j in 0..ny {
        for i in 0..nx {
            let idx = spec.index(i, j);
            let p = spec.node(i, j);
            if !domain.contains(p, 1e-12) {
                continue;
            }
            in_omega[idx] = true;
            let v = potential.eval_at(p);
            if v >= threshold {
                mask.inside[idx] = true;
                let nu = v - lambda;
                if nu < 0.0 {
                    clamped_negative += 1;
                }
                nu_star[idx] = nu.max(0.0);
            }
        }
    }
    if mask.is_empty() {
        return None;
    }
    let neighbors: [(i64, i64); 8] = [
        (1, 0),
        (-1, 0),
        (0, 1),
        (0, -1),
        (1, 1),
        (1, -1),
        (-1, 1),
        (-1, -1),
    ];
    let mut h_star = vec![f64::INFINITY; spec.len()];
    let mut heap = BinaryHeap::new();
    let mut n_sources = 0usize;
    for j in 0..ny {
        for i in 0..nx {
            let idx = spec.index(i, j);
            if !mask.inside[idx] {
                continue;
            }
            let mut inner = false;
            for (dx, dy) in neighbors {
                let ii = i as i64 + dx;
                let jj = j as i64 + dy;
                if ii < 0 || jj < 0 || ii >= nx as i64 || jj >= ny as i64 {
                    continue;
                }
                let nidx = spec.index(ii as usize, jj as usize);
                if in_omega[nidx] && !mask.inside[nidx] {
                    inner = true;
                    break;
                }
            }
            if inner {
                h_star[idx] = 0.0;
                heap.push(HeapItem {
                    dist: 0.0,
                    node: idx,
                });
                n_sources += 1;
            }
        }
    }
    if n_sources == 0 {
        return None;
    }
    let delta = spec.delta;
    while let Some(HeapItem { dist, node }) = heap.pop() {
        if dist > h_star[node] {
            continue;
        }
        let i = node % nx;
        let j = node / nx;
        for (dx, dy) in neighbors {
            let ii = i as i64 + dx;
            let jj = j as i64 + dy;
            if ii < 0 || jj < 0 || ii >= nx as i64 || jj >= ny as i64 {
                continue;
            }
            let nidx = spec.index(ii as usize, jj as usize);
            if !mask.inside[nidx] {
                continue;
            }
            let len = ((dx * dx + dy * dy) as f64).sqrt() * delta;
            let w = 0.25 * (nu_star[node].sqrt() + nu_star[nidx].sqrt()) * len;
            let cand = dist + w;
            if cand < h_star[nidx] {
                h_star[nidx] = cand;
                heap.push(HeapItem {
                    dist: cand,
                    node: nidx,
                });
            }
        }
    }
    let n_unreachable = (0..spec.len())
        .filter(|&idx| mask.inside[idx] && !h_star[idx].is_finite())
        .count();
    Some(AgmonField {
        mask,
        h_star,
        nu_star,
        n_sources,
        n_unreachable,
        clamped_negative,
        threshold,
    })
}

/// Graph distance between two nodes on the same Ω₁ graph (same weights);
/// used to test the triangle property of h*.
pub fn pairwise_path_weight(field: &AgmonField, from: usize, to: usize) -> f64 {
    let spec = &field.mask.spec;
    let (nx, ny) = (spec.nx, spec.ny);
    let neighbors: [(i64, i64); 8] = [
        (1, 0),
        (-1, 0),
        (0, 1),
        (0, -1),
        (1, 1),
        (1, -1),
        (-1, 1),
        (-1, -1),
    ];
    let mut dist = vec![f64::INFINITY; spec.len()];
    dist[from] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(HeapItem {
        dist: 0.0,
        node: from,
    });
    while let Some(HeapItem { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        if node == to {
            return d;
        }
        let i = node % nx;
        let j = node / nx;
        for (dx, dy) in neighbors {
            let ii = i as i64 + dx;
            let jj = j as i64 + dy;
            if ii < 0 || jj < 0 || ii >= nx as i64 || jj >= ny as i64 {
                continue;
            }
            let nidx = spec.index(ii as usize, jj as usize);
            if !field.mask.inside[nidx] {
                continue;
            }
            let len = ((dx * dx + dy * dy) as f64).sqrt() * spec.delta;
            let w = 0.25 * (field.nu_star[node].sqrt() + field.nu_star[nidx].sqrt()) * len;
            if d + w < dist[nidx] {
                dist[nidx] = d + w;
                heap.push(HeapItem {
                    dist: d + w,
                    node: nidx,
                });
            }
        }
    }
    dist[to]
}
