//! Marching squares on the grid field with linear interpolation.

use crate::geometry::{GridSpec, Point};
use std::collections::HashMap;

/// Edge identifier: horizontal (between (i,j) and (i+1,j)) or vertical
/// (between (i,j) and (i,j+1)).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum EdgeKey {
    H(usize, usize),
    V(usize, usize),
}

fn interp(
    spec: &GridSpec,
    a: (usize, usize),
    b: (usize, usize),
    fa: f64,
    fb: f64,
    level: f64,
) -> Point {
    let t = if (fb - fa).abs() < 1e-300 {
        0.5
    } else {
        ((level - fa) / (fb - fa)).clamp(0.0, 1.0)
    };
    let pa = spec.node(a.0, a.1);
    let pb = spec.node(b.0, b.1);
    Point::new(pa.x + t * (pb.x - pa.x), pa.y + t * (pb.y - pa.y))
}

/// Extract the level-`c` contours of the field (row-major on `spec`,
/// zero outside the mask) as chained polylines.
pub fn contours(field: &[f64], spec: &GridSpec, level: f64) -> Vec<Vec<Point>> {
    // Symbolic perturbation: nodes exactly on the level are pushed just
    // outside, so no cell sees a lone on-level corner (that configuration
    // spawns a four-edge micro-loop around the node and breaks chaining).
    let shifted: Vec<f64> = field
        .iter()
        .map(|&v| {
            let g = v - level;
            if g == 0.0 {
                -1e-300
            } else {
                g
            }
        })
        .collect();
    let field = &shifted;
    let level = 0.0;
    let (nx, ny) = (spec.nx, spec.ny);
    let at = |i: usize, j: usize| field[j * nx + i];
    let mut segments: Vec<(EdgeKey, Point, EdgeKey, Point)> = Vec::new();
    for j in 0..ny.saturating_sub(1) {
        for i in 0..nx.saturating_sub(1) {
            let bl = at(i, j);
            let br = at(i + 1, j);
            let tr = at(i + 1, j + 1);
            let tl = at(i, j + 1);
            let mut case = 0u8;
            if bl >= level {
                case |= 1;
            }
            if br >= level {
                case |= 2;
            }
            if tr >= level {
                case |= 4;
            }
            if tl >= level {
                case |= 8;
            }
            if case == 0 || case == 15 {
                continue;
            }
            let bottom = || {
                (
                    EdgeKey::H(i, j),
                    interp(spec, (i, j), (i + 1, j), bl, br, level),
                )
            };
            let right = || {
                (
                    EdgeKey::V(i + 1, j),
                    interp(spec, (i + 1, j), (i + 1, j + 1), br, tr, level),
                )
            };
            let top = || {
                (
                    EdgeKey::H(i, j + 1),
                    interp(spec, (i, j + 1), (i + 1, j + 1), tl, tr, level),
                )
            };
            let left = || {
                (
                    EdgeKey::V(i, j),
                    interp(spec, (i, j), (i, j + 1), bl, tl, level),
                )
            };
            let mut push = |a: (EdgeKey, Point), b: (EdgeKey, Point)| {
                segments.push((a.0, a.1, b.0, b.1));
            };
            match case {
                1 => push(left(), bottom()),
                2 => push(bottom(), right()),
                3 => push(left(), right()),
                4 => push(right(), top()),
                6 => push(bottom(), top()),
                7 => push(left(), top()),
                8 => push(top(), left()),
                9 => push(top(), bottom()),
                11 => push(top(), right()),
                12 => push(right(), left()),
                13 => push(bottom(), right()),
                14 => push(left(), bottom()),
                5 | 10 => {
                    // Saddle: resolve by the cell-center average.
                    let center = 0.25 * (bl + br + tr + tl);
                    if case == 5 {
                        if center >= level {
                            push(left(), top());
                            push(right(), bottom());
                        } else {
                            push(left(), bottom());
                            push(right(), top());
                        }
                    } else if center >= level {
                        push(bottom(), right());
                        push(top(), left());
                    } else {
                        push(bottom(), left());
                        push(top(), right());
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    // Chain segments by shared edge keys; matching is undirected since
    // the per-cell segment orientation is not globally consistent.
    let mut by_key: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (idx, seg) in segments.iter().enumerate() {
        by_key.entry(seg.0).or_default().push(idx);
        by_key.entry(seg.2).or_default().push(idx);
    }
    let take_at = |key: EdgeKey, used: &mut [bool]| -> Option<usize> {
        by_key.get(&key).and_then(|cands| {
            cands
                .iter()
                .copied()
                .find(|&k| !used[k])
                .inspect(|&k| used[k] = true)
        })
    };
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut line = std::collections::VecDeque::new();
        line.push_back(segments[start].1);
        line.push_back(segments[start].3);
        // Extend forward from the end key, then backward from the start.
        let mut cursor = segments[start].2;
        while let Some(k) = take_at(cursor, &mut used) {
            let seg = &segments[k];
            if seg.0 == cursor {
                line.push_back(seg.3);
                cursor = seg.2;
            } else {
                line.push_back(seg.1);
                cursor = seg.0;
            }
        }
        cursor = segments[start].0;
        while let Some(k) = take_at(cursor, &mut used) {
            let seg = &segments[k];
            if seg.0 == cursor {
                line.push_front(seg.3);
                cursor = seg.2;
            } else {
                line.push_front(seg.1);
                cursor = seg.0;
            }
        }
        out.push(line.into_iter().collect());
    }
    out
}
