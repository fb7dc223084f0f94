use alloc::vec::Vec;

use super::grid::GridField;
use crate::geometry::CurveSet;
use crate::math::Vec2;

const NONE: usize = usize::MAX;

/// Zero contour of the field by marching squares over the dual cells
/// (squares with corners at four neighbouring cell centres). Saddles are
/// resolved by the mean of the four corners. Contours are closed loops or
/// end on the boundary of the sampled region.
pub fn extract_front(field: &GridField) -> CurveSet {
    let spec = field.spec;
    let n = spec.n;
    let u = &field.values;
    let inside = |i: usize, j: usize| u[spec.index(i, j)] < 0.0;
    // Edge ids: 2k for the edge from cell k to its right neighbour, 2k + 1
    // to the one above.
    let horizontal = |i: usize, j: usize| 2 * spec.index(i, j);
    let vertical = |i: usize, j: usize| 2 * spec.index(i, j) + 1;
    let point = |e: usize| -> Vec2 {
        let k = e / 2;
        let (i, j) = (k % n, k / n);
        let (i2, j2) = if e.is_multiple_of(2) { (i + 1, j) } else { (i, j + 1) };
        let (a, b) = (u[k], u[spec.index(i2, j2)]);
        let w = a / (a - b);
        let (p, q) = (spec.point(i, j), spec.point(i2, j2));
        p + (q - p) * w
    };
    let mut segments: Vec<(usize, usize)> = Vec::new();
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let c = [inside(i, j), inside(i + 1, j), inside(i + 1, j + 1), inside(i, j + 1)];
            let e = [horizontal(i, j), vertical(i + 1, j), horizontal(i, j + 1), vertical(i, j)];
            let crossed: Vec<usize> = (0..4).filter(|&m| c[m] != c[(m + 1) % 4]).collect();
            match crossed.len() {
                2 => segments.push((e[crossed[0]], e[crossed[1]])),
                4 => {
                    let mean = 0.25
                        * (u[spec.index(i, j)] + u[spec.index(i + 1, j)] + u[spec.index(i + 1, j + 1)] + u[spec.index(i, j + 1)]);
                    // Cut off the two corners whose sign differs from the centre.
                    if (mean < 0.0) == c[0] {
                        segments.push((e[0], e[1]));
                        segments.push((e[2], e[3]));
                    } else {
                        segments.push((e[3], e[0]));
                        segments.push((e[1], e[2]));
                    }
                }
                _ => {}
            }
        }
    }
    let mut ends = alloc::vec![[NONE; 2]; 2 * n * n];
    for (s, &(a, b)) in segments.iter().enumerate() {
        for e in [a, b] {
            let slot = &mut ends[e];
            if slot[0] == NONE {
                slot[0] = s;
            } else {
                slot[1] = s;
            }
        }
    }
    let mut used = alloc::vec![false; segments.len()];
    let mut out = CurveSet::new();
    let walk = |start_seg: usize, start_edge: usize, used: &mut Vec<bool>| -> (Vec<Vec2>, bool) {
        let mut pts = alloc::vec![point(start_edge)];
        let (mut seg, mut edge) = (start_seg, start_edge);
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            edge = if a == edge { b } else { a };
            if edge == start_edge {
                return (pts, true);
            }
            let p = point(edge);
            if pts.last().is_none_or(|q| q.dist(p) > 0.0) {
                pts.push(p);
            }
            let [s0, s1] = ends[edge];
            let nxt = if s0 == seg { s1 } else { s0 };
            if nxt == NONE || used[nxt] {
                return (pts, false);
            }
            seg = nxt;
        }
    };
    for e in 0..ends.len() {
        let [s0, s1] = ends[e];
        if s0 != NONE && s1 == NONE && !used[s0] {
            let (pts, closed) = walk(s0, e, &mut used);
            out.push(pts, closed);
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            let (pts, closed) = walk(s, segments[s].0, &mut used);
            out.push(pts, closed);
        }
    }
    out
}
