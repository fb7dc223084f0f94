use alloc::collections::BTreeMap;
use alloc::boxed::Box;
use alloc::vec::Vec;

use super::pair::{solve_expander_for_ray_pair_with, ExpanderCurve, PairOptions};
use super::{ExpanderError, PlanarCone, Side, R_MAX};
use crate::geometry::{local_hausdorff, CurveSet};
use crate::math::{wrap_angle, PI};

/// Angular samples for the swept-area comparison.
const AREA_SAMPLES: usize = 4096;

/// Outermost expanders on both sides of a cone.
#[derive(Clone, Debug)]
pub struct OutermostResult {
    /// Bounds the flow of `W` at time one; normals point into it.
    pub sigma: Vec<ExpanderCurve>,
    /// Bounds the flow of `W'` at time one.
    pub sigma_prime: Vec<ExpanderCurve>,
    pub fattens: bool,
    /// Hausdorff distance between `Σ` and `Σ'` within `comparison_radius`.
    pub gap_measure: f64,
    pub tolerance: f64,
    pub comparison_radius: f64,
    /// Ray pairings of `Σ` and `Σ'`.
    pub sigma_pairing: Vec<(usize, usize)>,
    pub sigma_prime_pairing: Vec<(usize, usize)>,
}

impl OutermostResult {
    pub fn curves(&self, side: Side) -> &[ExpanderCurve] {
        match side {
            Side::W => &self.sigma,
            Side::WPrime => &self.sigma_prime,
        }
    }

    pub fn curve_set(&self, side: Side) -> CurveSet {
        CurveSet::from_curves(self.curves(side).iter().map(|e| &e.curve))
    }
}

/// A chord joining two rays; the curve lives over `arc`, the
/// counterclockwise run of sectors `arc_start .. arc_start + arc_len`.
#[derive(Clone, Copy, Debug)]
struct Chord {
    rays: (usize, usize),
    arc_start: usize,
    arc_len: usize,
    mask: u64,
}

fn non_crossing_matchings(rays: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if rays.is_empty() {
        return alloc::vec![Vec::new()];
    }
    let mut out = Vec::new();
    let first = rays[0];
    for k in (1..rays.len()).step_by(2) {
        let inner = non_crossing_matchings(&rays[1..k]);
        let outer = non_crossing_matchings(&rays[k + 1..]);
        for a in &inner {
            for b in &outer {
                let mut m = alloc::vec![(first, rays[k])];
                m.extend_from_slice(a);
                m.extend_from_slice(b);
                out.push(m);
            }
        }
    }
    out
}

fn chord(cone: &PlanarCone, i: usize, j: usize) -> Chord {
    let m = cone.ray_count();
    let th = cone.ray_angles();
    let ccw = wrap_angle(th[j] - th[i]);
    let (start, len) = if ccw <= PI { (i, (j + m - i) % m) } else { (j, (i + m - j) % m) };
    let mut mask = 0u64;
    for k in 0..len {
        mask |= 1 << ((start + k) % m);
    }
    Chord { rays: (i, j), arc_start: start, arc_len: len, mask }
}

/// Checks the arcs form a laminar family and every face carries one label.
fn admissible(cone: &PlanarCone, chords: &[Chord]) -> bool {
    let m = cone.ray_count();
    for (a, ca) in chords.iter().enumerate() {
        for cb in &chords[a + 1..] {
            let inter = ca.mask & cb.mask;
            if inter != 0 && inter != ca.mask && inter != cb.mask {
                return false;
            }
        }
    }
    let full: u64 = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let mut faces = Vec::with_capacity(chords.len() + 1);
    let mut root = full;
    for c in chords {
        root &= !c.mask;
        let mut face = c.mask;
        for d in chords {
            if d.mask != c.mask && d.mask & c.mask == d.mask {
                face &= !d.mask;
            }
        }
        faces.push(face);
    }
    faces.push(root);
    faces.iter().all(|&f| {
        let labels: Vec<bool> = (0..m).filter(|k| f & (1 << k) != 0).map(|k| cone.inside()[k]).collect();
        labels.windows(2).all(|w| w[0] == w[1])
    })
}

fn solve_chord(cone: &PlanarCone, c: &Chord, side: Side, opts: PairOptions) -> Result<ExpanderCurve, ExpanderError> {
    let m = cone.ray_count();
    let th = cone.ray_angles();
    let start = c.arc_start;
    let end = (c.arc_start + c.arc_len) % m;
    let inner_label = cone.sector_side(start);
    let (a, b) = if inner_label == side { (th[start], th[end]) } else { (th[end], th[start]) };
    solve_expander_for_ray_pair_with(a, b, side, opts).map_err(|e| ExpanderError::Sector {
        sector: start,
        first_ray: th[start],
        second_ray: th[end],
        source: Box::new(e),
    })
}

/// Radius at which the ray of direction `phi` meets the curve, for a
/// direction inside the curve's sector.
fn radial(e: &ExpanderCurve, arc_start_angle: f64, opening: f64, phi: f64) -> f64 {
    if e.is_line() {
        return 0.0;
    }
    let nodes = e.curve.nodes();
    let off = |k: usize| wrap_angle(nodes[k].angle() - arc_start_angle);
    let target = wrap_angle(phi - arc_start_angle);
    if target <= 0.0 || target >= opening {
        return f64::INFINITY;
    }
    // Polar angle is monotone along the curve.
    let n = nodes.len();
    let increasing = off(n - 1) > off(0);
    let (mut lo, mut hi) = (0usize, n - 1);
    let before = |k: usize| if increasing { off(k) <= target } else { off(k) >= target };
    if !before(lo) || before(hi) {
        return f64::INFINITY;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if before(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (p, q) = (nodes[lo], nodes[hi]);
    let dir = crate::math::Vec2::from_angle(phi);
    let denom = dir.cross(q - p);
    if denom == 0.0 {
        return p.norm();
    }
    p.cross(q - p) / denom
}

/// Area of the region beyond each chord's curve inside `B_radius`.
fn beyond_area(cone: &PlanarCone, c: &Chord, e: &ExpanderCurve, radius: f64) -> f64 {
    let th = cone.ray_angles();
    let m = cone.ray_count();
    let a0 = th[c.arc_start];
    let opening = wrap_angle(th[(c.arc_start + c.arc_len) % m] - a0);
    let opening = if opening == 0.0 { 2.0 * PI } else { opening };
    let dphi = opening / AREA_SAMPLES as f64;
    let mut sum = 0.0;
    for k in 0..AREA_SAMPLES {
        let phi = a0 + (k as f64 + 0.5) * dphi;
        let r = radial(e, a0, opening, phi).min(radius);
        sum += 0.5 * (radius * radius - r * r);
    }
    sum * dphi
}

fn w_area(cone: &PlanarCone, chords: &[Chord], curves: &[ExpanderCurve], radius: f64) -> f64 {
    let m = cone.ray_count();
    let beyond: Vec<f64> = chords.iter().zip(curves).map(|(c, e)| beyond_area(cone, c, e, radius)).collect();
    let mut total = 0.0;
    let mut root = PI * radius * radius;
    for (a, c) in chords.iter().enumerate() {
        let mut face = beyond[a];
        let nested_in_other = chords.iter().any(|d| d.mask != c.mask && d.mask & c.mask == c.mask);
        if !nested_in_other {
            root -= beyond[a];
        }
        for (b, d) in chords.iter().enumerate() {
            if b != a && d.mask != c.mask && d.mask & c.mask == d.mask {
                // Subtract only direct children.
                let direct = !chords.iter().any(|x| {
                    x.mask != c.mask && x.mask != d.mask && x.mask & c.mask == x.mask && x.mask & d.mask == d.mask
                });
                if direct {
                    face -= beyond[b];
                }
            }
        }
        if cone.inside()[c.arc_start] {
            total += face;
        }
    }
    let full: u64 = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let root_mask = chords.iter().fold(full, |acc, c| acc & !c.mask);
    if root_mask != 0 && cone.inside()[root_mask.trailing_zeros() as usize] {
        total += root;
    }
    total
}

/// Nested curves must not cross: a child curve lies beyond its parent.
fn nested_disjoint(cone: &PlanarCone, chords: &[Chord], curves: &[ExpanderCurve]) -> bool {
    let th = cone.ray_angles();
    let m = cone.ray_count();
    for (a, c) in chords.iter().enumerate() {
        for (b, d) in chords.iter().enumerate() {
            if a == b || d.mask == c.mask || d.mask & c.mask != d.mask {
                continue;
            }
            let a0 = th[c.arc_start];
            let opening = wrap_angle(th[(c.arc_start + c.arc_len) % m] - a0);
            for p in curves[b].curve.nodes().iter().step_by(8) {
                let r = p.norm();
                if r > R_MAX * 0.5 {
                    continue;
                }
                if r <= radial(&curves[a], a0, opening, p.angle()) {
                    return false;
                }
            }
        }
    }
    true
}

/// Selects the outermost configuration on each side and measures the gap
/// between them.
pub fn outermost_expanders(cone: &PlanarCone) -> Result<OutermostResult, ExpanderError> {
    outermost_expanders_with(cone, PairOptions::default())
}

pub fn outermost_expanders_with(cone: &PlanarCone, opts: PairOptions) -> Result<OutermostResult, ExpanderError> {
    let m = cone.ray_count();
    if m > 64 {
        return Err(ExpanderError::InvalidCone { reason: "at most 64 rays are supported".into() });
    }
    let rays: Vec<usize> = (0..m).collect();
    let configs: Vec<Vec<Chord>> = non_crossing_matchings(&rays)
        .into_iter()
        .map(|mm| mm.iter().map(|&(i, j)| chord(cone, i, j)).collect::<Vec<_>>())
        .filter(|cs| admissible(cone, cs))
        .collect();
    if configs.is_empty() {
        return Err(ExpanderError::NoConfiguration);
    }
    let mut cache: BTreeMap<(usize, usize, bool), ExpanderCurve> = BTreeMap::new();
    let mut get = |c: &Chord, side: Side| -> Result<ExpanderCurve, ExpanderError> {
        let key = (c.rays.0, c.rays.1, side == Side::W);
        if let Some(e) = cache.get(&key) {
            return Ok(e.clone());
        }
        let e = solve_chord(cone, c, side, opts)?;
        cache.insert(key, e.clone());
        Ok(e)
    };
    let mut solved: Vec<(Vec<ExpanderCurve>, Vec<Chord>)> = Vec::new();
    for cs in &configs {
        let curves = cs.iter().map(|c| get(c, Side::W)).collect::<Result<Vec<_>, _>>()?;
        if nested_disjoint(cone, cs, &curves) {
            solved.push((curves, cs.clone()));
        }
    }
    if solved.is_empty() {
        return Err(ExpanderError::NoConfiguration);
    }
    let far = solved.iter().flat_map(|(c, _)| c.iter()).map(|e| e.vertex_distance).fold(0.0, f64::max);
    let radius = (2.0 * far + 4.0).min(opts.max_radius);
    let areas: Vec<f64> = solved.iter().map(|(c, cs)| w_area(cone, cs, c, radius)).collect();
    let mut best = 0;
    let mut worst = 0;
    for k in 1..areas.len() {
        if areas[k] > areas[best] {
            best = k;
        }
        if areas[k] < areas[worst] {
            worst = k;
        }
    }
    let sigma = solved[best].0.clone();
    let prime_chords = solved[worst].1.clone();
    let sigma_prime = prime_chords.iter().map(|c| get(c, Side::WPrime)).collect::<Result<Vec<_>, _>>()?;
    let a = CurveSet::from_curves(sigma.iter().map(|e| &e.curve));
    let b = CurveSet::from_curves(sigma_prime.iter().map(|e| &e.curve));
    let gap = local_hausdorff(&a, &b, crate::math::Vec2::ZERO, radius);
    let tolerance = 5.0 * opts.step;
    Ok(OutermostResult {
        sigma,
        sigma_prime,
        fattens: gap > tolerance,
        gap_measure: gap,
        tolerance,
        comparison_radius: radius,
        sigma_pairing: solved[best].1.iter().map(|c| c.rays).collect(),
        sigma_prime_pairing: prime_chords.iter().map(|c| c.rays).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matchings_count_is_catalan() {
        assert_eq!(non_crossing_matchings(&[0, 1]).len(), 1);
        assert_eq!(non_crossing_matchings(&[0, 1, 2, 3]).len(), 2);
        assert_eq!(non_crossing_matchings(&[0, 1, 2, 3, 4, 5]).len(), 5);
    }

    #[test]
    fn line_cone_does_not_fatten() {
        let r = outermost_expanders(&PlanarCone::line(0.3)).unwrap();
        assert!(!r.fattens);
        assert!(r.gap_measure <= 2.0 * 0.01);
        assert!(r.sigma[0].is_line());
    }

    #[test]
    fn cross_fattens_with_opposite_pairings() {
        let r = outermost_expanders(&PlanarCone::cross()).unwrap();
        assert!(r.fattens, "gap {}", r.gap_measure);
        assert_eq!(r.sigma.len(), 2);
        // Σ opens around the second and fourth quadrants, Σ' around the others.
        for e in &r.sigma {
            let v = e.curve.node(e.vertex);
            assert!(v.x * v.y < 0.0);
            assert!(e.curve.normal(e.vertex).dot(v) < 0.0);
        }
        for e in &r.sigma_prime {
            let v = e.curve.node(e.vertex);
            assert!(v.x * v.y > 0.0);
        }
        assert!(r.gap_measure > 0.5);
    }

    #[test]
    fn obtuse_wedge_does_not_fatten() {
        let r = outermost_expanders(&PlanarCone::wedge(0.5 * PI, 2.0 * PI / 3.0)).unwrap();
        assert!(!r.fattens, "gap {}", r.gap_measure);
    }
}
