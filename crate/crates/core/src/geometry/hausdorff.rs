//! Distances between polylines and collections of polylines.

use alloc::vec::Vec;

use super::{closest_on_segment, DiscreteCurve};
use crate::math::Vec2;

/// A collection of polylines (closed or open) treated as one point set.
#[derive(Clone, Debug, Default)]
pub struct CurveSet {
    pub polylines: Vec<(Vec<Vec2>, bool)>,
}

impl CurveSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, points: Vec<Vec2>, closed: bool) {
        if !points.is_empty() {
            self.polylines.push((points, closed));
        }
    }

    pub fn from_curves<'a>(curves: impl IntoIterator<Item = &'a DiscreteCurve>) -> Self {
        let mut s = Self::new();
        for c in curves {
            s.push(c.nodes().to_vec(), c.is_closed());
        }
        s
    }

    pub fn is_empty(&self) -> bool {
        self.polylines.iter().all(|(p, _)| p.is_empty())
    }

    pub fn points(&self) -> impl Iterator<Item = Vec2> + '_ {
        self.polylines.iter().flat_map(|(p, _)| p.iter().copied())
    }

    pub fn map(&self, f: impl Fn(Vec2) -> Vec2) -> Self {
        Self {
            polylines: self
                .polylines
                .iter()
                .map(|(p, c)| (p.iter().map(|&q| f(q)).collect(), *c))
                .collect(),
        }
    }

    /// Distance from `p` to the nearest segment of any polyline.
    pub fn distance(&self, p: Vec2) -> f64 {
        let mut best = f64::INFINITY;
        for (pts, closed) in &self.polylines {
            let n = pts.len();
            if n == 1 {
                best = best.min(p.dist(pts[0]));
                continue;
            }
            let edges = if *closed { n } else { n - 1 };
            for i in 0..edges {
                let a = pts[i];
                let b = pts[(i + 1) % n];
                // Cheap rejection on the bounding box.
                let lo_x = a.x.min(b.x) - best;
                let hi_x = a.x.max(b.x) + best;
                let lo_y = a.y.min(b.y) - best;
                let hi_y = a.y.max(b.y) + best;
                if p.x < lo_x || p.x > hi_x || p.y < lo_y || p.y > hi_y {
                    continue;
                }
                let d = p.dist(closest_on_segment(p, a, b));
                if d < best {
                    best = d;
                }
            }
        }
        best
    }

    /// Signed parameter `t` of the intersection of the line `p + tν` with
    /// the set that is nearest to `p`, within `|t| ≤ max`, together with
    /// `|ν·n|` for the unit normal `n` of the segment hit.
    pub fn normal_line_offset(&self, p: Vec2, nu: Vec2, max: f64) -> Option<(f64, f64)> {
        let mut best: Option<(f64, f64)> = None;
        for (pts, closed) in &self.polylines {
            let n = pts.len();
            if n < 2 {
                continue;
            }
            let edges = if *closed { n } else { n - 1 };
            for i in 0..edges {
                let a = pts[i];
                let b = pts[(i + 1) % n];
                if a.dist(p).min(b.dist(p)) > max + a.dist(b) {
                    continue;
                }
                let e = b - a;
                let denom = nu.cross(e);
                if denom == 0.0 {
                    continue;
                }
                let t = (a - p).cross(e) / denom;
                let lam = (a - p).cross(nu) / denom;
                if !(-1e-12..=1.0 + 1e-12).contains(&lam) || t.abs() > max {
                    continue;
                }
                if best.is_none_or(|(bt, _)| t.abs() < bt.abs()) {
                    best = Some((t, denom.abs() / e.norm()));
                }
            }
        }
        best
    }

    pub fn total_points(&self) -> usize {
        self.polylines.iter().map(|(p, _)| p.len()).sum()
    }
}

/// `sup_{a ∈ A} dist(a, B)` over the nodes of `A`.
pub fn one_sided_distance(a: &CurveSet, b: &CurveSet) -> f64 {
    let mut worst: f64 = 0.0;
    for p in a.points() {
        worst = worst.max(b.distance(p));
    }
    worst
}

/// Symmetric Hausdorff distance between two curve sets.
pub fn hausdorff(a: &CurveSet, b: &CurveSet) -> f64 {
    one_sided_distance(a, b).max(one_sided_distance(b, a))
}

/// Hausdorff distance localised to the ball `B_radius(center)`: points of
/// either set inside the ball are measured against the whole other set, so
/// clipping at the ball boundary does not create spurious distance.
pub fn local_hausdorff(a: &CurveSet, b: &CurveSet, center: Vec2, radius: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for p in a.points().filter(|p| p.dist(center) <= radius) {
        worst = worst.max(b.distance(p));
    }
    for p in b.points().filter(|p| p.dist(center) <= radius) {
        worst = worst.max(a.distance(p));
    }
    worst
}

/// Hausdorff distance between two finite point sets.
pub fn point_set_distance(a: &[Vec2], b: &[Vec2]) -> f64 {
    let side = |x: &[Vec2], y: &[Vec2]| {
        let mut worst: f64 = 0.0;
        for p in x {
            let mut best = f64::INFINITY;
            for q in y {
                best = best.min(p.dist(*q));
            }
            worst = worst.max(best);
        }
        worst
    };
    side(a, b).max(side(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Orientation;

    #[test]
    fn normal_line_hits_nearest_crossing() {
        let c = DiscreteCurve::circle(Vec2::ZERO, 2.0, 400, Orientation::Positive).unwrap();
        let set = CurveSet::from_curves([&c]);
        let (t, cos) = set.normal_line_offset(Vec2::new(1.0, 0.0), Vec2::new(1.0, 0.0), 5.0).unwrap();
        assert!((t - 1.0).abs() < 1e-3 && cos > 0.999);
        assert!(set.normal_line_offset(Vec2::new(1.0, 0.0), Vec2::new(1.0, 0.0), 0.5).is_none());
    }

    #[test]
    fn concentric_circles() {
        let a = DiscreteCurve::circle(Vec2::ZERO, 1.0, 2000, Orientation::Positive).unwrap();
        let b = DiscreteCurve::circle(Vec2::ZERO, 1.25, 2000, Orientation::Positive).unwrap();
        let d = hausdorff(&CurveSet::from_curves([&a]), &CurveSet::from_curves([&b]));
        assert!((d - 0.25).abs() < 1e-5);
    }

    #[test]
    fn local_ignores_far_parts() {
        let mut a = CurveSet::new();
        a.push(alloc::vec![Vec2::new(-5.0, 0.0), Vec2::new(0.0, 0.0), Vec2::new(5.0, 0.0)], false);
        let mut b = CurveSet::new();
        b.push(alloc::vec![Vec2::new(-5.0, 0.1), Vec2::new(0.0, 0.1), Vec2::new(0.5, 0.1), Vec2::new(5.0, 3.0)], false);
        let d = local_hausdorff(&a, &b, Vec2::ZERO, 1.0);
        assert!((d - 0.1).abs() < 1e-12);
        assert!(hausdorff(&a, &b) > 2.0);
    }
}
