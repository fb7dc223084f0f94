use alloc::vec::Vec;

use super::spline::CubicSpline;
use super::GeometryError;
use crate::math::{Real, Vec2, PI, TAU};

/// Which of the two unit normals a curve carries.
///
/// `Positive` selects the counterclockwise rotation of the tangent (the left
/// normal), `Negative` the right normal. Curvature is signed against the
/// selected normal, so with the shape operator `S = -dν` the scalar mean
/// curvature is `H = κ` and the mean curvature vector is `H ν`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }

    pub fn from_sign(sign: i32) -> Option<Self> {
        match sign {
            1 => Some(Orientation::Positive),
            -1 => Some(Orientation::Negative),
            _ => None,
        }
    }
}

/// Differential data cached at a node.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NodeGeometry {
    pub tangent: Vec2,
    pub normal: Vec2,
    /// Tangent angle, unwrapped along the curve.
    pub angle: f64,
    /// Curvature signed against `normal`; equals the scalar mean curvature.
    pub curvature: f64,
}

/// An oriented polyline with per-node tangent, normal and curvature.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteCurve {
    nodes: Vec<Vec2>,
    closed: bool,
    orientation: Orientation,
    geometry: Vec<NodeGeometry>,
}

impl DiscreteCurve {
    pub fn new(nodes: Vec<Vec2>, closed: bool, orientation: Orientation) -> Result<Self, GeometryError> {
        let required = if closed { 3 } else { 2 };
        if nodes.len() < required {
            return Err(GeometryError::TooFewNodes { count: nodes.len(), required });
        }
        if let Some(i) = nodes.iter().position(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(GeometryError::NonFinite { index: i });
        }
        let n = nodes.len();
        let edges = if closed { n } else { n - 1 };
        for i in 0..edges {
            if nodes[i] == nodes[(i + 1) % n] {
                return Err(GeometryError::RepeatedNode { index: i });
            }
        }
        let geometry = compute_geometry(&nodes, closed, orientation);
        Ok(Self { nodes, closed, orientation, geometry })
    }

    /// Straight segment from `a` to `b` sampled with `count` nodes.
    pub fn segment(a: Vec2, b: Vec2, count: usize, orientation: Orientation) -> Result<Self, GeometryError> {
        let count = count.max(2);
        let nodes = (0..count)
            .map(|i| {
                let t = i as f64 / (count - 1) as f64;
                a + (b - a) * t
            })
            .collect();
        Self::new(nodes, false, orientation)
    }

    /// Circle sampled uniformly, counterclockwise.
    pub fn circle(center: Vec2, radius: f64, count: usize, orientation: Orientation) -> Result<Self, GeometryError> {
        let nodes = (0..count)
            .map(|i| center + Vec2::from_angle(TAU * i as f64 / count as f64) * radius)
            .collect();
        Self::new(nodes, true, orientation)
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn geometry(&self) -> &[NodeGeometry] {
        &self.geometry
    }

    pub fn node(&self, i: usize) -> Vec2 {
        self.nodes[i]
    }

    pub fn normal(&self, i: usize) -> Vec2 {
        self.geometry[i].normal
    }

    pub fn curvature(&self, i: usize) -> f64 {
        self.geometry[i].curvature
    }

    /// Per-node `(ν, κ, H)`; needs at least three nodes.
    pub fn curvature_data(&self) -> Result<Vec<(Vec2, f64, f64)>, GeometryError> {
        if self.nodes.len() < 3 {
            return Err(GeometryError::TooFewNodes { count: self.nodes.len(), required: 3 });
        }
        Ok(self.geometry.iter().map(|g| (g.normal, g.curvature, g.curvature)).collect())
    }

    /// Same point set with the opposite normal.
    pub fn with_orientation(&self, orientation: Orientation) -> Self {
        if orientation == self.orientation {
            return self.clone();
        }
        let geometry = self
            .geometry
            .iter()
            .map(|g| NodeGeometry { normal: -g.normal, curvature: -g.curvature, ..*g })
            .collect();
        Self { nodes: self.nodes.clone(), closed: self.closed, orientation, geometry }
    }

    /// Reverses the traversal direction while keeping the same normal field.
    pub fn reversed(&self) -> Self {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        Self::new(nodes, self.closed, self.orientation.flipped())
            .expect("reversal preserves validity")
    }

    pub fn map_points(&self, f: impl Fn(Vec2) -> Vec2) -> Result<Self, GeometryError> {
        Self::new(self.nodes.iter().map(|&p| f(p)).collect(), self.closed, self.orientation)
    }

    /// Like [`map_points`](Self::map_points) with the node index passed along.
    pub fn map_points_indexed(&self, f: impl Fn(usize, Vec2) -> Vec2) -> Result<Self, GeometryError> {
        Self::new(self.nodes.iter().enumerate().map(|(i, &p)| f(i, p)).collect(), self.closed, self.orientation)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self, GeometryError> {
        self.map_points(|p| p * factor)
    }

    /// Arclength of every edge; for closed curves the closing edge is last.
    pub fn edge_lengths(&self) -> Vec<f64> {
        let n = self.nodes.len();
        let edges = if self.closed { n } else { n - 1 };
        (0..edges).map(|i| self.nodes[(i + 1) % n].dist(self.nodes[i])).collect()
    }

    pub fn length(&self) -> f64 {
        crate::math::pairwise_sum(&self.edge_lengths())
    }

    /// Cumulative arclength at each node, starting at zero.
    pub fn arclength(&self) -> Vec<f64> {
        let mut s = Vec::with_capacity(self.nodes.len());
        let mut acc = 0.0;
        s.push(0.0);
        for (i, w) in self.nodes.windows(2).enumerate() {
            acc += w[1].dist(w[0]);
            let _ = i;
            s.push(acc);
        }
        s
    }

    /// Sum of exterior turning angles, a multiple of 2π for closed curves.
    pub fn total_turning(&self) -> f64 {
        let n = self.nodes.len();
        let edges = self.edge_lengths().len();
        let mut turn = 0.0;
        let last = if self.closed { edges } else { edges - 1 };
        for i in 0..last {
            let a = self.nodes[(i + 1) % n] - self.nodes[i];
            let b = self.nodes[(i + 2) % n] - self.nodes[(i + 1) % n];
            turn += a.cross(b).atan2(a.dot(b));
        }
        turn
    }

    pub fn winding_number(&self) -> i64 {
        (self.total_turning() / TAU).round() as i64
    }

    /// Distance from `p` to the polyline together with the closest point.
    pub fn closest_point(&self, p: Vec2) -> (f64, Vec2) {
        let n = self.nodes.len();
        let edges = if self.closed { n } else { n - 1 };
        let mut best = (f64::INFINITY, self.nodes[0]);
        for i in 0..edges {
            let q = closest_on_segment(p, self.nodes[i], self.nodes[(i + 1) % n]);
            let d = p.dist(q);
            if d < best.0 {
                best = (d, q);
            }
        }
        best
    }

    /// Resamples at uniform arclength spacing in `[h, 2h)` along a
    /// chord-length cubic spline through the nodes.
    pub fn resample_arclength(&self, h: f64) -> Result<Self, GeometryError> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(GeometryError::InvalidSpacing { spacing: h });
        }
        if self.nodes.len() < 3 {
            return Err(GeometryError::TooFewNodes { count: self.nodes.len(), required: 3 });
        }
        let spline = CubicSpline::new(&self.nodes, self.closed);
        let seg_len: Vec<f64> = (0..spline.segments()).map(|i| spline.segment_length(i)).collect();
        let mut cum = Vec::with_capacity(seg_len.len() + 1);
        cum.push(0.0);
        for l in &seg_len {
            cum.push(cum[cum.len() - 1] + l);
        }
        let total = cum[cum.len() - 1];
        let pieces = ((total / h).floor() as usize).max(1);
        let step = total / pieces as f64;
        let count = if self.closed { pieces } else { pieces + 1 };
        let mut out = Vec::with_capacity(count);
        let mut seg = 0;
        for k in 0..count {
            let target = if !self.closed && k == pieces { total } else { step * k as f64 };
            while seg + 1 < seg_len.len() && cum[seg + 1] <= target {
                seg += 1;
            }
            let local = target - cum[seg];
            if !self.closed && k == pieces {
                out.push(self.nodes[self.nodes.len() - 1]);
            } else if local <= 0.0 {
                out.push(spline.eval(seg, 0.0));
            } else {
                let t = spline.invert(seg, local, seg_len[seg]);
                out.push(spline.eval(seg, t));
            }
        }
        Self::new(out, self.closed, self.orientation)
    }
}

pub(crate) fn closest_on_segment(p: Vec2, a: Vec2, b: Vec2) -> Vec2 {
    let ab = b - a;
    let len2 = ab.norm_sq();
    if len2 == 0.0 {
        return a;
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    a + ab * t
}

/// Signed curvature of the circle through three points (positive when the
/// points turn counterclockwise).
#[inline]
pub(crate) fn circumcircle_curvature(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    let u = b - a;
    let v = c - b;
    let w = c - a;
    2.0 * u.cross(v) / (u.norm() * v.norm() * w.norm())
}

/// Tangent of the interpolating parabola at the middle of three points.
#[inline]
fn central_tangent(a: Vec2, b: Vec2, c: Vec2) -> Vec2 {
    let u = b - a;
    let v = c - b;
    let h1 = u.norm();
    let h2 = v.norm();
    (v * (h1 / h2) + u * (h2 / h1)).normalized()
}

/// One-sided second-order tangent at `a` from the parabola through `a, b, c`.
#[inline]
fn end_tangent(a: Vec2, b: Vec2, c: Vec2) -> Vec2 {
    let h1 = b.dist(a);
    let h2 = c.dist(b);
    let d = a * (-(2.0 * h1 + h2) / (h1 * (h1 + h2))) + b * ((h1 + h2) / (h1 * h2)) - c * (h1 / (h2 * (h1 + h2)));
    d.normalized()
}

fn compute_geometry(nodes: &[Vec2], closed: bool, orientation: Orientation) -> Vec<NodeGeometry> {
    let n = nodes.len();
    let sign = orientation.sign();
    let mut tangents = Vec::with_capacity(n);
    let mut kappa = Vec::with_capacity(n);
    if n == 2 {
        let t = (nodes[1] - nodes[0]).normalized();
        tangents.push(t);
        tangents.push(t);
        kappa.push(0.0);
        kappa.push(0.0);
    } else {
        for i in 0..n {
            let (t, k) = if closed || (i > 0 && i + 1 < n) {
                let a = nodes[(i + n - 1) % n];
                let b = nodes[i];
                let c = nodes[(i + 1) % n];
                (central_tangent(a, b, c), circumcircle_curvature(a, b, c))
            } else if i == 0 {
                (end_tangent(nodes[0], nodes[1], nodes[2]), f64::NAN)
            } else {
                let t = -end_tangent(nodes[n - 1], nodes[n - 2], nodes[n - 3]);
                (t, f64::NAN)
            };
            tangents.push(t);
            kappa.push(k);
        }
        if !closed {
            // Linear extrapolation of the interior curvature to the endpoints.
            kappa[0] = if n > 3 { 2.0 * kappa[1] - kappa[2] } else { kappa[1] };
            kappa[n - 1] = if n > 3 { 2.0 * kappa[n - 2] - kappa[n - 3] } else { kappa[n - 2] };
        }
    }
    let mut out = Vec::with_capacity(n);
    let mut prev_angle = 0.0;
    for i in 0..n {
        let t = tangents[i];
        let raw = t.angle();
        let angle = if i == 0 {
            raw
        } else {
            let mut d = raw - prev_angle;
            while d > PI {
                d -= TAU;
            }
            while d < -PI {
                d += TAU;
            }
            prev_angle + d
        };
        prev_angle = angle;
        out.push(NodeGeometry {
            tangent: t,
            normal: t.perp() * sign,
            angle,
            curvature: kappa[i] * sign,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn irregular_circle(count: usize) -> DiscreteCurve {
        let nodes = (0..count)
            .map(|i| {
                let t = TAU * (i as f64 + 0.3 * ((i * 7 % 5) as f64 / 5.0 - 0.4)) / count as f64;
                Vec2::from_angle(t)
            })
            .collect();
        DiscreteCurve::new(nodes, true, Orientation::Negative).unwrap()
    }

    #[test]
    fn resampled_circle_is_uniform_and_accurate() {
        let c = irregular_circle(17).resample_arclength(0.1).unwrap();
        assert!((60..=64).contains(&c.len()), "{} nodes", c.len());
        let e = c.edge_lengths();
        let (lo, hi) = (crate::math::min_of(e.iter().copied()), crate::math::max_of(e.iter().copied()));
        assert!(lo >= 0.1 * 0.999 && hi < 0.2, "{lo} {hi}");
        assert!(hi - lo < 1e-3 * lo);
        let err = crate::math::max_of(c.nodes().iter().map(|p| (p.norm() - 1.0).abs()));
        assert!(err <= 1e-2, "hausdorff {err}");
    }

    #[test]
    fn resampled_segment_stays_on_segment() {
        let s = DiscreteCurve::new(
            vec![Vec2::new(0.0, 0.0), Vec2::new(0.3, 0.6), Vec2::new(1.0, 2.0), Vec2::new(1.5, 3.0)],
            false,
            Orientation::Positive,
        )
        .unwrap();
        let r = s.resample_arclength(0.05).unwrap();
        for p in r.nodes() {
            assert!((p.y - 2.0 * p.x).abs() < 1e-12);
        }
        assert_eq!(r.node(0), Vec2::new(0.0, 0.0));
        assert_eq!(r.node(r.len() - 1), Vec2::new(1.5, 3.0));
    }

    #[test]
    fn coincident_nodes_rejected() {
        let err = DiscreteCurve::new(
            vec![Vec2::new(0.0, 0.0), Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)],
            false,
            Orientation::Positive,
        )
        .unwrap_err();
        assert_eq!(err, GeometryError::RepeatedNode { index: 0 });
    }

    #[test]
    fn circle_curvature_sign_follows_normal() {
        let r = 2.0;
        let out = DiscreteCurve::circle(Vec2::ZERO, r, 400, Orientation::Negative).unwrap();
        for (i, g) in out.geometry().iter().enumerate() {
            assert!((g.curvature + 1.0 / r).abs() < 1e-4);
            assert!(g.normal.dot(out.node(i)) > 0.999 * r);
        }
        let inward = out.with_orientation(Orientation::Positive);
        for g in inward.geometry() {
            assert!((g.curvature - 1.0 / r).abs() < 1e-4);
        }
    }

    #[test]
    fn line_has_zero_curvature() {
        let l = DiscreteCurve::segment(Vec2::new(-1.0, 0.5), Vec2::new(2.0, -1.0), 50, Orientation::Positive).unwrap();
        for (_, k, h) in l.curvature_data().unwrap() {
            assert!(k.abs() < 1e-12 && h == k);
        }
    }

    #[test]
    fn parabola_curvature_second_order() {
        let err = |h: f64| {
            let nodes: Vec<Vec2> = (-10..=10).map(|i| {
                let x = i as f64 * h;
                Vec2::new(x, 0.5 * x * x)
            }).collect();
            let c = DiscreteCurve::new(nodes, false, Orientation::Positive).unwrap();
            (c.curvature(10) - 1.0).abs()
        };
        let (e1, e2) = (err(0.02), err(0.01));
        assert!(e1 < 1e-3);
        assert!(e1 / e2 > 3.5, "{e1} {e2}");
        // Upward normal at the vertex.
        let nodes: Vec<Vec2> = (-3..=3).map(|i| Vec2::new(i as f64 * 0.1, 0.005 * (i * i) as f64)).collect();
        let c = DiscreteCurve::new(nodes, false, Orientation::Positive).unwrap();
        assert!((c.normal(3) - Vec2::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn closed_curve_turning_is_multiple_of_tau() {
        let c = irregular_circle(23);
        assert_eq!(c.winding_number(), 1);
        assert!((c.total_turning() - TAU).abs() < 1e-9);
        assert_eq!(c.reversed().winding_number(), -1);
    }

    #[test]
    fn too_few_nodes_for_curvature() {
        let s = DiscreteCurve::segment(Vec2::ZERO, Vec2::new(1.0, 0.0), 2, Orientation::Positive).unwrap();
        assert!(matches!(s.curvature_data(), Err(GeometryError::TooFewNodes { .. })));
    }
}
