use alloc::vec::Vec;

use super::grid::GridSpec;
use super::LevelSetError;
use crate::expander::PlanarCone;
use crate::geometry::{closest_on_segment, DiscreteCurve};
use crate::math::{Real, Vec2, PI, TAU};

/// Initial sets for the level set solver. `V` is the region where the
/// signed distance is negative: the inside region `W` of a cone, the disc,
/// or the region enclosed by a polygon under the even-odd rule.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Shape {
    Cone(PlanarCone),
    Circle { center: Vec2, radius: f64 },
    Polygon { points: Vec<Vec2>, singular: bool },
}

impl Shape {
    pub fn circle(center: Vec2, radius: f64) -> Result<Self, LevelSetError> {
        if !(radius > 0.0) {
            return Err(LevelSetError::InvalidParameter { name: "radius", value: radius });
        }
        Ok(Shape::Circle { center, radius })
    }

    /// Lemniscate `r² = a² sin 2θ`: the figure eight through the origin
    /// tangent to both axes, with lobes in the first and third quadrants.
    pub fn figure_eight(a: f64) -> Result<Self, LevelSetError> {
        if !(a > 0.0) {
            return Err(LevelSetError::InvalidParameter { name: "a", value: a });
        }
        let m = 16384;
        let points = (0..m)
            .map(|k| {
                let t = TAU * k as f64 / m as f64;
                let (s, c) = (t.sin(), t.cos());
                let d = 1.0 + s * s;
                Vec2::new(a * c / d, a * s * c / d).rotate(0.25 * PI)
            })
            .collect();
        Ok(Shape::Polygon { points, singular: true })
    }

    /// A teardrop: the convex hull of the origin and a disc of radius
    /// `radius`, which has a single corner at the origin modelled on the
    /// wedge of the given opening about `bisector`.
    pub fn wedge_corner(bisector: f64, opening: f64, radius: f64) -> Result<Self, LevelSetError> {
        if !(opening > 0.0 && opening < PI) {
            return Err(LevelSetError::InvalidParameter { name: "opening", value: opening });
        }
        if !(radius > 0.0) {
            return Err(LevelSetError::InvalidParameter { name: "radius", value: radius });
        }
        let half = 0.5 * opening;
        let center = Vec2::from_angle(bisector) * (radius / half.sin());
        let reach = radius / half.tan();
        let step = radius * 1e-3;
        let mut points = Vec::new();
        let ray = |angle: f64, points: &mut Vec<Vec2>, forward: bool| {
            let m = (reach / step).ceil() as usize;
            for k in 0..m {
                let k = if forward { k } else { m - k };
                points.push(Vec2::from_angle(angle) * (reach * k as f64 / m as f64));
            }
        };
        ray(bisector - half, &mut points, true);
        let a0 = bisector - half - 0.5 * PI;
        let span = PI + opening;
        let m = (span * radius / step).ceil() as usize;
        for k in 0..m {
            points.push(center + Vec2::from_angle(a0 + span * k as f64 / m as f64) * radius);
        }
        ray(bisector + half, &mut points, false);
        Ok(Shape::Polygon { points, singular: true })
    }

    /// A closed curve treated as a polygon.
    pub fn from_curve(curve: &DiscreteCurve) -> Result<Self, LevelSetError> {
        if !curve.is_closed() {
            return Err(LevelSetError::OpenCurve);
        }
        Ok(Shape::Polygon { points: curve.nodes().to_vec(), singular: false })
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, Shape::Cone(_))
    }

    /// Whether the zero set has a corner or crossing.
    pub fn is_singular(&self) -> bool {
        match self {
            Shape::Cone(c) => {
                let a = c.ray_angles();
                !(a.len() == 2 && ((a[1] - a[0]) - PI).abs() < 1e-12)
            }
            Shape::Circle { .. } => false,
            Shape::Polygon { singular, .. } => *singular,
        }
    }

    /// Lower-left and upper-right corners; infinite for cones.
    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        match self {
            Shape::Cone(_) => (Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY), Vec2::new(f64::INFINITY, f64::INFINITY)),
            Shape::Circle { center, radius } => (*center - Vec2::new(*radius, *radius), *center + Vec2::new(*radius, *radius)),
            Shape::Polygon { points, .. } => {
                let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
                let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for p in points {
                    lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
                    hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
                }
                (lo, hi)
            }
        }
    }

    /// Exact signed distance at a point, negative in `V`.
    pub fn signed_distance(&self, p: Vec2) -> f64 {
        match self {
            Shape::Cone(c) => c.signed_distance(p),
            Shape::Circle { center, radius } => p.dist(*center) - radius,
            Shape::Polygon { points, .. } => {
                let n = points.len();
                let mut best = f64::INFINITY;
                let mut inside = false;
                for k in 0..n {
                    let (a, b) = (points[k], points[(k + 1) % n]);
                    best = best.min(p.dist(closest_on_segment(p, a, b)));
                    if (a.y > p.y) != (b.y > p.y) && p.x < a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x) {
                        inside = !inside;
                    }
                }
                if inside {
                    -best
                } else {
                    best
                }
            }
        }
    }

    /// Signed distance at every cell centre, exact where `|d| ≤ reach` and
    /// `±reach` (with the correct sign) elsewhere.
    pub fn signed_distance_grid(&self, spec: &GridSpec, reach: f64) -> Vec<f64> {
        let n = spec.n;
        let Shape::Polygon { points, .. } = self else {
            let mut out = Vec::with_capacity(spec.len());
            for j in 0..n {
                for i in 0..n {
                    out.push(self.signed_distance(spec.point(i, j)));
                }
            }
            return out;
        };
        let h = spec.spacing();
        let origin = spec.point(0, 0);
        let m = points.len();
        let mut dist = alloc::vec![reach; spec.len()];
        let cell = |x: f64, o: f64| ((x - o) / h).clamp(0.0, (n - 1) as f64);
        for k in 0..m {
            let (a, b) = (points[k], points[(k + 1) % m]);
            let i0 = cell(a.x.min(b.x) - reach, origin.x).floor() as usize;
            let i1 = cell(a.x.max(b.x) + reach, origin.x).ceil() as usize;
            let j0 = cell(a.y.min(b.y) - reach, origin.y).floor() as usize;
            let j1 = cell(a.y.max(b.y) + reach, origin.y).ceil() as usize;
            for j in j0..=j1 {
                for i in i0..=i1 {
                    let p = spec.point(i, j);
                    let d = p.dist(closest_on_segment(p, a, b));
                    let slot = &mut dist[spec.index(i, j)];
                    if d < *slot {
                        *slot = d;
                    }
                }
            }
        }
        // Even-odd rule, one scanline per row.
        let mut xs = Vec::new();
        for j in 0..n {
            let y = spec.point(0, j).y;
            xs.clear();
            for k in 0..m {
                let (a, b) = (points[k], points[(k + 1) % m]);
                if (a.y > y) != (b.y > y) {
                    xs.push(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
                }
            }
            xs.sort_by(f64::total_cmp);
            let mut crossed = 0;
            for i in 0..n {
                let x = spec.point(i, j).x;
                while crossed < xs.len() && xs[crossed] <= x {
                    crossed += 1;
                }
                if crossed % 2 == 1 {
                    let slot = &mut dist[spec.index(i, j)];
                    *slot = -*slot;
                }
            }
        }
        dist
    }
}
