use alloc::string::String;
use alloc::vec::Vec;

use super::{ExpanderError, DEFAULT_STEP, R_DETECT, R_MAX};
use crate::geometry::{DiscreteCurve, GeometryError, Orientation};
use crate::math::{Real, Vec2};

/// Curvature magnitude treated as a blow-up.
const KAPPA_LIMIT: f64 = 1e8;
/// Angle variation per unit arclength below which the tangent is frozen.
const FREEZE_TOLERANCE: f64 = 1e-8;

/// Initial data for the expander ODE.
///
/// The ODE is first order in `(x, θ)`, so the curvature at the start is
/// determined by the point and angle. `with_curvature` checks that a
/// supplied value is consistent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShootStart {
    pub point: Vec2,
    pub angle: f64,
    pub curvature: f64,
}

impl ShootStart {
    pub fn new(point: Vec2, angle: f64) -> Self {
        let curvature = 0.5 * point.dot(Vec2::from_angle(angle).perp());
        Self { point, angle, curvature }
    }

    pub fn with_curvature(point: Vec2, angle: f64, curvature: f64) -> Result<Self, ExpanderError> {
        let s = Self::new(point, angle);
        let scale = 1.0 + point.norm();
        if !curvature.is_finite() || (curvature - s.curvature).abs() > 1e-12 * scale {
            return Err(ExpanderError::InvalidInput {
                reason: String::from("initial curvature must equal (x·ν)/2 for the given point and angle"),
            });
        }
        Ok(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShootOptions {
    pub step: f64,
    /// Stop once `|x|` reaches this radius.
    pub stop_radius: f64,
    pub detect_radius: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self { step: DEFAULT_STEP, stop_radius: R_MAX, detect_radius: R_DETECT }
    }
}

/// Where the tangent angle froze.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Asymptote {
    pub angle: f64,
    pub arclength: f64,
}

/// Output of one integration: nodes at arclength `k·step` with their
/// tangent angles.
#[derive(Clone, Debug)]
pub struct ShotCurve {
    pub points: Vec<Vec2>,
    pub angles: Vec<f64>,
    pub step: f64,
    pub asymptote: Option<Asymptote>,
}

impl ShotCurve {
    pub fn final_angle(&self) -> f64 {
        *self.angles.last().expect("shot has at least the start node")
    }

    pub fn to_curve(&self, orientation: Orientation) -> Result<DiscreteCurve, GeometryError> {
        DiscreteCurve::new(self.points.clone(), false, orientation)
    }
}

#[inline]
fn rhs(p: Vec2, theta: f64) -> (Vec2, f64) {
    let (s, c) = (theta.sin(), theta.cos());
    (Vec2::new(c, s), 0.5 * (p.y * c - p.x * s))
}

/// Integrates the expander ODE with classical RK4 and fixed step until the
/// arclength budget is spent or the curve leaves `stop_radius`.
pub fn shoot_expander(start: ShootStart, length: f64, options: ShootOptions) -> Result<ShotCurve, ExpanderError> {
    let h = options.step;
    if !(length > 0.0) || !length.is_finite() {
        return Err(ExpanderError::InvalidInput { reason: String::from("arclength budget must be positive") });
    }
    if !(h > 0.0) || !h.is_finite() || !start.point.x.is_finite() || !start.point.y.is_finite() || !start.angle.is_finite() {
        return Err(ExpanderError::InvalidInput { reason: String::from("step and initial data must be finite") });
    }
    let steps = (length / h).ceil() as usize;
    let window = (1.0 / h).round().max(1.0) as usize;
    let mut points = Vec::with_capacity(steps.min(1 << 20) + 1);
    let mut angles = Vec::with_capacity(steps.min(1 << 20) + 1);
    let (mut p, mut th) = (start.point, start.angle);
    points.push(p);
    angles.push(th);
    let mut asymptote = None;
    for k in 0..steps {
        let (k1p, k1t) = rhs(p, th);
        let (k2p, k2t) = rhs(p + k1p * (0.5 * h), th + 0.5 * h * k1t);
        let (k3p, k3t) = rhs(p + k2p * (0.5 * h), th + 0.5 * h * k2t);
        let (k4p, k4t) = rhs(p + k3p * h, th + h * k3t);
        p += (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (h / 6.0);
        th += h / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t);
        let s = (k + 1) as f64 * h;
        if !p.x.is_finite() || !p.y.is_finite() || !th.is_finite() || k1t.abs() > KAPPA_LIMIT {
            return Err(ExpanderError::BlowUp { arclength: s });
        }
        points.push(p);
        angles.push(th);
        let n = angles.len();
        if asymptote.is_none() && n > window && p.norm() > options.detect_radius
            && (th - angles[n - 1 - window]).abs() < FREEZE_TOLERANCE {
                asymptote = Some(Asymptote { angle: th, arclength: s });
            }
        if p.norm() >= options.stop_radius {
            break;
        }
    }
    Ok(ShotCurve { points, angles, step: h, asymptote })
}
