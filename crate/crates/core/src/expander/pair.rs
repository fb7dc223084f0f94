use alloc::vec::Vec;

use super::shoot::{shoot_expander, ShootOptions, ShootStart, ShotCurve};
use super::{ExpanderError, Side, ANGLE_TOLERANCE, BISECTION_ITERATIONS, DEFAULT_STEP, R_MAX};
use crate::geometry::{max_expander_residual, DiscreteCurve, Orientation};
use crate::math::{wrap_angle, wrap_signed, Real, Vec2, PI};

/// Samples of the decay record start at this radius.
const DECAY_R0: f64 = 1.0;
/// The decay record stops once `σ ≤ DECAY_FLOOR·r`.
const DECAY_FLOOR: f64 = 1e-11;

/// An expander curve asymptotic to two rays.
#[derive(Clone, Debug)]
pub struct ExpanderCurve {
    pub curve: DiscreteCurve,
    /// Directions of the two asymptotic rays, in traversal order.
    pub asymptotic_angles: (f64, f64),
    /// The region the normal points into at time one.
    pub side: Side,
    /// `(r, r·σ(r))` with `σ` the distance to the nearer asymptotic ray.
    /// Stops once `σ` drops to rounding level.
    pub decay_record: Vec<(f64, f64)>,
    /// Index of the node closest to the origin.
    pub vertex: usize,
    /// Distance from the origin to the vertex (zero for lines).
    pub vertex_distance: f64,
    /// Arclength step between nodes.
    pub step: f64,
}

impl ExpanderCurve {
    pub fn max_residual(&self) -> f64 {
        max_expander_residual(&self.curve)
    }

    pub fn is_line(&self) -> bool {
        self.vertex_distance == 0.0
    }

    /// Whether `r·σ(r)` decreases across the last decade of recorded radii.
    pub fn decay_is_decreasing(&self) -> bool {
        let rec = &self.decay_record;
        let Some(&(r_last, _)) = rec.last() else { return true };
        let tail: Vec<f64> = rec.iter().filter(|(r, _)| *r >= 0.1 * r_last).map(|p| p.1).collect();
        tail.windows(2).all(|w| w[1] <= w[0])
    }

    /// Nodes `lo..=hi` as a new expander curve; the vertex index is shifted
    /// accordingly and the decay record is kept.
    pub fn cropped(&self, lo: usize, hi: usize) -> Result<Self, ExpanderError> {
        if lo > self.vertex || hi < self.vertex || hi >= self.curve.len() {
            return Err(ExpanderError::InvalidInput { reason: "crop range must contain the vertex".into() });
        }
        let nodes = self.curve.nodes()[lo..=hi].to_vec();
        let curve = DiscreteCurve::new(nodes, false, self.curve.orientation())?;
        Ok(Self { curve, vertex: self.vertex - lo, ..self.clone() })
    }

    pub fn with_side(&self, side: Side) -> Self {
        if side == self.side {
            return self.clone();
        }
        let mut out = self.clone();
        out.curve = self.curve.with_orientation(self.curve.orientation().flipped());
        out.side = side;
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairOptions {
    pub step: f64,
    pub max_radius: f64,
}

impl Default for PairOptions {
    fn default() -> Self {
        Self { step: DEFAULT_STEP, max_radius: R_MAX }
    }
}

/// Solves for the expander asymptotic to the rays at `theta1` and `theta2`
/// with the default step and truncation radius.
///
/// The sector swept counterclockwise from `theta1` to `theta2` lies on the
/// side of the curve its normal points into, and belongs to `side`. The
/// curve itself sits in whichever of the two sectors has opening below π.
pub fn solve_expander_for_ray_pair(theta1: f64, theta2: f64, side: Side) -> Result<ExpanderCurve, ExpanderError> {
    solve_expander_for_ray_pair_with(theta1, theta2, side, PairOptions::default())
}

pub fn solve_expander_for_ray_pair_with(
    theta1: f64,
    theta2: f64,
    side: Side,
    options: PairOptions,
) -> Result<ExpanderCurve, ExpanderError> {
    let ccw = wrap_angle(theta2 - theta1);
    if !theta1.is_finite() || !theta2.is_finite() || ccw == 0.0 {
        return Err(ExpanderError::InvalidInput { reason: "rays must be distinct".into() });
    }
    let h = options.step;
    if (ccw - PI).abs() <= 1e-14 {
        return Ok(line(theta1, side, options));
    }
    // The curve lives in the sector of opening below π.
    let (opening, bisector, away) = if ccw < PI {
        (ccw, theta1 + 0.5 * ccw, true)
    } else {
        (2.0 * PI - ccw, theta2 + 0.5 * (2.0 * PI - ccw), false)
    };
    let target = 0.5 * (PI - opening);
    let shoot_opts = ShootOptions { step: h, stop_radius: options.max_radius, ..ShootOptions::default() };
    let budget = 4.0 * options.max_radius + 10.0;
    let shoot = |d: f64| shoot_expander(ShootStart::new(Vec2::new(0.0, d), 0.0), budget, shoot_opts);
    let g = |d: f64| -> Result<f64, ExpanderError> { Ok(shoot(d)?.final_angle() - target) };

    // Upper end of the shooting interval: the asymptotic angle increases
    // with the vertex height towards π/2.
    let mut d_hi = 1.0;
    let mut achieved_max = g(d_hi)? + target;
    while achieved_max < target {
        d_hi *= 2.0;
        if d_hi > 64.0 {
            return Err(ExpanderError::BracketFailed { target, achieved_min: 0.0, achieved_max });
        }
        achieved_max = g(d_hi)? + target;
    }
    // Coarse sweep from the side the normal points into, then bisect.
    let coarse = 32;
    let mut lo = 0.0;
    let mut hi = d_hi;
    if away {
        let mut prev = d_hi;
        for k in (0..coarse).rev() {
            let d = d_hi * k as f64 / coarse as f64;
            if g(d)? <= 0.0 {
                lo = d;
                hi = prev;
                break;
            }
            prev = d;
        }
    } else {
        let mut prev = 0.0;
        for k in 1..=coarse {
            let d = d_hi * k as f64 / coarse as f64;
            if g(d)? >= 0.0 {
                lo = prev;
                hi = d;
                break;
            }
            prev = d;
        }
    }
    for _ in 0..BISECTION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let d = 0.5 * (lo + hi);
    let shot = shoot(d)?;
    let miss = (shot.final_angle() - target).abs();
    if miss > ANGLE_TOLERANCE {
        return Err(ExpanderError::AsymptoteMissed { error: miss, tolerance: ANGLE_TOLERANCE });
    }
    assemble(&shot, d, bisector, opening, away, side)
}

fn line(theta: f64, side: Side, options: PairOptions) -> ExpanderCurve {
    let h = options.step;
    let n = (options.max_radius / h).round() as i64;
    let dir = Vec2::from_angle(theta);
    let nodes: Vec<Vec2> = (-n..=n).map(|k| dir * (k as f64 * h)).collect();
    let curve = DiscreteCurve::new(nodes, false, Orientation::Positive).expect("line nodes are distinct");
    ExpanderCurve {
        curve,
        asymptotic_angles: (wrap_angle(theta + PI), wrap_angle(theta)),
        side,
        decay_record: Vec::new(),
        vertex: n as usize,
        vertex_distance: 0.0,
        step: h,
    }
}

/// Mirrors the right branch across the bisector and rotates into place.
fn assemble(
    shot: &ShotCurve,
    d: f64,
    bisector: f64,
    opening: f64,
    away: bool,
    side: Side,
) -> Result<ExpanderCurve, ExpanderError> {
    let right = &shot.points;
    let n = right.len();
    let mut local = Vec::with_capacity(2 * n - 1);
    for p in right.iter().rev() {
        local.push(Vec2::new(-p.x, p.y));
    }
    local.pop();
    local.extend_from_slice(right);
    let rot = bisector - 0.5 * PI;
    let nodes: Vec<Vec2> = local.iter().map(|p| p.rotate(rot)).collect();
    let orientation = if away { Orientation::Positive } else { Orientation::Negative };
    let curve = DiscreteCurve::new(nodes, false, orientation)?;
    let theta_inf = shot.final_angle();
    let first = wrap_angle(bisector + 0.5 * opening);
    let second = wrap_angle(bisector - 0.5 * opening);
    debug_assert!(wrap_signed(rot + theta_inf - second).abs() < 1e-5);

    // Decay record along the right branch, measured in the local frame.
    let ray = Vec2::from_angle(theta_inf);
    // Rounding in θ∞ puts a floor of order 1e-13·r under σ; stop well above it.
    let floor = DECAY_FLOOR;
    let mut decay = Vec::new();
    let mut next_r = DECAY_R0;
    for p in right {
        let r = p.norm();
        if r < next_r {
            continue;
        }
        let sigma = p.cross(ray).abs();
        if sigma <= floor * r {
            break;
        }
        decay.push((r, r * sigma));
        next_r = r + 0.25;
    }
    Ok(ExpanderCurve {
        curve,
        asymptotic_angles: (first, second),
        side,
        decay_record: decay,
        vertex: n - 1,
        vertex_distance: d,
        step: shot.step,
    })
}
