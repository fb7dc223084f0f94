use alloc::vec::Vec;

use super::{ExpanderError, Side, BISECTION_ITERATIONS, DEFAULT_STEP, R_MAX};
use crate::geometry::{circumcircle_curvature, hausdorff, CurveSet, DiscreteCurve, Orientation};
use crate::math::{Real, Vec2, PI};

/// Profile curves in the `(r, z)` half plane of a rotationally symmetric
/// expander asymptotic to the double cone `r = a|z|`.
///
/// `Side::W` (the two-sheeted region `|z| > r/a`) gives two caps crossing
/// the axis, with normals into `W`. `Side::WPrime` gives one connected neck
/// through the plane `z = 0`, with normal into `W'`, on the branch with the
/// wider waist. Necks only exist for flat enough cones; otherwise the caps
/// are returned with normals into `W'`.
#[derive(Clone, Debug)]
pub struct RotSymmetricExpander {
    pub slope: f64,
    pub side: Side,
    pub topology: ProfileTopology,
    pub profiles: Vec<DiscreteCurve>,
    /// Shooting parameter: axis height of the cap or waist radius of the neck.
    pub parameter: f64,
    /// `z/r` of the asymptotic ray.
    pub asymptotic_slope: f64,
    /// Largest `|κ + sin θ/r − (x·ν)/2|` over profile nodes off the axis.
    pub max_residual: f64,
}

impl RotSymmetricExpander {
    pub fn curve_set(&self) -> CurveSet {
        CurveSet::from_curves(self.profiles.iter())
    }

    /// Hausdorff distance between two profile sets.
    pub fn gap(&self, other: &Self) -> f64 {
        hausdorff(&self.curve_set(), &other.curve_set())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ProfileTopology {
    Caps,
    Neck,
}

#[inline]
fn rhs(p: Vec2, theta: f64) -> (Vec2, f64) {
    let (s, c) = (theta.sin(), theta.cos());
    (Vec2::new(c, s), 0.5 * (p.y * c - p.x * s) - s / p.x)
}

struct Profile {
    points: Vec<Vec2>,
    angles: Vec<f64>,
}

fn integrate(mut p: Vec2, mut th: f64, s0: f64, h: f64, stop: f64) -> Result<Profile, ExpanderError> {
    let mut points = alloc::vec![p];
    let mut angles = alloc::vec![th];
    let steps = ((4.0 * stop + 10.0) / h) as usize;
    for k in 0..steps {
        let (k1p, k1t) = rhs(p, th);
        let (k2p, k2t) = rhs(p + k1p * (0.5 * h), th + 0.5 * h * k1t);
        let (k3p, k3t) = rhs(p + k2p * (0.5 * h), th + 0.5 * h * k2t);
        let (k4p, k4t) = rhs(p + k3p * h, th + h * k3t);
        p += (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (h / 6.0);
        th += h / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t);
        let s = s0 + (k + 1) as f64 * h;
        if !(p.x > 0.0) || !p.y.is_finite() || !th.is_finite() {
            return Err(ExpanderError::AxisCrossing { r: p.x, z: p.y, arclength: s });
        }
        points.push(p);
        angles.push(th);
        if p.norm() >= stop {
            break;
        }
    }
    Ok(Profile { points, angles })
}

/// Cap leaving the axis at height `z0` with horizontal tangent. The first
/// step uses the series `θ ≈ z0 s / 4` since `sin θ / r` is singular there.
fn cap(z0: f64, h: f64, stop: f64) -> Result<Profile, ExpanderError> {
    let k0 = 0.25 * z0;
    let p = Vec2::new(h - k0 * k0 * h * h * h / 6.0, z0 + 0.5 * k0 * h * h);
    let mut prof = integrate(p, k0 * h, h, h, stop)?;
    prof.points.insert(0, Vec2::new(0.0, z0));
    prof.angles.insert(0, 0.0);
    Ok(prof)
}

/// Upper half of a neck with waist radius `r0`.
fn neck(r0: f64, h: f64, stop: f64) -> Result<Profile, ExpanderError> {
    integrate(Vec2::new(r0, 0.0), 0.5 * PI, 0.0, h, stop)
}

fn bisect(
    shoot: impl Fn(f64) -> Result<Profile, ExpanderError>,
    target: f64,
    range: (f64, f64),
    increasing: bool,
) -> Result<f64, ExpanderError> {
    let g = |x: f64| -> Result<f64, ExpanderError> {
        let p = shoot(x)?;
        let v = p.angles.last().copied().unwrap_or(0.0) - target;
        Ok(if increasing { v } else { -v })
    };
    let (mut lo, mut hi) = range;
    let (glo, ghi) = (g(lo)?, g(hi)?);
    if glo > 0.0 || ghi < 0.0 {
        let sgn = if increasing { 1.0 } else { -1.0 };
        let (a, b) = (sgn * glo + target, sgn * ghi + target);
        return Err(ExpanderError::BracketFailed { target, achieved_min: a.min(b), achieved_max: a.max(b) });
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
    Ok(0.5 * (lo + hi))
}

/// Waist of the neck on the outer branch, if the neck shooting reaches
/// the cone angle `beta`.
fn outer_neck(beta: f64, h: f64, stop: f64) -> Result<Option<f64>, ExpanderError> {
    let angle = |r: f64| -> Result<f64, ExpanderError> { Ok(*neck(r, h, stop)?.angles.last().unwrap_or(&0.0)) };
    // The asymptotic angle rises from zero as the waist shrinks from large
    // radii, peaks, then falls again; scan inward from the outside.
    let (r_far, r_near, samples) = (20.0f64, 0.05f64, 48);
    let ratio = (r_near / r_far).powf(1.0 / samples as f64);
    let mut prev = r_far;
    if angle(prev)? >= beta {
        return Ok(None);
    }
    for k in 1..=samples {
        let r = r_far * ratio.powi(k);
        if angle(r)? >= beta {
            return bisect(|x| neck(x, h, stop), beta, (r, prev), false).map(Some);
        }
        prev = r;
    }
    Ok(None)
}

fn surface_residual(points: &[Vec2], orientation: Orientation) -> f64 {
    let sign = orientation.sign();
    let mut worst: f64 = 0.0;
    for w in points.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        if b.x < 1e-6 {
            continue;
        }
        let t = (c - a).normalized();
        let nu = t.perp() * sign;
        let kappa = sign * circumcircle_curvature(a, b, c);
        // sin θ for the left normal is -ν_r; signs follow the normal.
        let h_surf = kappa - nu.x / b.x;
        worst = worst.max((h_surf - 0.5 * b.dot(nu)).abs());
    }
    worst
}

/// Shoots a rotationally symmetric expander profile for the cone of slope
/// `a` (`r = a|z|`).
pub fn rot_symmetric_profile_expander(a: f64, side: Side) -> Result<RotSymmetricExpander, ExpanderError> {
    rot_symmetric_profile_expander_with(a, side, DEFAULT_STEP, R_MAX)
}

pub fn rot_symmetric_profile_expander_with(
    a: f64,
    side: Side,
    h: f64,
    stop: f64,
) -> Result<RotSymmetricExpander, ExpanderError> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(ExpanderError::InvalidInput { reason: "cone slope must be positive".into() });
    }
    let beta = (1.0 / a).atan();
    let waist = match side {
        Side::W => None,
        Side::WPrime => outer_neck(beta, h, stop)?,
    };
    let (topology, parameter, upper, profiles) = match waist {
        None => {
            let z0 = bisect(|z| cap(z, h, stop), beta, (0.0, 20.0), true)?;
            let up = cap(z0, h, stop)?;
            let o = if side == Side::W { Orientation::Positive } else { Orientation::Negative };
            let upper = DiscreteCurve::new(up.points.clone(), false, o)?;
            let lower_pts: Vec<Vec2> = up.points.iter().map(|p| Vec2::new(p.x, -p.y)).collect();
            let lower = DiscreteCurve::new(lower_pts, false, o.flipped())?;
            (ProfileTopology::Caps, z0, up, alloc::vec![upper, lower])
        }
        Some(r0) => {
            let up = neck(r0, h, stop)?;
            let mut pts: Vec<Vec2> = up.points.iter().skip(1).rev().map(|p| Vec2::new(p.x, -p.y)).collect();
            pts.extend_from_slice(&up.points);
            let full = DiscreteCurve::new(pts, false, Orientation::Negative)?;
            (ProfileTopology::Neck, r0, up, alloc::vec![full])
        }
    };
    let theta_inf = *upper.angles.last().expect("nonempty profile");
    if (theta_inf - beta).abs() > 1e-5 {
        return Err(ExpanderError::AsymptoteMissed { error: (theta_inf - beta).abs(), tolerance: 1e-5 });
    }
    let max_residual = profiles
        .iter()
        .map(|c| surface_residual(c.nodes(), c.orientation()))
        .fold(0.0, f64::max);
    Ok(RotSymmetricExpander {
        slope: a,
        side,
        topology,
        profiles,
        parameter,
        asymptotic_slope: theta_inf.tan(),
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caps_match_slope_and_are_disjoint() {
        let e = rot_symmetric_profile_expander(1.0, Side::W).unwrap();
        assert_eq!(e.topology, ProfileTopology::Caps);
        assert_eq!(e.profiles.len(), 2);
        assert!((e.asymptotic_slope - 1.0).abs() < 1e-5);
        assert!(e.max_residual < 1e-2, "{}", e.max_residual);
        let (up, down) = (&e.profiles[0], &e.profiles[1]);
        assert!(up.nodes().iter().all(|p| p.y > 0.0));
        assert!(down.nodes().iter().all(|p| p.y < 0.0));
    }

    #[test]
    fn flat_cone_profile_is_nearly_horizontal() {
        let e = rot_symmetric_profile_expander(1e3, Side::W).unwrap();
        let top = e.profiles[0].nodes().iter().filter(|p| p.x < 5.0).map(|p| p.y.abs()).fold(0.0, f64::max);
        assert!(e.parameter < 5e-3 && top < 1e-2, "{} {}", e.parameter, top);
        assert!(e.max_residual < 1e-2);
    }

    #[test]
    fn neck_exists_only_for_flat_cones() {
        let wide = rot_symmetric_profile_expander(1.0, Side::WPrime).unwrap();
        assert_eq!(wide.topology, ProfileTopology::Caps);
        let caps = rot_symmetric_profile_expander(1.0, Side::W).unwrap();
        assert!(wide.gap(&caps) < 1e-12);
        let flat = rot_symmetric_profile_expander(4.0, Side::WPrime).unwrap();
        assert_eq!(flat.topology, ProfileTopology::Neck);
        assert!((flat.asymptotic_slope - 0.25).abs() < 1e-5);
        assert!(flat.max_residual < 1e-2, "{}", flat.max_residual);
    }

    #[test]
    fn nonpositive_slope_rejected() {
        assert!(rot_symmetric_profile_expander(0.0, Side::W).is_err());
    }
}
