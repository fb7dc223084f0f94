use alloc::string::String;
use alloc::vec::Vec;

use super::ExpanderError;
use crate::math::{wrap_angle, Vec2, PI, TAU};

/// One of the two closed regions bounded by a cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Side {
    /// The region labelled inside.
    W,
    /// The closure of its complement.
    WPrime,
}

impl Side {
    pub fn other(self) -> Self {
        match self {
            Side::W => Side::WPrime,
            Side::WPrime => Side::W,
        }
    }

    pub fn from_inside(inside: bool) -> Self {
        if inside {
            Side::W
        } else {
            Side::WPrime
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Side::W => "W",
            Side::WPrime => "W'",
        }
    }
}

/// A finite union of rays from the origin together with an alternating
/// labelling of the open sectors between consecutive rays.
///
/// Sector `i` spans counterclockwise from `ray_angles[i]` to
/// `ray_angles[i + 1]` (cyclically); `inside[i]` is true when it belongs to
/// `W`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlanarCone {
    ray_angles: Vec<f64>,
    inside: Vec<bool>,
}

impl PlanarCone {
    pub fn new(ray_angles: Vec<f64>, inside: Vec<bool>) -> Result<Self, ExpanderError> {
        let m = ray_angles.len();
        let invalid = |reason: &str| ExpanderError::InvalidCone { reason: String::from(reason) };
        if m < 2 {
            return Err(invalid("a cone needs at least two rays"));
        }
        if inside.len() != m {
            return Err(invalid("one label per sector is required"));
        }
        if !m.is_multiple_of(2) {
            return Err(invalid("labels alternate, so the number of rays must be even"));
        }
        if ray_angles.iter().any(|t| !t.is_finite() || *t < 0.0 || *t >= TAU) {
            return Err(invalid("ray angles must lie in [0, 2π)"));
        }
        if ray_angles.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("ray angles must be strictly increasing"));
        }
        if (0..m).any(|i| inside[i] == inside[(i + 1) % m]) {
            return Err(invalid("sector labels must alternate"));
        }
        Ok(Self { ray_angles, inside })
    }

    /// The cross `{xy = 0}` with `W` the first and third quadrants.
    pub fn cross() -> Self {
        Self::new(alloc::vec![0.0, 0.5 * PI, PI, 1.5 * PI], alloc::vec![true, false, true, false])
            .expect("cross cone is valid")
    }

    /// The line through the origin at angle `angle`, `W` to its left.
    pub fn line(angle: f64) -> Self {
        Self::wedge(wrap_angle(angle + 0.5 * PI), PI)
    }

    /// A wedge `W` of the given opening, symmetric about `bisector`.
    pub fn wedge(bisector: f64, opening: f64) -> Self {
        let a = wrap_angle(bisector - 0.5 * opening);
        let b = wrap_angle(bisector + 0.5 * opening);
        if a < b {
            Self::new(alloc::vec![a, b], alloc::vec![true, false]).expect("valid wedge")
        } else {
            Self::new(alloc::vec![b, a], alloc::vec![false, true]).expect("valid wedge")
        }
    }

    pub fn ray_angles(&self) -> &[f64] {
        &self.ray_angles
    }

    pub fn inside(&self) -> &[bool] {
        &self.inside
    }

    pub fn ray_count(&self) -> usize {
        self.ray_angles.len()
    }

    /// Counterclockwise opening of sector `i`.
    pub fn sector_opening(&self, i: usize) -> f64 {
        let m = self.ray_count();
        let next = self.ray_angles[(i + 1) % m];
        let open = wrap_angle(next - self.ray_angles[i]);
        if m == 2 && open == 0.0 {
            TAU
        } else {
            open
        }
    }

    pub fn sector_side(&self, i: usize) -> Side {
        Side::from_inside(self.inside[i])
    }

    /// Index of the sector containing direction `theta`.
    pub fn sector_of_angle(&self, theta: f64) -> usize {
        let t = wrap_angle(theta);
        let m = self.ray_count();
        for i in 0..m {
            let start = self.ray_angles[i];
            if wrap_angle(t - start) < self.sector_opening(i) {
                return i;
            }
        }
        m - 1
    }

    pub fn contains(&self, p: Vec2) -> bool {
        if p == Vec2::ZERO {
            return true;
        }
        self.inside[self.sector_of_angle(p.angle())]
    }

    /// Distance to the union of rays.
    pub fn distance(&self, p: Vec2) -> f64 {
        let mut best = p.norm();
        for &a in &self.ray_angles {
            let d = Vec2::from_angle(a);
            let t = p.dot(d);
            if t > 0.0 {
                best = best.min(p.cross(d).abs());
            }
        }
        best
    }

    /// Signed distance, negative inside `W`.
    pub fn signed_distance(&self, p: Vec2) -> f64 {
        let d = self.distance(p);
        if self.contains(p) {
            -d
        } else {
            d
        }
    }

    /// Rotates the ray through ray `i` by `s·weights[i]` away from `side`
    /// (the outward normal of the link), so the region `side` grows.
    pub fn perturbed_outward(&self, side: Side, weights: &[f64], s: f64) -> Result<Self, ExpanderError> {
        let m = self.ray_count();
        if weights.len() != m {
            return Err(ExpanderError::InvalidCone { reason: String::from("one weight per ray is required") });
        }
        let mut rays: Vec<(f64, bool)> = Vec::with_capacity(m);
        for i in 0..m {
            // Sector i lies counterclockwise of ray i.
            let ccw_is_side = self.sector_side(i) == side;
            let dir = if ccw_is_side { -1.0 } else { 1.0 };
            rays.push((self.ray_angles[i] + dir * s * weights[i], self.inside[i]));
        }
        Self::from_labelled_rays(rays)
    }

    /// Rigid rotation by `s`.
    pub fn rotated(&self, s: f64) -> Result<Self, ExpanderError> {
        let rays = (0..self.ray_count()).map(|i| (self.ray_angles[i] + s, self.inside[i])).collect();
        Self::from_labelled_rays(rays)
    }

    fn from_labelled_rays(mut rays: Vec<(f64, bool)>) -> Result<Self, ExpanderError> {
        for r in rays.iter_mut() {
            r.0 = wrap_angle(r.0);
        }
        rays.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
        Self::new(rays.iter().map(|r| r.0).collect(), rays.iter().map(|r| r.1).collect())
    }
}
