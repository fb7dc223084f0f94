use alloc::vec::Vec;

use super::outermost::outermost_expanders_with;
use super::pair::{ExpanderCurve, PairOptions};
use super::{ExpanderError, PlanarCone, Side, R_MAX};
use crate::geometry::{local_hausdorff, CurveSet};
use crate::math::{wrap_signed, Vec2};

/// How the cone is moved along the family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FamilyKind {
    /// Ray `i` rotates by `s·ψ_i` away from the chosen side.
    Outward,
    /// The whole cone rotates counterclockwise by `s`.
    Rotation,
}

/// Outermost expanders of a one-parameter family of cones.
///
/// `members[k][c]` is component `c` at parameter `params[k]`; components are
/// matched to the base by their asymptotic rays.
#[derive(Clone, Debug)]
pub struct ExpanderFamily {
    pub kind: FamilyKind,
    /// The unperturbed cone.
    pub cone: PlanarCone,
    pub side: Side,
    pub weights: Vec<f64>,
    pub params: Vec<f64>,
    pub members: Vec<Vec<ExpanderCurve>>,
    pub base: Vec<ExpanderCurve>,
}

impl ExpanderFamily {
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Angular speed `dθ/ds` of the ray at `angle` along the family, or
    /// `None` if no ray of the base cone points there.
    pub fn ray_rate(&self, angle: f64) -> Option<f64> {
        let i = self
            .cone
            .ray_angles()
            .iter()
            .position(|&a| wrap_signed(a - angle).abs() < 1e-6)?;
        Some(match self.kind {
            FamilyKind::Rotation => 1.0,
            FamilyKind::Outward => {
                let dir = if self.cone.sector_side(i) == self.side { -1.0 } else { 1.0 };
                dir * self.weights[i]
            }
        })
    }

    /// Component `component` of every member, in parameter order.
    pub fn component(&self, component: usize) -> Vec<&ExpanderCurve> {
        self.members.iter().map(|m| &m[component]).collect()
    }

    /// Hausdorff distances between consecutive members within `B_radius`.
    pub fn consecutive_hausdorff(&self, radius: f64) -> Vec<f64> {
        let sets: Vec<CurveSet> =
            self.members.iter().map(|m| CurveSet::from_curves(m.iter().map(|e| &e.curve))).collect();
        sets.windows(2).map(|w| local_hausdorff(&w[0], &w[1], Vec2::ZERO, radius)).collect()
    }

    /// Hausdorff distance of each member to the base within `B_radius`.
    pub fn distance_to_base(&self, radius: f64) -> Vec<f64> {
        let base = CurveSet::from_curves(self.base.iter().map(|e| &e.curve));
        self.members
            .iter()
            .map(|m| local_hausdorff(&CurveSet::from_curves(m.iter().map(|e| &e.curve)), &base, Vec2::ZERO, radius))
            .collect()
    }
}

fn linspace(range: (f64, f64), count: usize) -> Vec<f64> {
    if count == 1 {
        return alloc::vec![range.0];
    }
    (0..count)
        .map(|k| {
            let t = k as f64 / (count - 1) as f64;
            let s = range.0 + (range.1 - range.0) * t;
            if s.abs() < 1e-15 * (range.1 - range.0).abs() {
                0.0
            } else {
                s
            }
        })
        .collect()
}

fn match_components(base: &[ExpanderCurve], member: Vec<ExpanderCurve>) -> Result<Vec<ExpanderCurve>, ExpanderError> {
    if member.len() != base.len() {
        return Err(ExpanderError::TopologyChanged);
    }
    let dist = |a: &ExpanderCurve, b: &ExpanderCurve| {
        wrap_signed(a.asymptotic_angles.0 - b.asymptotic_angles.0).abs()
            + wrap_signed(a.asymptotic_angles.1 - b.asymptotic_angles.1).abs()
    };
    let mut out = Vec::with_capacity(base.len());
    let mut used = alloc::vec![false; member.len()];
    for b in base {
        let (k, _) = member
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, m)| (k, dist(b, m)))
            .fold((usize::MAX, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        if k == usize::MAX || dist(b, &member[k]) > 0.5 {
            return Err(ExpanderError::TopologyChanged);
        }
        used[k] = true;
        out.push(member[k].clone());
    }
    Ok(out)
}

/// Signed offset along the normal line of `base` at node `i` to `other`,
/// searching segments near the corresponding index first.
pub(crate) fn normal_offset(base: &ExpanderCurve, i: usize, other: &ExpanderCurve) -> Option<f64> {
    let x = base.curve.node(i);
    let nu = base.curve.normal(i);
    let nodes = other.curve.nodes();
    let guess = (i as i64 - base.vertex as i64 + other.vertex as i64).clamp(0, nodes.len() as i64 - 1) as usize;
    let try_range = |lo: usize, hi: usize| -> Option<f64> {
        let mut best: Option<f64> = None;
        for k in lo..hi {
            let (p, q) = (nodes[k], nodes[k + 1]);
            let e = q - p;
            let denom = nu.cross(e);
            if denom == 0.0 {
                continue;
            }
            let t = (p - x).cross(e) / denom;
            let lam = (p - x).cross(nu) / denom;
            if (-1e-12..=1.0 + 1e-12).contains(&lam) && best.is_none_or(|b: f64| t.abs() < b.abs()) {
                best = Some(t);
            }
        }
        best
    };
    let w = 400;
    let lo = guess.saturating_sub(w);
    let hi = (guess + w).min(nodes.len() - 1);
    try_range(lo, hi).or_else(|| try_range(0, nodes.len() - 1))
}

/// Every member must lie strictly on the far side of the previous one, as
/// seen from the region `side`.
fn check_ordering(family: &ExpanderFamily) -> Result<(), ExpanderError> {
    for c in 0..family.base.len() {
        let base = &family.base[c];
        let n = base.curve.len();
        for k in 0..family.len().saturating_sub(1) {
            let (lo, hi) = (&family.members[k][c], &family.members[k + 1][c]);
            for i in (0..n).step_by(4) {
                if base.curve.node(i).norm() > 0.5 * R_MAX {
                    continue;
                }
                let (Some(a), Some(b)) = (normal_offset(base, i, lo), normal_offset(base, i, hi)) else {
                    continue;
                };
                if !(b < a) {
                    return Err(ExpanderError::OrderingViolated {
                        lower: family.params[k],
                        upper: family.params[k + 1],
                        node: i,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Outermost expanders for the cones obtained by rotating each ray away
/// from `side` by `s·ψ_i`, for `count` equally spaced `s` in `s_range`.
pub fn expander_family(
    cone: &PlanarCone,
    side: Side,
    weights: &[f64],
    s_range: (f64, f64),
    count: usize,
    options: PairOptions,
) -> Result<ExpanderFamily, ExpanderError> {
    if weights.len() != cone.ray_count() {
        return Err(ExpanderError::InvalidCone { reason: "one weight per ray is required".into() });
    }
    if let Some((ray, &weight)) = weights.iter().enumerate().find(|(_, w)| !(**w > 0.0)) {
        return Err(ExpanderError::NonPositiveWeight { ray, weight });
    }
    build(cone, side, weights, s_range, count, options, FamilyKind::Outward)
}

/// Outermost expanders of the rigidly rotated cones.
pub fn rotation_family(
    cone: &PlanarCone,
    side: Side,
    s_range: (f64, f64),
    count: usize,
    options: PairOptions,
) -> Result<ExpanderFamily, ExpanderError> {
    build(cone, side, &alloc::vec![1.0; cone.ray_count()], s_range, count, options, FamilyKind::Rotation)
}

fn build(
    cone: &PlanarCone,
    side: Side,
    weights: &[f64],
    s_range: (f64, f64),
    count: usize,
    options: PairOptions,
    kind: FamilyKind,
) -> Result<ExpanderFamily, ExpanderError> {
    if count < 2 || !(s_range.1 > s_range.0) {
        return Err(ExpanderError::InvalidInput { reason: "a family needs two or more increasing parameters".into() });
    }
    let base = outermost_expanders_with(cone, options)?.curves(side).to_vec();
    let params = linspace(s_range, count);
    let mut members = Vec::with_capacity(count);
    for &s in &params {
        let cs = match kind {
            FamilyKind::Outward => cone.perturbed_outward(side, weights, s)?,
            FamilyKind::Rotation => cone.rotated(s)?,
        };
        let m = if s == 0.0 { base.clone() } else { outermost_expanders_with(&cs, options)?.curves(side).to_vec() };
        members.push(match_components(&base, m)?);
    }
    let fam = ExpanderFamily { kind, cone: cone.clone(), side, weights: weights.to_vec(), params, members, base };
    if kind == FamilyKind::Outward {
        check_ordering(&fam)?;
    }
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_rotation_family_is_lines_at_angle_s() {
        let fam = rotation_family(&PlanarCone::line(0.0), Side::W, (-0.02, 0.02), 5, PairOptions::default()).unwrap();
        for (s, m) in fam.params.iter().zip(&fam.members) {
            let e = &m[0];
            assert!(e.is_line());
            let p = e.curve.node(e.curve.len() - 1);
            assert!(wrap_signed(p.angle() - s).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_weight_rejected() {
        let r = expander_family(&PlanarCone::cross(), Side::W, &[1.0, 0.0, 1.0, 1.0], (0.0, 0.01), 3, PairOptions::default());
        assert!(matches!(r, Err(ExpanderError::NonPositiveWeight { ray: 1, .. })));
    }

    #[test]
    fn cross_family_is_ordered_and_lipschitz() {
        let fam = expander_family(&PlanarCone::cross(), Side::W, &[1.0; 4], (0.0, 0.05), 6, PairOptions::default()).unwrap();
        let d = fam.consecutive_hausdorff(8.0);
        let spacing = 0.01;
        for x in &d {
            assert!(*x > 0.0 && *x < 20.0 * spacing, "{d:?}");
        }
        let to_base = fam.distance_to_base(8.0);
        for (s, x) in fam.params.iter().zip(&to_base).skip(1) {
            assert!(*x / s < 20.0);
        }
    }
}
