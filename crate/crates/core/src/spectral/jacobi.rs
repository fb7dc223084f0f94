use alloc::vec::Vec;

use super::SpectralError;
use crate::expander::{ExpanderCurve, ExpanderFamily, FamilyKind};
use crate::geometry::{differentiate, second_derivative, DiscreteCurve};
use crate::math::{max_of, Real, Vec2};

/// Nodes at each open end excluded from the residual audit, where the
/// stencils are one-sided.
const END_NODES: usize = 2;

/// Normal speed of an expander family at `s = 0`.
#[derive(Clone, Debug)]
pub struct JacobiFieldResult {
    /// The base expander, cropped to the nodes every member covers.
    pub sigma: ExpanderCurve,
    pub v: Vec<f64>,
    /// `L v` per node (zero at the excluded end nodes).
    pub residual: Vec<f64>,
    pub max_residual: f64,
    /// `10 h² max|x|`.
    pub tolerance: f64,
    /// `(r, w)` with `w = v − r·(ψ∘π)` the deviation from the cone's
    /// linear normal speed.
    pub w_samples: Vec<(f64, f64)>,
    /// `max r|w|` over samples with `r ≥ 1`.
    pub rw_max: f64,
    /// Whether `r|w|` over the outer half of the range stays below its
    /// maximum over the inner half.
    pub rw_bounded: bool,
    pub min_v: f64,
    pub positive: bool,
    pub delta: f64,
    pub richardson: bool,
}

impl JacobiFieldResult {
    pub fn curve(&self) -> &DiscreteCurve {
        &self.sigma.curve
    }

    pub fn residual_ok(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

/// `L v = v'' + (x·T/2) v' − v/2 + κ² v` at every node of `curve`, using
/// the nonuniform three-point stencils of the geometry module.
pub fn jacobi_apply(curve: &DiscreteCurve, v: &[f64]) -> Vec<f64> {
    let d1 = differentiate(curve, v);
    let d2 = second_derivative(curve, v);
    (0..v.len())
        .map(|i| {
            let g = curve.geometry()[i];
            let xt = curve.node(i).dot(g.tangent);
            d2[i] + 0.5 * xt * d1[i] - 0.5 * v[i] + g.curvature * g.curvature * v[i]
        })
        .collect()
}

/// Differentiates the family in `s` at corresponding arclength nodes and
/// takes the normal component. Members are shot with the same step from
/// their vertices, so node `k` of every member sits at arclength `k·h`
/// from its vertex.
///
/// Outward families move away from the region the normal points into, so
/// their field is reported as `−∂_s x · ν`, which is positive; rotation
/// families use `∂_s x · ν`.
pub fn jacobi_field_from_family(family: &ExpanderFamily, component: usize) -> Result<JacobiFieldResult, SpectralError> {
    let n = family.len();
    if n < 3 {
        return Err(SpectralError::FamilyTooSmall { members: n });
    }
    if component >= family.base.len() {
        return Err(SpectralError::NotBracketing);
    }
    let k0 = family.params.iter().position(|&s| s == 0.0).ok_or(SpectralError::NotBracketing)?;
    if k0 == 0 || k0 + 1 >= n {
        return Err(SpectralError::NotBracketing);
    }
    let delta = family.params[k0 + 1];
    let sym = |k: usize| (family.params[k0 - k] + family.params[k0 + k]).abs() <= 1e-12 * delta;
    if !sym(1) {
        return Err(SpectralError::AsymmetricStencil);
    }
    let richardson = k0 >= 2
        && k0 + 2 < n
        && sym(2)
        && (family.params[k0 + 2] - 2.0 * delta).abs() <= 1e-12 * delta;

    let base = &family.members[k0][component];
    let used: Vec<&ExpanderCurve> = if richardson {
        (k0 - 2..=k0 + 2).map(|k| &family.members[k][component]).collect()
    } else {
        (k0 - 1..=k0 + 1).map(|k| &family.members[k][component]).collect()
    };
    if used.iter().any(|e| e.step != base.step) {
        return Err(SpectralError::NonGraphical);
    }
    let reach = used.iter().map(|e| e.vertex.min(e.curve.len() - 1 - e.vertex)).min().unwrap_or(0);
    if reach < 8 {
        return Err(SpectralError::NonGraphical);
    }
    let sigma = base
        .cropped(base.vertex - reach, base.vertex + reach)
        .map_err(|_| SpectralError::NonGraphical)?;
    let at = |e: &ExpanderCurve, j: usize| e.curve.node(e.vertex - reach + j);
    let sign = match family.kind {
        FamilyKind::Outward => -1.0,
        FamilyKind::Rotation => 1.0,
    };
    let m = 2 * reach + 1;
    let mut v = Vec::with_capacity(m);
    for j in 0..m {
        let d1: Vec2 = if richardson {
            (at(used[3], j) - at(used[1], j)) / (2.0 * delta)
        } else {
            (at(used[2], j) - at(used[0], j)) / (2.0 * delta)
        };
        let d = if richardson {
            let d2 = (at(used[4], j) - at(used[0], j)) / (4.0 * delta);
            (d1 * 4.0 - d2) / 3.0
        } else {
            d1
        };
        v.push(sign * d.dot(sigma.curve.normal(j)));
    }

    let curve = &sigma.curve;
    let mut residual = jacobi_apply(curve, &v);
    for i in 0..END_NODES.min(m) {
        residual[i] = 0.0;
        residual[m - 1 - i] = 0.0;
    }
    let max_residual = max_of(residual.iter().map(|x| x.abs()));
    let h = sigma.step;
    let rmax = max_of(curve.nodes().iter().map(|p| p.norm()));
    let tolerance = 10.0 * h * h * rmax;

    // Linear part predicted by the moving cone on each branch.
    let slope = |angle: f64, end: usize| -> f64 {
        let rate = family.ray_rate(angle).unwrap_or(0.0);
        sign * rate * Vec2::from_angle(angle).perp().dot(curve.normal(end))
    };
    let c_first = slope(sigma.asymptotic_angles.0, 0);
    let c_second = slope(sigma.asymptotic_angles.1, m - 1);
    let stride = ((0.25 / h).round() as usize).max(1);
    let mut w_samples = Vec::new();
    for j in (0..m).step_by(stride) {
        let r = curve.node(j).norm();
        let c = if j < sigma.vertex { c_first } else { c_second };
        w_samples.push((r, v[j] - r * c));
    }
    let rw: Vec<(f64, f64)> = w_samples.iter().filter(|(r, _)| *r >= 1.0).map(|(r, w)| (*r, r * w.abs())).collect();
    let rw_max = max_of(rw.iter().map(|x| x.1));
    let head = max_of(rw.iter().filter(|x| x.0 <= 0.5 * rmax).map(|x| x.1));
    let tail = max_of(rw.iter().filter(|x| x.0 > 0.5 * rmax).map(|x| x.1));
    let rw_bounded = rw.is_empty() || tail <= head.max(1e-6);
    let min_v = v.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(JacobiFieldResult {
        sigma,
        v,
        residual,
        max_residual,
        tolerance,
        w_samples,
        rw_max,
        rw_bounded,
        min_v,
        positive: min_v > 0.0,
        delta,
        richardson,
    })
}
