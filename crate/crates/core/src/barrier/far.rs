use alloc::vec::Vec;

use super::BarrierError;
use crate::geometry::{CurveSet, DiscreteCurve, GeometryError};
use crate::math::{Real, Vec2};

/// Relative time step of the central differences in `t`.
const TIME_STEP: f64 = 1e-4;

/// Residual of the offset curve `M(t) + s√t ν` at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FarSample {
    pub t: f64,
    /// Minimum of `v(∂_t x − 𝐇)·ν` over the audited nodes.
    pub min_residual: f64,
    pub at: Vec2,
    /// `∂_t(s√t) = s/(2√t)`.
    pub leading_term: f64,
    /// Largest `|A_M|²` over the audited nodes.
    pub max_curvature_sq: f64,
    /// Largest rescaled curvature `|x||A|/R` over the audited nodes.
    pub eta_measured: f64,
    pub audited: usize,
}

#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FarBarrierReport {
    pub s: f64,
    pub samples: Vec<FarSample>,
    /// First time where the residual is not positive, interpolated between
    /// samples.
    pub sign_flip_time: Option<f64>,
    pub passed: bool,
}

/// Audits the far barrier `Γ^+(t) = M(t) + s√t ν_M` of a flow given as a
/// function of time.
///
/// Nodes of `M(t)` inside `B_{√t·R}` are skipped (`exclusion_radius = R`).
/// If `eta` is given, every audited node must have `|x||A_M|/R ≤ η`;
/// with `R = 0` the curvature itself is measured. Slices must carry the
/// orientation whose normal the offset follows.
pub fn check_far_barrier(
    flow: &dyn Fn(f64) -> Result<DiscreteCurve, GeometryError>,
    times: &[f64],
    s: f64,
    exclusion_radius: f64,
    eta: Option<f64>,
) -> Result<FarBarrierReport, BarrierError> {
    if !(s > 0.0) {
        return Err(BarrierError::InvalidParameter { name: "s", value: s });
    }
    let offset = |t: f64| -> Result<DiscreteCurve, BarrierError> {
        let m = flow(t)?;
        let d = s * t.sqrt();
        Ok(m.map_points_indexed(|i, p| p + m.normal(i) * d)?)
    };
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        if !(t > 0.0) {
            return Err(BarrierError::InvalidParameter { name: "t", value: t });
        }
        let m = flow(t)?;
        let g = offset(t)?;
        let dt = TIME_STEP * t;
        let later = [offset(t + dt)?, offset(t + 2.0 * dt)?];
        let earlier = [offset(t - dt)?, offset(t - 2.0 * dt)?];
        let n = g.len();
        let ends = if g.is_closed() { 0 } else { 2 };
        let mut sample = FarSample {
            t,
            min_residual: f64::INFINITY,
            at: Vec2::ZERO,
            leading_term: s / (2.0 * t.sqrt()),
            max_curvature_sq: 0.0,
            eta_measured: 0.0,
            audited: 0,
        };
        for i in ends..n - ends {
            let x = m.node(i);
            if x.norm() < t.sqrt() * exclusion_radius {
                continue;
            }
            let k = m.curvature(i);
            let scale = if exclusion_radius > 0.0 { x.norm() / exclusion_radius } else { 1.0 };
            let eta_here = scale * k.abs();
            if let Some(limit) = eta {
                if eta_here > limit {
                    return Err(BarrierError::EtaViolated { t, point: x, measured: eta_here, eta: limit });
                }
            }
            let p = g.node(i);
            let nu = g.normal(i);
            // Offsets over ±2dt are bounded by the normal speed times 2dt.
            let reach = 100.0 * dt * (1.0 + k.abs() + s / t.sqrt());
            let hit = |c: &DiscreteCurve| near_offset(c, i, p, nu, reach);
            let (Some(a1), Some(b1), Some(a2), Some(b2)) = (hit(&later[0]), hit(&earlier[0]), hit(&later[1]), hit(&earlier[1]))
            else {
                continue;
            };
            let d1 = (a1 - b1) / (2.0 * dt);
            let d2 = (a2 - b2) / (4.0 * dt);
            let speed = (4.0 * d1 - d2) / 3.0;
            let v = 1.0 / nu.dot(m.normal(i));
            let residual = v * (speed - g.curvature(i));
            sample.audited += 1;
            sample.max_curvature_sq = sample.max_curvature_sq.max(k * k);
            sample.eta_measured = sample.eta_measured.max(eta_here);
            if residual < sample.min_residual {
                sample.min_residual = residual;
                sample.at = p;
            }
        }
        samples.push(sample);
    }
    let mut sign_flip_time = None;
    for (k, smp) in samples.iter().enumerate() {
        if smp.min_residual <= 0.0 {
            sign_flip_time = Some(if k == 0 {
                smp.t
            } else {
                let prev = &samples[k - 1];
                let w = prev.min_residual / (prev.min_residual - smp.min_residual);
                prev.t + w * (smp.t - prev.t)
            });
            break;
        }
    }
    let passed = sign_flip_time.is_none() && samples.iter().all(|s| s.audited > 0);
    Ok(FarBarrierReport { s, samples, sign_flip_time, passed })
}

/// Normal-line offset to `curve`, trying the segments around index `i`
/// first since slices of one flow share their node indexing.
fn near_offset(curve: &DiscreteCurve, i: usize, p: Vec2, nu: Vec2, reach: f64) -> Option<f64> {
    let n = curve.len();
    let window: Vec<Vec2> = if curve.is_closed() {
        (0..8).map(|k| curve.node((i + n + k - 4) % n)).collect()
    } else {
        curve.nodes()[i.saturating_sub(4)..(i + 4).min(n)].to_vec()
    };
    let mut local = CurveSet::new();
    local.push(window, false);
    local
        .normal_line_offset(p, nu, reach)
        .or_else(|| CurveSet::from_curves([curve]).normal_line_offset(p, nu, reach))
        .map(|h| h.0)
}
