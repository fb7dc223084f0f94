use alloc::vec::Vec;

use super::welded::{boundary_values, BarrierSetup, StaticBarrier};
use super::BarrierError;
use crate::geometry::{differentiate, CurveSet, DEFAULT_ETA};
use crate::math::{max_of, Real, Vec2};

/// One time slice of the barrier pair, in the rescaled frame `t^{-1/2}x`.
#[derive(Clone, Debug)]
pub struct UniquenessSample {
    pub t: f64,
    /// `u(·, t)` on the nodes of `Σ_{3R}` (NaN elsewhere).
    pub u: Vec<f64>,
    /// `max(|u|, |∂_s u|)` over `Σ_{3R}`.
    pub graph_norm: f64,
    /// `1/(ν_Σ·n_F)` at each node, the height of a unit normal offset of
    /// the reference front measured along `ν_Σ`.
    pub secant: Vec<f64>,
    /// Crossing margins `(i+, ii+, i−, ii−)`, non-negative when they hold.
    pub crossing: [f64; 4],
    /// Rescaled reference front `t^{-1/2} M¹(t)`.
    pub front: CurveSet,
}

impl UniquenessSample {
    pub fn crossing_ok(&self) -> bool {
        self.crossing.iter().all(|m| *m >= 0.0)
    }
}

/// Close and far barriers welded over a reference flow.
#[derive(Clone, Debug)]
pub struct UniquenessBarrierPair {
    pub s: f64,
    pub delta: f64,
    pub radius: f64,
    pub h: f64,
    pub samples: Vec<UniquenessSample>,
}

impl UniquenessBarrierPair {
    /// Heights of `Γ^±_s(t)` along `ν_Σ` over `Σ_{2R}` after welding: the
    /// close piece inside `B_R`, the lower (upper) of close and far piece on
    /// the annulus. NaN outside `Σ_{2R}`.
    pub fn welded_heights(&self, setup: &BarrierSetup, barrier: &StaticBarrier, k: usize) -> (Vec<f64>, Vec<f64>) {
        let smp = &self.samples[k];
        let curve = &setup.sigma().curve;
        let r = self.radius;
        let mut upper = alloc::vec![f64::NAN; curve.len()];
        let mut lower = alloc::vec![f64::NAN; curve.len()];
        for i in 0..curve.len() {
            let d = curve.node(i).norm();
            if d >= 2.0 * r || smp.u[i].is_nan() {
                continue;
            }
            let close = self.s * barrier.f[i];
            let (up, lo) = if d < r {
                (smp.u[i] + close, smp.u[i] - close)
            } else {
                let far = self.s * self.h * smp.secant[i];
                (smp.u[i] + close.min(far), smp.u[i] - close.min(far))
            };
            upper[i] = up;
            lower[i] = lo;
        }
        (upper, lower)
    }
}

/// Builds `Γ^±_{close,s}` and `Γ^±_{far,s}` over the reference slices
/// `(t, M¹(t))` and records the crossing certificates at each time.
pub fn build_uniqueness_barriers(
    setup: &BarrierSetup,
    barrier: &StaticBarrier,
    reference: &[(f64, CurveSet)],
    delta: f64,
) -> Result<UniquenessBarrierPair, BarrierError> {
    let sigma = setup.sigma();
    let curve = &sigma.curve;
    let kmax = max_of(curve.geometry().iter().map(|g| g.curvature.abs()));
    if !(delta > 0.0) || delta >= 1.0 || delta * kmax >= DEFAULT_ETA {
        return Err(BarrierError::DeltaTooLarge { delta, limit: (DEFAULT_ETA / kmax).min(1.0) });
    }
    let r = setup.radius;
    let s = barrier.s;
    let h = barrier.h;
    let mut samples = Vec::with_capacity(reference.len());
    for (t, front) in reference {
        let t = *t;
        let scale = 1.0 / t.sqrt();
        let front = front.map(|p| p * scale);
        let n = curve.len();
        let mut u = alloc::vec![f64::NAN; n];
        let mut secant = alloc::vec![f64::NAN; n];
        let mut inside = Vec::new();
        for i in 0..n {
            if curve.node(i).norm() >= 3.0 * r {
                continue;
            }
            let hit = front.normal_line_offset(curve.node(i), curve.normal(i), delta);
            let Some((off, cos)) = hit else {
                return Err(BarrierError::GraphicalityViolated { t, node: i, norm: f64::INFINITY, bound: 0.5 * delta });
            };
            u[i] = off;
            secant[i] = 1.0 / cos.clamp(1e-12, 1.0);
            inside.push(i);
        }
        let (lo, hi) = (inside[0], *inside.last().unwrap_or(&0));
        let sub: Vec<Vec2> = curve.nodes()[lo..=hi].to_vec();
        let sub_curve = crate::geometry::DiscreteCurve::new(sub, false, curve.orientation())?;
        let du = differentiate(&sub_curve, &u[lo..=hi]);
        let graph_norm = u[lo..=hi].iter().chain(du.iter()).fold(0.0f64, |m, x| m.max(x.abs()));
        if graph_norm > 0.5 * delta {
            let node = lo + du.iter().position(|x| x.abs() > 0.5 * delta).unwrap_or(0);
            return Err(BarrierError::GraphicalityViolated { t, node, norm: graph_norm, bound: 0.5 * delta });
        }
        // Crossings at |x| = R and |x| = 2R, interpolated like the static
        // certificate so the branch where f = h on ∂Σ_R gives exactly h(sec − 1).
        let pairs = |radius: f64| {
            let f = boundary_values(sigma, &barrier.f, radius);
            let sec = boundary_values(sigma, &secant, radius);
            f.into_iter().zip(sec).collect::<Vec<_>>()
        };
        let near_r = pairs(r).iter().map(|(f, c)| s * (h * c - f)).fold(f64::INFINITY, f64::min);
        let near_2r = pairs(2.0 * r).iter().map(|(f, c)| s * (f - h * c)).fold(f64::INFINITY, f64::min);
        samples.push(UniquenessSample { t, u, graph_norm, secant, crossing: [near_2r, near_r, near_2r, near_r], front });
    }
    Ok(UniquenessBarrierPair { s, delta, radius: r, h, samples })
}

/// Whether another flow lies between the welded barriers at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BetweenSample {
    pub t: f64,
    /// Largest amount (rescaled units) by which the front leaves the band;
    /// non-positive when contained.
    pub max_violation: f64,
    /// Smallest half-width of the band over the audited region.
    pub min_half_width: f64,
    pub contained: bool,
}

/// Checks that the slices `(t, M²(t))` lie between `Γ^-_s(t)` and
/// `Γ^+_s(t)` inside `B_{√t·ρ}`: over `Σ_{2R}` by heights along `ν_Σ`,
/// beyond that by distance `≤ s·h` to the reference front.
pub fn check_between(
    setup: &BarrierSetup,
    barrier: &StaticBarrier,
    pair: &UniquenessBarrierPair,
    other: &[(f64, CurveSet)],
    rho: f64,
) -> Result<Vec<BetweenSample>, BarrierError> {
    if other.len() != pair.samples.len() {
        return Err(BarrierError::TimeGridMismatch);
    }
    let curve = &setup.sigma().curve;
    let mut out = Vec::with_capacity(other.len());
    for (k, (t, front)) in other.iter().enumerate() {
        if (*t - pair.samples[k].t).abs() > 1e-12 * t.abs() {
            return Err(BarrierError::TimeGridMismatch);
        }
        let g = front.map(|p| p / t.sqrt());
        let (upper, lower) = pair.welded_heights(setup, barrier, k);
        let mut worst = f64::NEG_INFINITY;
        let mut min_half = f64::INFINITY;
        for i in 0..curve.len() {
            if upper[i].is_nan() {
                continue;
            }
            let half = 0.5 * (upper[i] - lower[i]);
            min_half = min_half.min(half);
            match g.normal_line_offset(curve.node(i), curve.normal(i), pair.delta) {
                Some((w, _)) => worst = worst.max(w - upper[i]).max(lower[i] - w),
                None => worst = f64::INFINITY,
            }
        }
        let far_band = pair.s * pair.h;
        min_half = min_half.min(far_band);
        let reference = &pair.samples[k].front;
        for p in g.points() {
            let d = p.norm();
            if d < 2.0 * pair.radius || d > rho {
                continue;
            }
            worst = worst.max(reference.distance(p) - far_band);
        }
        out.push(BetweenSample { t: *t, max_violation: worst, min_half_width: min_half, contained: worst <= 0.0 });
    }
    Ok(out)
}
