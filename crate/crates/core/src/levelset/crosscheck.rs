use alloc::vec::Vec;

use super::flows::FlowRun;
use super::LevelSetError;
use crate::barrier::{
    build_uniqueness_barriers, check_between, check_supersolution, BarrierError, BarrierSetup, BetweenSample,
};
use crate::math::{min_of, Real};

/// Outcome of placing one run between barriers built over another.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BarrierCrossCheck {
    pub alpha: f64,
    /// Largest dyadic `s` passing the supersolution audit.
    pub s0: f64,
    /// Smallest dyadic `s ≤ s0` whose band stays at least one cell wide.
    pub s: f64,
    pub graph_norms: Vec<f64>,
    pub crossings_ok: bool,
    pub between: Vec<BetweenSample>,
    pub contained: bool,
}

/// Builds `Γ^±_s` over the fronts of `reference` and checks that the fronts
/// of `other` lie between them inside `B_{√t·ρ}`.
///
/// Barrier bands thinner than a grid cell cannot be resolved, so the `s`
/// used is the smallest dyadic value below `s0` with
/// `s·min f·√t ≥ h` at every sampled time.
pub fn barrier_cross_check(
    setup: &BarrierSetup,
    reference: &FlowRun,
    other: &FlowRun,
    delta: f64,
    rho: f64,
) -> Result<BarrierCrossCheck, LevelSetError> {
    let alpha = setup.alpha_search()?.alpha;
    let s0 = setup.s0_search(alpha)?;
    let h = reference.spacing();
    let t_min = min_of(reference.slices.iter().map(|s| s.t));
    let f_min = min_of(setup.f(alpha));
    let mut s = s0;
    if s * f_min * t_min.sqrt() < h {
        return Err(LevelSetError::Barrier(BarrierError::InvalidParameter { name: "s0", value: s0 }));
    }
    while 0.5 * s * f_min * t_min.sqrt() >= h {
        s *= 0.5;
    }
    let barrier = setup.build(alpha, s)?;
    if !check_supersolution(setup, &barrier)?.passed {
        return Err(LevelSetError::Barrier(BarrierError::NoAdmissibleS { smallest: s }));
    }
    let slices = |run: &FlowRun| run.slices.iter().map(|x| (x.t, x.curves.clone())).collect::<Vec<_>>();
    let pair = build_uniqueness_barriers(setup, &barrier, &slices(reference), delta)?;
    let between = check_between(setup, &barrier, &pair, &slices(other), rho)?;
    Ok(BarrierCrossCheck {
        alpha,
        s0,
        s,
        graph_norms: pair.samples.iter().map(|x| x.graph_norm).collect(),
        crossings_ok: pair.samples.iter().all(|x| x.crossing_ok()),
        contained: between.iter().all(|b| b.contained),
        between,
    })
}
