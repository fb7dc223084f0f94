use alloc::vec::Vec;

use super::contour::extract_front;
use super::grid::{init_signed_distance, GridField, GridSpec};
use super::scheme::{evolve_level_set, EvolveOptions};
use super::shape::Shape;
use super::LevelSetError;
use crate::geometry::{local_hausdorff, CurveSet};
use crate::math::{Real, Vec2};

/// Which approximation a front belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Provenance {
    /// Offsets into `V`.
    Inner,
    /// Offsets into `V'`.
    Outer,
    Single,
}

/// Zero contour at one time.
#[derive(Clone, Debug)]
pub struct FrontSlice {
    pub t: f64,
    pub curves: CurveSet,
    pub provenance: Provenance,
}

/// Grid and time parameters shared by the runs of one experiment.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FlowParams {
    pub grid: GridSpec,
    /// Offsets in units of the grid spacing.
    pub eps_cells: Vec<f64>,
    pub evolve: EvolveOptions,
    pub times: Vec<f64>,
}

impl FlowParams {
    pub fn new(grid: GridSpec, times: Vec<f64>) -> Self {
        Self { grid, eps_cells: alloc::vec![4.0, 2.0, 1.0], evolve: EvolveOptions::default(), times }
    }
}

/// One family of ε-offset runs and its extrapolation to `ε = 0`.
#[derive(Clone, Debug)]
pub struct FlowRun {
    pub shape: Shape,
    pub provenance: Provenance,
    pub params: FlowParams,
    /// Signed offsets actually applied (positive into `V'`).
    pub offsets: Vec<f64>,
    /// Fronts of the extrapolated fields.
    pub slices: Vec<FrontSlice>,
    /// Fronts of each offset run, indexed like `offsets`.
    pub offset_slices: Vec<Vec<FrontSlice>>,
    /// Extrapolated fields at the output times.
    pub fields: Vec<GridField>,
    /// Largest amount by which consecutive offset runs fail to stay
    /// ordered; zero when nested.
    pub nesting_violation: f64,
}

impl FlowRun {
    pub fn spacing(&self) -> f64 {
        self.params.grid.spacing()
    }

    pub fn times(&self) -> Vec<f64> {
        self.slices.iter().map(|s| s.t).collect()
    }

    pub fn front_at(&self, t: f64) -> Option<&FrontSlice> {
        self.slices.iter().find(|s| (s.t - t).abs() <= 1e-12 * t.abs().max(1.0))
    }
}

/// Evolves the shape without offset.
pub fn single_flow(shape: &Shape, params: &FlowParams) -> Result<FlowRun, LevelSetError> {
    let field = init_signed_distance(shape, params.grid, 0.0)?;
    let fields = evolve_level_set(&field, &params.times, params.evolve)?;
    let slices: Vec<FrontSlice> = fields
        .iter()
        .map(|f| FrontSlice { t: f.t, curves: extract_front(f), provenance: Provenance::Single })
        .collect();
    Ok(FlowRun {
        shape: shape.clone(),
        provenance: Provenance::Single,
        params: params.clone(),
        offsets: alloc::vec![0.0],
        offset_slices: alloc::vec![slices.clone()],
        slices,
        fields,
        nesting_violation: 0.0,
    })
}

/// Runs the offsets into `V'` (outer) and into `V` (inner), each
/// extrapolated linearly to `ε = 0`.
pub fn inner_outer_flows(shape: &Shape, params: &FlowParams) -> Result<(FlowRun, FlowRun), LevelSetError> {
    Ok((offset_flow(shape, params, Provenance::Outer)?, offset_flow(shape, params, Provenance::Inner)?))
}

pub fn offset_flow(shape: &Shape, params: &FlowParams, provenance: Provenance) -> Result<FlowRun, LevelSetError> {
    if params.eps_cells.len() < 2 || params.eps_cells.iter().any(|e| !(*e > 0.0)) {
        return Err(LevelSetError::InvalidOffsets);
    }
    let h = params.grid.spacing();
    let sign = match provenance {
        Provenance::Outer => 1.0,
        Provenance::Inner => -1.0,
        Provenance::Single => return Err(LevelSetError::InvalidOffsets),
    };
    let offsets: Vec<f64> = params.eps_cells.iter().map(|e| sign * e * h).collect();
    let mut runs = Vec::with_capacity(offsets.len());
    for &eps in &offsets {
        let field = init_signed_distance(shape, params.grid, eps)?;
        runs.push(evolve_level_set(&field, &params.times, params.evolve)?);
    }
    // Larger offsets into V' give pointwise smaller fields.
    let mut order: Vec<usize> = (0..offsets.len()).collect();
    order.sort_by(|&a, &b| offsets[b].total_cmp(&offsets[a]));
    let mut nesting_violation: f64 = 0.0;
    for w in order.windows(2) {
        for (fa, fb) in runs[w[0]].iter().zip(&runs[w[1]]) {
            for (a, b) in fa.values.iter().zip(&fb.values) {
                nesting_violation = nesting_violation.max(a - b);
            }
        }
    }
    let mean_e = offsets.iter().sum::<f64>() / offsets.len() as f64;
    let var_e: f64 = offsets.iter().map(|e| (e - mean_e) * (e - mean_e)).sum();
    let mut fields = Vec::with_capacity(params.times.len());
    for k in 0..params.times.len() {
        let mut values = alloc::vec![0.0; params.grid.len()];
        for (c, v) in values.iter_mut().enumerate() {
            let mean_u = runs.iter().map(|r| r[k].values[c]).sum::<f64>() / runs.len() as f64;
            let cov: f64 = runs.iter().zip(&offsets).map(|(r, e)| (e - mean_e) * (r[k].values[c] - mean_u)).sum();
            *v = mean_u - cov / var_e * mean_e;
        }
        fields.push(GridField { values, ..runs[0][k].clone() });
    }
    let slices = fields.iter().map(|f| FrontSlice { t: f.t, curves: extract_front(f), provenance }).collect();
    let offset_slices = runs
        .iter()
        .map(|r| r.iter().map(|f| FrontSlice { t: f.t, curves: extract_front(f), provenance }).collect())
        .collect();
    Ok(FlowRun { shape: shape.clone(), provenance, params: params.clone(), offsets, slices, offset_slices, fields, nesting_violation })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Verdict {
    Fattening,
    NonFattening,
    /// Between the two resolution thresholds.
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GapSample {
    pub t: f64,
    pub gap: f64,
    pub gap_over_sqrt_t: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FatteningReport {
    pub samples: Vec<GapSample>,
    pub spacing: f64,
    pub radius: f64,
    pub verdict: Verdict,
}

/// Largest ratio between the extreme values of `gap/√t` still counted as
/// stable.
const STABLE_RATIO: f64 = 1.25;

/// Hausdorff distance between outer and inner fronts in `B_{L/2}(0)`.
///
/// Fattening needs `gap > 10h` at every sample, `gap/√t` within a factor
/// 1.25 and samples spanning at least a factor 4 in time; non-fattening
/// needs `gap ≤ 5h` throughout.
pub fn fattening_gap(outer: &FlowRun, inner: &FlowRun, times: &[f64]) -> Result<FatteningReport, LevelSetError> {
    check_time_grids(outer, inner)?;
    let h = outer.spacing();
    let radius = 0.5 * outer.params.grid.half_width;
    let samples: Vec<GapSample> = slices_at(outer, inner, times)?
        .into_iter()
        .map(|(a, b)| {
            let gap = local_hausdorff(&a.curves, &b.curves, Vec2::ZERO, radius);
            GapSample { t: a.t, gap, gap_over_sqrt_t: gap / a.t.sqrt() }
        })
        .collect();
    let ratios: Vec<f64> = samples.iter().map(|s| s.gap_over_sqrt_t).collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(l, u), r| (l.min(*r), u.max(*r)));
    let span = samples.last().map_or(1.0, |s| s.t) / samples.first().map_or(1.0, |s| s.t);
    let verdict = if samples.is_empty() {
        Verdict::Inconclusive
    } else if samples.iter().all(|s| s.gap <= 5.0 * h) {
        Verdict::NonFattening
    } else if samples.iter().all(|s| s.gap > 10.0 * h) && hi <= STABLE_RATIO * lo && span >= 4.0 - 1e-12 {
        Verdict::Fattening
    } else {
        Verdict::Inconclusive
    };
    Ok(FatteningReport { samples, spacing: h, radius, verdict })
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConvergenceSample {
    pub t: f64,
    /// Local Hausdorff distance in `B_ρ` between `t^{-1/2}·front(t)` and `Σ`.
    pub distance: f64,
    /// One grid cell in rescaled units, `h/√t`.
    pub floor: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConvergenceReport {
    pub radius: f64,
    pub samples: Vec<ConvergenceSample>,
    /// Distances do not grow as `t` decreases, except within two floors.
    pub monotone: bool,
}

pub fn rescaled_convergence(run: &FlowRun, sigma: &CurveSet, rho: f64) -> ConvergenceReport {
    let h = run.spacing();
    let samples: Vec<ConvergenceSample> = run
        .slices
        .iter()
        .map(|s| {
            let r = s.t.sqrt();
            let front = s.curves.map(|p| p / r);
            ConvergenceSample { t: s.t, distance: local_hausdorff(&front, sigma, Vec2::ZERO, rho), floor: h / r }
        })
        .collect();
    let mut by_time = samples.clone();
    by_time.sort_by(|a, b| b.t.total_cmp(&a.t));
    let monotone = by_time.windows(2).all(|w| w[1].distance <= w[0].distance.max(2.0 * w[1].floor));
    ConvergenceReport { radius: rho, samples, monotone }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PinchSample {
    pub t: f64,
    pub dist: f64,
    pub dist_over_sqrt_t: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PinchReport {
    pub samples: Vec<PinchSample>,
    pub spacing: f64,
    /// `(dist/√t)` at the earliest time over its value at the latest.
    pub ratio_change: f64,
    /// Latest time at which the distance is within two cells.
    pub floor_reached_at: Option<f64>,
    /// `dist/√t` halves from the latest to the earliest time.
    pub halved: bool,
}

/// Distance between the fronts of two runs in `B_{L/2}(0)`.
pub fn uniqueness_pinch(a: &FlowRun, b: &FlowRun, times: &[f64]) -> Result<PinchReport, LevelSetError> {
    check_time_grids(a, b)?;
    let h = a.spacing();
    let radius = 0.5 * a.params.grid.half_width;
    let mut samples: Vec<PinchSample> = slices_at(a, b, times)?
        .into_iter()
        .map(|(x, y)| {
            let dist = local_hausdorff(&x.curves, &y.curves, Vec2::ZERO, radius);
            PinchSample { t: x.t, dist, dist_over_sqrt_t: dist / x.t.sqrt() }
        })
        .collect();
    samples.sort_by(|p, q| p.t.total_cmp(&q.t));
    let first = samples.first().map_or(0.0, |s| s.dist_over_sqrt_t);
    let last = samples.last().map_or(0.0, |s| s.dist_over_sqrt_t);
    let ratio_change = if last > 0.0 { first / last } else if first > 0.0 { f64::INFINITY } else { 0.0 };
    let floor_reached_at = samples.iter().rev().find(|s| s.dist <= 2.0 * h).map(|s| s.t);
    Ok(PinchReport { samples, spacing: h, ratio_change, floor_reached_at, halved: ratio_change <= 0.5 })
}

fn slices_at<'a>(a: &'a FlowRun, b: &'a FlowRun, times: &[f64]) -> Result<Vec<(&'a FrontSlice, &'a FrontSlice)>, LevelSetError> {
    times
        .iter()
        .map(|&t| match (a.front_at(t), b.front_at(t)) {
            (Some(x), Some(y)) => Ok((x, y)),
            _ => Err(LevelSetError::MissingTime { t }),
        })
        .collect()
}

fn check_time_grids(a: &FlowRun, b: &FlowRun) -> Result<(), LevelSetError> {
    let (ta, tb) = (a.times(), b.times());
    if ta.len() != tb.len() || ta.iter().zip(&tb).any(|(x, y)| (x - y).abs() > 1e-12 * x.abs().max(1.0)) {
        return Err(LevelSetError::TimeGridMismatch);
    }
    if a.params.grid != b.params.grid {
        return Err(LevelSetError::GridMismatch);
    }
    Ok(())
}
