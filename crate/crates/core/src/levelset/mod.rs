//! Grid solver for the level set flow of planar curves and the
//! measurements built on it.
//!
//! Fields are signed distances (negative on the `V` side) clamped to a
//! narrow band, evolved by an explicit scheme for
//! `u_t = |∇u|_ε div(∇u/|∇u|_ε)` and redistanced by fast marching. Inner
//! and outer flows come from ε-offset initial data extrapolated to `ε = 0`.

mod contour;
mod crosscheck;
mod flows;
mod grid;
mod scheme;
mod shape;

pub use contour::extract_front;
pub use crosscheck::{barrier_cross_check, BarrierCrossCheck};
pub use flows::{
    fattening_gap, inner_outer_flows, offset_flow, rescaled_convergence, single_flow, uniqueness_pinch,
    ConvergenceReport, ConvergenceSample, FatteningReport, FlowParams, FlowRun, FrontSlice, GapSample, PinchReport,
    PinchSample, Provenance, Verdict,
};
pub use grid::{init_signed_distance, BoundaryPolicy, GridField, GridSpec, BAND_CELLS};
pub use scheme::{evolve_level_set, reinitialize, EvolveOptions};
pub use shape::Shape;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum LevelSetError {
    #[error("invalid {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("shape does not fit in the domain of half-width {half_width} with its buffer")]
    ShapeExceedsDomain { half_width: f64 },
    #[error("polygon shapes need a closed curve")]
    OpenCurve,
    #[error("output times must be finite and increasing")]
    TimesNotIncreasing,
    #[error("front entered the boundary buffer at t = {t}")]
    FrontAtBoundary { t: f64 },
    #[error("offset runs need at least two positive offsets")]
    InvalidOffsets,
    #[error("time grids of the two runs differ")]
    TimeGridMismatch,
    #[error("no slice at t = {t}")]
    MissingTime { t: f64 },
    #[error("grids of the two runs differ")]
    GridMismatch,
    #[error(transparent)]
    Barrier(#[from] crate::barrier::BarrierError),
}
