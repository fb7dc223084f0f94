//! Self-expanding curves asymptotic to planar cones.
//!
//! Expanders are found by shooting the arclength ODE
//! `x' = (cos θ, sin θ)`, `θ' = (x·ν)/2` with `ν` the left normal, and by
//! bisecting on the vertex height until the asymptotic rays match the cone.

mod cone;
mod family;
mod outermost;
mod pair;
mod rotsym;
mod shoot;

use alloc::boxed::Box;
use alloc::string::String;

pub use cone::{PlanarCone, Side};
pub use family::{expander_family, rotation_family, ExpanderFamily, FamilyKind};
pub use outermost::{outermost_expanders, outermost_expanders_with, OutermostResult};
pub use pair::{solve_expander_for_ray_pair, solve_expander_for_ray_pair_with, ExpanderCurve, PairOptions};
pub use rotsym::{rot_symmetric_profile_expander, rot_symmetric_profile_expander_with, ProfileTopology, RotSymmetricExpander};
pub use shoot::{shoot_expander, Asymptote, ShootOptions, ShootStart, ShotCurve};

use crate::geometry::GeometryError;

/// Default arclength step.
pub const DEFAULT_STEP: f64 = 0.01;
/// Curves are truncated at this radius.
pub const R_MAX: f64 = 40.0;
/// Asymptotic angle detection starts beyond this radius.
pub const R_DETECT: f64 = 20.0;
/// Tolerance on the asymptotic ray angles.
pub const ANGLE_TOLERANCE: f64 = 1e-6;
/// Bisection iterations for every shooting parameter.
pub const BISECTION_ITERATIONS: usize = 60;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ExpanderError {
    #[error("invalid cone: {reason}")]
    InvalidCone { reason: String },
    #[error("invalid shooting input: {reason}")]
    InvalidInput { reason: String },
    #[error("curvature blew up at arclength {arclength}")]
    BlowUp { arclength: f64 },
    #[error("could not bracket target angle {target}; achieved range [{achieved_min}, {achieved_max}]")]
    BracketFailed { target: f64, achieved_min: f64, achieved_max: f64 },
    #[error("asymptotic angle missed by {error} (tolerance {tolerance})")]
    AsymptoteMissed { error: f64, tolerance: f64 },
    #[error("sector {sector} ({first_ray} to {second_ray}): {source}")]
    Sector { sector: usize, first_ray: f64, second_ray: f64, source: Box<ExpanderError> },
    #[error("no admissible pairing of rays for this cone")]
    NoConfiguration,
    #[error("weight {weight} on ray {ray} is not positive")]
    NonPositiveWeight { ray: usize, weight: f64 },
    #[error("family ordering violated between s = {lower} and s = {upper} at node {node}")]
    OrderingViolated { lower: f64, upper: f64, node: usize },
    #[error("family members do not share the base topology")]
    TopologyChanged,
    #[error("profile reached the axis at r = {r}, z = {z} (arclength {arclength})")]
    AxisCrossing { r: f64, z: f64, arclength: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
