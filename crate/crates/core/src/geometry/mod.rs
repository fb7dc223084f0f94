//! Discrete differential geometry of oriented plane curves and of normal
//! graphs over them.
//!
//! Conventions: the shape operator is `S = -dν`, the scalar mean curvature
//! satisfies `𝐇 = H ν`, so a circle of radius `r` with its outward normal has
//! `H = -1/r`. Expanders solve `H = (x·ν)/2`.

mod curve;
mod graph;
mod hausdorff;
mod spline;

pub use curve::{DiscreteCurve, NodeGeometry, Orientation};
pub use graph::{
    expander_residual, max_expander_residual, GraphFunction, MeanCurvatureTerms, DEFAULT_ETA,
    EXPANDER_RESIDUAL_FACTOR,
};
pub use hausdorff::{hausdorff, local_hausdorff, one_sided_distance, point_set_distance, CurveSet};

pub(crate) use curve::{circumcircle_curvature, closest_on_segment};
pub(crate) use graph::{differentiate, second_derivative};

/// Failures of curve construction and graph evaluation.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("curve needs at least {required} nodes, got {count}")]
    TooFewNodes { count: usize, required: usize },
    #[error("node {index} coincides with its successor")]
    RepeatedNode { index: usize },
    #[error("node {index} is not finite")]
    NonFinite { index: usize },
    #[error("spacing must be positive and finite, got {spacing}")]
    InvalidSpacing { spacing: f64 },
    #[error("graph values ({values}) do not match base nodes ({nodes})")]
    LengthMismatch { values: usize, nodes: usize },
    #[error("graph not admissible at node {node}: |u||A| = {product} >= {eta}")]
    Inadmissible { node: usize, product: f64, eta: f64 },
    #[error("base curve is not an expander: max residual {max_residual} exceeds {tolerance}")]
    NotAnExpander { max_residual: f64, tolerance: f64 },
}
