//! Weighted Jacobi operator of an expander, its first Dirichlet
//! eigenpair on `Σ_R = Σ ∩ B_R`, and Jacobi fields of expander families.
//!
//! The operator `L = ∂²_s + (x·T/2)∂_s − 1/2 + κ²` is self-adjoint for the
//! weight `e^{|x|²/4}`. Eigenvalues use the convention `Lφ + μφ = 0`, so
//! on the line `μ_R` decreases to 1 as `R → ∞`.

mod appendix;
mod eigen;
mod jacobi;
mod operator;

use alloc::vec::Vec;

pub use appendix::{appendix_scaling, AppendixScaling};
pub use eigen::{eigenvalue_curve, first_eigenpair, first_eigenpair_from, EigenResult, EigenvalueCurve};
pub use jacobi::{jacobi_apply, jacobi_field_from_family, JacobiFieldResult};
pub use operator::WeightedJacobiOperator;

use crate::expander::ExpanderError;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error("radius {radius} is not admissible (R must be at least 2 and enclose the vertex)")]
    InvalidRadius { radius: f64 },
    #[error("radius {radius} exceeds the computed curve (extent {extent})")]
    RadiusExceedsCurve { radius: f64, extent: f64 },
    #[error("inverse iteration did not converge after {iterations} iterations (residual {residual})")]
    NotConverged { iterations: usize, residual: f64, rayleigh_trace: Vec<f64> },
    #[error("singular linear system in inverse iteration")]
    Singular,
    #[error("first eigenfunction changes sign (min {min})")]
    NotPositive { min: f64 },
    #[error("radii must be strictly increasing")]
    RadiiNotIncreasing,
    #[error("a family needs at least 3 members, got {members}")]
    FamilyTooSmall { members: usize },
    #[error("family parameters do not bracket s = 0")]
    NotBracketing,
    #[error("family parameters are not symmetric about s = 0")]
    AsymmetricStencil,
    #[error("family members do not share a common node range")]
    NonGraphical,
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Expander(#[from] ExpanderError),
}
