//! Numerical toolkit for mean curvature flow out of conical singularities in
//! the plane.
//!
//! The crate is `no_std` (with `alloc`) and is organised bottom-up:
//!
//! - [`geometry`]: oriented polylines, curvature, normal graphs and the
//!   expansion of their mean curvature.
//! - [`expander`]: self-expanding curves asymptotic to planar cones, the
//!   outermost pair, perturbation families and a rotationally symmetric mode.
//! - [`spectral`]: the Gaussian-weighted Jacobi operator, first Dirichlet
//!   eigenpairs and Jacobi fields from expander families.
//! - [`barrier`]: welded barrier graphs over expanders and pointwise
//!   super/subsolution audits.
//! - [`levelset`]: a grid solver for the level set flow, inner and
//!   outer flows, fattening and pinching measurements.
#![cfg_attr(not(feature = "std"), no_std)]
// With std linked, inherent float methods shadow the libm-backed `Real` trait.
#![cfg_attr(any(test, feature = "std"), allow(unused_imports))]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod barrier;
pub mod expander;
pub mod geometry;
pub mod levelset;
pub mod math;
pub mod spectral;

pub use math::Vec2;
