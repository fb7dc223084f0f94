use alloc::vec::Vec;

use super::shape::Shape;
use super::LevelSetError;
use crate::math::{Real, Vec2};

/// How boundary cells behave during evolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BoundaryPolicy {
    /// The outer ring keeps its initial values. Used for unbounded cones.
    ClampInitial,
    /// The front must stay away from the boundary buffer; evolution aborts
    /// if it gets close.
    Buffered,
}

/// Square grid of `n × n` cells over `center + [-L, L]²`; values sit at
/// cell centres.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    pub center: Vec2,
    pub half_width: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(center: Vec2, half_width: f64, n: usize) -> Result<Self, LevelSetError> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(LevelSetError::InvalidParameter { name: "half_width", value: half_width });
        }
        if n < 16 {
            return Err(LevelSetError::InvalidParameter { name: "n", value: n as f64 });
        }
        Ok(Self { center, half_width, n })
    }

    /// Grid centred at the origin.
    pub fn centered(half_width: f64, n: usize) -> Result<Self, LevelSetError> {
        Self::new(Vec2::ZERO, half_width, n)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn point(&self, i: usize, j: usize) -> Vec2 {
        let h = self.spacing();
        Vec2::new(
            self.center.x - self.half_width + (i as f64 + 0.5) * h,
            self.center.y - self.half_width + (j as f64 + 0.5) * h,
        )
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Distance from `p` to the nearest side of the domain square.
    pub fn distance_to_edge(&self, p: Vec2) -> f64 {
        let d = p - self.center;
        self.half_width - d.x.abs().max(d.y.abs())
    }
}

/// A level set function on a grid, negative on the `V` side.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridField {
    pub spec: GridSpec,
    pub values: Vec<f64>,
    pub t: f64,
    pub boundary: BoundaryPolicy,
    /// Values are clamped to `[-band, band]`; only cells inside the band move.
    pub band: f64,
    /// The initial zero set has a singular point (a corner or crossing).
    pub singular_initial: bool,
}

impl GridField {
    pub fn spacing(&self) -> f64 {
        self.spec.spacing()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.spec.index(i, j)]
    }

    /// Central-difference gradient norm at an interior cell.
    pub fn gradient_norm(&self, i: usize, j: usize) -> f64 {
        let n = self.spec.n;
        let h = self.spacing();
        let (i0, i1) = (i.saturating_sub(1), (i + 1).min(n - 1));
        let (j0, j1) = (j.saturating_sub(1), (j + 1).min(n - 1));
        let gx = (self.value(i1, j) - self.value(i0, j)) / ((i1 - i0) as f64 * h);
        let gy = (self.value(i, j1) - self.value(i, j0)) / ((j1 - j0) as f64 * h);
        (gx * gx + gy * gy).sqrt()
    }

    /// Bilinear interpolation at `p`, clamped to the grid.
    pub fn sample(&self, p: Vec2) -> f64 {
        let n = self.spec.n;
        let h = self.spacing();
        let o = self.spec.point(0, 0);
        let fx = ((p.x - o.x) / h).clamp(0.0, (n - 1) as f64);
        let fy = ((p.y - o.y) / h).clamp(0.0, (n - 1) as f64);
        let i = (fx.floor() as usize).min(n - 2);
        let j = (fy.floor() as usize).min(n - 2);
        let (a, b) = (fx - i as f64, fy - j as f64);
        let v00 = self.value(i, j);
        let v10 = self.value(i + 1, j);
        let v01 = self.value(i, j + 1);
        let v11 = self.value(i + 1, j + 1);
        (1.0 - a) * (1.0 - b) * v00 + a * (1.0 - b) * v10 + (1.0 - a) * b * v01 + a * b * v11
    }
}

/// Cells of the band used for clamping: the front is resolved within
/// `BAND_CELLS` cells on either side.
pub const BAND_CELLS: f64 = 8.0;

/// Initial field `d(x) − ε`, clamped to the band, with `d` the signed
/// distance to the shape (negative in `V`). Positive `ε` moves the zero set
/// into `V'`.
pub fn init_signed_distance(shape: &Shape, spec: GridSpec, epsilon: f64) -> Result<GridField, LevelSetError> {
    if !epsilon.is_finite() {
        return Err(LevelSetError::InvalidParameter { name: "epsilon", value: epsilon });
    }
    let h = spec.spacing();
    let band = BAND_CELLS * h;
    let boundary = if shape.is_bounded() {
        let (lo, hi) = shape.bounding_box();
        let margin = band + epsilon.abs() + 4.0 * h;
        let inside = |p: Vec2| spec.distance_to_edge(p) >= margin;
        if !inside(lo) || !inside(hi) || !inside(Vec2::new(lo.x, hi.y)) || !inside(Vec2::new(hi.x, lo.y)) {
            return Err(LevelSetError::ShapeExceedsDomain { half_width: spec.half_width });
        }
        BoundaryPolicy::Buffered
    } else {
        BoundaryPolicy::ClampInitial
    };
    let d = shape.signed_distance_grid(&spec, band + epsilon.abs() + 2.0 * h);
    let values = d.into_iter().map(|v| (v - epsilon).clamp(-band, band)).collect();
    Ok(GridField { spec, values, t: 0.0, boundary, band, singular_initial: shape.is_singular() })
}
