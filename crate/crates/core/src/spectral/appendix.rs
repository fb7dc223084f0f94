use alloc::vec::Vec;

use super::jacobi::jacobi_apply;
use super::SpectralError;
use crate::geometry::{DiscreteCurve, GraphFunction};
use crate::math::{fit_slope, max_of, Real};

/// Log-log slopes of the Appendix A remainders under `u ↦ λu`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AppendixScaling {
    pub lambdas: Vec<f64>,
    /// Per shape: slope of `max|v H_Γ − (H + Δu + |A|²u)|` against `λ`.
    pub curvature_slopes: Vec<f64>,
    /// Per shape: slope of `max|v(λLu − 𝐇 + x/2)·ν|` against `λ`, when the
    /// base is an expander (empty otherwise).
    pub flow_slopes: Vec<f64>,
}

impl AppendixScaling {
    /// Whether every slope lies in `[lo, hi]`.
    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.curvature_slopes.iter().chain(&self.flow_slopes).all(|s| (lo..=hi).contains(s))
    }
}

/// Nodes at each open end left out of the maxima.
const END_NODES: usize = 3;

/// Scales each shape by `lambdas` over `base` and fits the growth of the
/// graph mean curvature remainder and, if `expander` is set, of the
/// rescaled flow remainder `∂_τ u − Lu` with `∂_τ u = Lu`.
pub fn appendix_scaling(
    base: &DiscreteCurve,
    shapes: &[Vec<f64>],
    lambdas: &[f64],
    expander: bool,
) -> Result<AppendixScaling, SpectralError> {
    let n = base.len();
    let interior = |r: &[f64]| {
        let skip = if base.is_closed() { 0 } else { END_NODES };
        max_of(r[skip..r.len() - skip].iter().map(|x| x.abs()))
    };
    let xs: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    let mut curvature_slopes = Vec::with_capacity(shapes.len());
    let mut flow_slopes = Vec::new();
    for shape in shapes {
        let mut ys = Vec::with_capacity(lambdas.len());
        let mut zs = Vec::with_capacity(lambdas.len());
        let lu = jacobi_apply(base, shape);
        for &lambda in lambdas {
            let u = GraphFunction::new(base, shape.iter().map(|x| lambda * x).collect())?;
            let terms = u.linearized_mean_curvature()?;
            ys.push(interior(&terms.iter().map(|t| t.residual).collect::<Vec<_>>()).ln());
            if expander {
                let speed = GraphFunction::new(base, lu.iter().map(|x| lambda * x).collect())?;
                zs.push(interior(&u.rescaled_flow_residual(&speed)?).ln());
            }
        }
        curvature_slopes.push(fit_slope(&xs, &ys));
        if expander {
            flow_slopes.push(fit_slope(&xs, &zs));
        }
        debug_assert_eq!(shape.len(), n);
    }
    Ok(AppendixScaling { lambdas: lambdas.to_vec(), curvature_slopes, flow_slopes })
}
