use alloc::vec::Vec;

use super::BarrierError;
use crate::expander::ExpanderCurve;
use crate::geometry::{DiscreteCurve, GraphFunction};
use crate::math::{max_of, min_of, Real, Vec2};
use crate::spectral::{first_eigenpair, EigenResult, JacobiFieldResult, WeightedJacobiOperator};

/// Nodes at each open end of `Σ` left out of residual audits.
const END_NODES: usize = 2;
/// Upper end of the dyadic `s` search.
const S_SEARCH_MAX_EXPONENT: i32 = 24;

/// Which piece of the welded function `u` a node lies in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Region {
    /// `|x| < R`, where `u = f`.
    Inner,
    /// `R ≤ |x| < 2R`, where `u = min(f, h)`.
    Annulus,
    /// `|x| ≥ 2R`, where `u = h`.
    Outer,
}

/// Smooth piece whose residual is reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Branch {
    F,
    H,
}

/// The Jacobi field on `Σ` together with the first Dirichlet eigenpair on
/// `Σ_{3R}`: everything `f = v + αφ_{3R}` is built from.
#[derive(Clone, Debug)]
pub struct BarrierSetup {
    pub jacobi: JacobiFieldResult,
    pub radius: f64,
    pub eigen: EigenResult,
    /// `φ_{3R}` on the nodes of `Σ`, zero outside `Σ_{3R}`.
    pub phi: Vec<f64>,
}

impl BarrierSetup {
    /// Computes `(μ_{3R}, φ_{3R})` on the expander carried by `jacobi`.
    pub fn new(jacobi: JacobiFieldResult, radius: f64) -> Result<Self, BarrierError> {
        if !jacobi.positive {
            return Err(BarrierError::JacobiNotPositive { min: jacobi.min_v });
        }
        let op = WeightedJacobiOperator::assemble(&jacobi.sigma, 3.0 * radius)?;
        let eigen = first_eigenpair(&op)?;
        if !(eigen.mu > 0.0) {
            return Err(BarrierError::NotStable { mu: eigen.mu });
        }
        let phi = eigen.on_base(&op, jacobi.sigma.curve.len());
        Ok(Self { jacobi, radius, eigen, phi })
    }

    pub fn sigma(&self) -> &ExpanderCurve {
        &self.jacobi.sigma
    }

    /// `v + αφ_{3R}` at every node.
    pub fn f(&self, alpha: f64) -> Vec<f64> {
        self.jacobi.v.iter().zip(&self.phi).map(|(v, p)| v + alpha * p).collect()
    }

    /// Crossing margins of `f = v + αφ_{3R}` without building the barrier.
    pub fn crossing_at(&self, alpha: f64) -> CrossingCertificate {
        let (_, inner_margin, outer_margin) = self.margins(alpha);
        CrossingCertificate { inner_margin, outer_margin }
    }

    fn margins(&self, alpha: f64) -> (f64, f64, f64) {
        let f = self.f(alpha);
        let inner = boundary_values(self.sigma(), &f, self.radius);
        let outer = boundary_values(self.sigma(), &f, 2.0 * self.radius);
        let h = max_of(inner.iter().copied());
        (h, h - max_of(inner), min_of(outer) - h)
    }

    /// Largest `α` with both crossing margins non-negative, found by
    /// bisection, and half of it as the working value.
    pub fn alpha_search(&self) -> Result<AlphaSearch, BarrierError> {
        let ok = |a: f64| self.margins(a).2 >= 0.0;
        if !ok(0.0) {
            return Err(BarrierError::CrossingFailed { inner_margin: 0.0, outer_margin: self.margins(0.0).2 });
        }
        let mut hi = 1.0;
        while ok(hi) {
            hi *= 2.0;
            if hi > 1e12 {
                return Ok(AlphaSearch { alpha_max: f64::INFINITY, alpha: 1.0 });
            }
        }
        let mut lo = 0.0;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(AlphaSearch { alpha_max: lo, alpha: 0.5 * lo })
    }

    /// Builds the welded barrier `Γ_s = graph(s·u)`.
    pub fn build(&self, alpha: f64, s: f64) -> Result<StaticBarrier, BarrierError> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(BarrierError::InvalidParameter { name: "alpha", value: alpha });
        }
        if !(s > 0.0) || !s.is_finite() {
            return Err(BarrierError::InvalidParameter { name: "s", value: s });
        }
        let (h, inner_margin, outer_margin) = self.margins(alpha);
        if inner_margin < 0.0 || outer_margin < 0.0 {
            return Err(BarrierError::CrossingFailed { inner_margin, outer_margin });
        }
        let sigma = self.sigma();
        let f = self.f(alpha);
        let r = self.radius;
        let regions: Vec<Region> = sigma
            .curve
            .nodes()
            .iter()
            .map(|p| {
                let d = p.norm();
                if d < r {
                    Region::Inner
                } else if d < 2.0 * r {
                    Region::Annulus
                } else {
                    Region::Outer
                }
            })
            .collect();
        let u: Vec<f64> = regions
            .iter()
            .zip(&f)
            .map(|(reg, &fv)| match reg {
                Region::Inner => fv,
                Region::Annulus => fv.min(h),
                Region::Outer => h,
            })
            .collect();
        let graph = GraphFunction::new(&sigma.curve, u.iter().map(|x| s * x).collect())?;
        let gamma = graph.embed()?;
        Ok(StaticBarrier {
            radius: r,
            alpha,
            s,
            mu: self.eigen.mu,
            f,
            h,
            u,
            regions,
            gamma,
            crossing: CrossingCertificate { inner_margin, outer_margin },
        })
    }

    /// Largest dyadic `s = 2^{-k}` whose barrier is admissible and passes
    /// the supersolution audit.
    pub fn s0_search(&self, alpha: f64) -> Result<f64, BarrierError> {
        for k in 0..=S_SEARCH_MAX_EXPONENT {
            let s = 0.5f64.powi(k);
            let Ok(b) = self.build(alpha, s) else { continue };
            if check_supersolution(self, &b)?.passed {
                return Ok(s);
            }
        }
        Err(BarrierError::NoAdmissibleS { smallest: 0.5f64.powi(S_SEARCH_MAX_EXPONENT) })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlphaSearch {
    /// Largest `α` passing the crossing check.
    pub alpha_max: f64,
    /// `alpha_max / 2`.
    pub alpha: f64,
}

/// Margins `(h − max_{∂Σ_R} f, min_{∂Σ_{2R}} f − h)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrossingCertificate {
    pub inner_margin: f64,
    pub outer_margin: f64,
}

impl CrossingCertificate {
    pub fn passed(&self) -> bool {
        self.inner_margin >= 0.0 && self.outer_margin >= 0.0
    }
}

/// The welded function `u` over `Σ` and its graph at height `s`.
#[derive(Clone, Debug)]
pub struct StaticBarrier {
    pub radius: f64,
    pub alpha: f64,
    pub s: f64,
    pub mu: f64,
    /// `f = v + αφ_{3R}` at every node of `Σ`.
    pub f: Vec<f64>,
    pub h: f64,
    pub u: Vec<f64>,
    pub regions: Vec<Region>,
    /// `Γ_s`, the graph of `s·u`.
    pub gamma: DiscreteCurve,
    pub crossing: CrossingCertificate,
}

/// The crossing certificate of a built barrier.
pub fn check_crossing(barrier: &StaticBarrier) -> CrossingCertificate {
    barrier.crossing
}

/// A node where a branch residual is not positive.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FailingNode {
    pub index: usize,
    pub point: Vec2,
    pub region: Region,
    pub branch: Branch,
    pub residual: f64,
}

/// Pointwise supersolution audit of a static barrier.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SupersolutionReport {
    pub s: f64,
    /// `s·f` branch residual per node (meaningful in the inner region and
    /// the annulus).
    pub f_residual: Vec<f64>,
    /// `s·h` branch residual per node (annulus and outer region).
    pub h_residual: Vec<f64>,
    /// Minimum of the `f` branch over the inner region and annulus.
    pub min_f: f64,
    /// Minimum of the `h` branch over the annulus and outer region.
    pub min_h: f64,
    /// Largest `|H − x·ν/2|` of the discrete `Σ` itself, subtracted from
    /// both branches.
    pub base_floor: f64,
    /// Annulus nodes where `f − h` changes sign, i.e. the welding corner.
    pub corner_nodes: Vec<usize>,
    pub failing: Vec<FailingNode>,
    pub passed: bool,
}

/// Evaluates the rescaled flow residual of the graphs of `s·f` and `s·h`
/// over `Σ` (stationary in `τ`) and checks both are positive wherever they
/// are used. The residual of the unperturbed discrete expander is removed
/// so that its `O(h²)` truncation error does not enter the sign test.
pub fn check_supersolution(setup: &BarrierSetup, barrier: &StaticBarrier) -> Result<SupersolutionReport, BarrierError> {
    let curve = &setup.sigma().curve;
    let n = curve.len();
    let zero = GraphFunction::zero(curve);
    let base = zero.rescaled_flow_residual(&zero)?;
    let s = barrier.s;
    let fg = GraphFunction::new(curve, barrier.f.iter().map(|x| s * x).collect())?;
    let hg = GraphFunction::constant(curve, s * barrier.h);
    let f_res: Vec<f64> = fg.rescaled_flow_residual(&zero)?.iter().zip(&base).map(|(a, b)| a - b).collect();
    let h_res: Vec<f64> = hg.rescaled_flow_residual(&zero)?.iter().zip(&base).map(|(a, b)| a - b).collect();
    let base_floor = max_of(base.iter().map(|x| x.abs()));

    let mut failing = Vec::new();
    let mut min_f = f64::INFINITY;
    let mut min_h = f64::INFINITY;
    let mut corner_nodes = Vec::new();
    for i in END_NODES..n.saturating_sub(END_NODES) {
        let region = barrier.regions[i];
        let point = curve.node(i);
        let uses_f = region != Region::Outer;
        let uses_h = region != Region::Inner;
        if uses_f {
            min_f = min_f.min(f_res[i]);
            if !(f_res[i] > 0.0) {
                failing.push(FailingNode { index: i, point, region, branch: Branch::F, residual: f_res[i] });
            }
        }
        if uses_h {
            min_h = min_h.min(h_res[i]);
            if !(h_res[i] > 0.0) {
                failing.push(FailingNode { index: i, point, region, branch: Branch::H, residual: h_res[i] });
            }
        }
        if region == Region::Annulus && i + 1 < n && barrier.regions[i + 1] == Region::Annulus {
            let a = barrier.f[i] - barrier.h;
            let b = barrier.f[i + 1] - barrier.h;
            if a == 0.0 || a.signum() != b.signum() {
                corner_nodes.push(i);
            }
        }
    }
    let passed = failing.is_empty();
    Ok(SupersolutionReport {
        s,
        f_residual: f_res,
        h_residual: h_res,
        min_f,
        min_h,
        base_floor,
        corner_nodes,
        failing,
        passed,
    })
}

/// Values of `values` interpolated at the first crossings of `|x| = radius`
/// on either side of the vertex.
pub(crate) fn boundary_values(sigma: &ExpanderCurve, values: &[f64], radius: f64) -> Vec<f64> {
    let curve = &sigma.curve;
    let n = curve.len();
    let mut out = Vec::with_capacity(2);
    let at = |a: usize, b: usize| -> f64 {
        let (ra, rb) = (curve.node(a).norm(), curve.node(b).norm());
        let t = if rb == ra { 0.0 } else { (radius - ra) / (rb - ra) };
        values[a] + t * (values[b] - values[a])
    };
    let mut i = sigma.vertex;
    while i + 1 < n && curve.node(i + 1).norm() < radius {
        i += 1;
    }
    if i + 1 < n {
        out.push(at(i, i + 1));
    }
    let mut i = sigma.vertex;
    while i > 0 && curve.node(i - 1).norm() < radius {
        i -= 1;
    }
    if i > 0 {
        out.push(at(i, i - 1));
    }
    out
}
