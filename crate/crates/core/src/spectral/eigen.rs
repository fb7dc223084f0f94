use alloc::vec::Vec;

use super::{SpectralError, WeightedJacobiOperator};
use crate::expander::ExpanderCurve;
use crate::math::{pairwise_sum, solve_tridiagonal, Real};

/// Inverse iteration stops once the weighted residual falls below this.
const RESIDUAL_TARGET: f64 = 1e-10;
const MAX_ITERATIONS: usize = 10_000;
/// Rayleigh quotients kept in a non-convergence report.
const TRACE_LEN: usize = 8;

/// First Dirichlet eigenpair `Lφ + μφ = 0` on `Σ_R`.
#[derive(Clone, Debug)]
pub struct EigenResult {
    pub radius: f64,
    pub mu: f64,
    /// Nodal values on the operator's nodes, zero on the boundary.
    pub phi: Vec<f64>,
    /// `∫ φ² e^{|x|²/4}` by the trapezoid rule; `φ` is scaled so this is 1.
    pub normalization: f64,
    /// `‖Lφ + μφ‖` in the weighted norm.
    pub residual: f64,
    pub iterations: usize,
}

impl EigenResult {
    pub fn min_interior(&self) -> f64 {
        self.phi[1..self.phi.len() - 1].iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Extends `φ` by zero to every node of the base curve the operator was
    /// assembled on.
    pub fn on_base(&self, op: &WeightedJacobiOperator, base_len: usize) -> Vec<f64> {
        let mut out = alloc::vec![0.0; base_len];
        for i in 1..op.len() - 1 {
            out[op.base_index(i)] = self.phi[i];
        }
        out
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
    let n = pairwise_sum(&sq).sqrt();
    for x in v.iter_mut() {
        *x /= n;
    }
    n
}

fn tridiag_apply(diag: &[f64], off: &[f64], x: &[f64]) -> Vec<f64> {
    let k = diag.len();
    (0..k)
        .map(|i| {
            let mut y = diag[i] * x[i];
            if i > 0 {
                y += off[i - 1] * x[i - 1];
            }
            if i + 1 < k {
                y += off[i] * x[i + 1];
            }
            y
        })
        .collect()
}

/// Unshifted inverse power iteration with the weighted Rayleigh quotient.
pub fn first_eigenpair(op: &WeightedJacobiOperator) -> Result<EigenResult, SpectralError> {
    let k = op.interior_len();
    first_eigenpair_from(op, &alloc::vec![1.0; k + 2])
}

/// As [`first_eigenpair`], starting from nodal values `initial`.
pub fn first_eigenpair_from(op: &WeightedJacobiOperator, initial: &[f64]) -> Result<EigenResult, SpectralError> {
    let (diag, off) = op.symmetric_form();
    let k = diag.len();
    let mut psi = op.to_symmetric(initial);
    if psi.iter().all(|x| *x == 0.0) {
        psi = alloc::vec![1.0; k];
    }
    normalize(&mut psi);
    let mut lower = alloc::vec![0.0; k];
    let mut upper = alloc::vec![0.0; k];
    lower[1..].copy_from_slice(&off);
    upper[..k - 1].copy_from_slice(&off);
    let mut trace = Vec::new();
    let mut mu = 0.0;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    for it in 0..=MAX_ITERATIONS {
        let b = tridiag_apply(&diag, &off, &psi);
        mu = pairwise_sum(&b.iter().zip(&psi).map(|(x, y)| x * y).collect::<Vec<_>>());
        let r: Vec<f64> = b.iter().zip(&psi).map(|(x, y)| (x - mu * y) * (x - mu * y)).collect();
        residual = pairwise_sum(&r).sqrt();
        trace.push(mu);
        if trace.len() > TRACE_LEN {
            trace.remove(0);
        }
        iterations = it;
        if residual <= RESIDUAL_TARGET {
            break;
        }
        if it == MAX_ITERATIONS {
            return Err(SpectralError::NotConverged { iterations: it, residual, rayleigh_trace: trace });
        }
        psi = solve_tridiagonal(&lower, &diag, &upper, &psi).ok_or(SpectralError::Singular)?;
        normalize(&mut psi);
    }
    if pairwise_sum(&psi) < 0.0 {
        for x in psi.iter_mut() {
            *x = -*x;
        }
    }
    let mut phi = op.from_symmetric(&psi);
    let scale = op.inner(&phi, &phi).sqrt();
    for x in phi.iter_mut() {
        *x /= scale;
    }
    let normalization = op.inner(&phi, &phi);
    let result = EigenResult { radius: op.radius(), mu, phi, normalization, residual, iterations };
    let min = result.min_interior();
    if !(min > 0.0) {
        return Err(SpectralError::NotPositive { min });
    }
    Ok(result)
}

/// `(R, μ_R)` for each radius together with a monotonicity verdict.
#[derive(Clone, Debug)]
pub struct EigenvalueCurve {
    pub samples: Vec<(f64, f64)>,
    pub tolerance: f64,
    /// Consecutive pairs where `μ` increased by more than `tolerance`.
    pub violations: Vec<usize>,
}

impl EigenvalueCurve {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn all_positive(&self) -> bool {
        self.samples.iter().all(|s| s.1 > 0.0)
    }
}

/// First eigenvalues over increasing radii; increases beyond `h²` are
/// recorded as mesh-resolution violations.
pub fn eigenvalue_curve(sigma: &ExpanderCurve, radii: &[f64]) -> Result<EigenvalueCurve, SpectralError> {
    if radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(SpectralError::RadiiNotIncreasing);
    }
    let mut samples = Vec::with_capacity(radii.len());
    for &r in radii {
        let op = WeightedJacobiOperator::assemble(sigma, r)?;
        samples.push((r, first_eigenpair(&op)?.mu));
    }
    let tolerance = sigma.step * sigma.step;
    let violations = (0..samples.len().saturating_sub(1)).filter(|&i| samples[i + 1].1 > samples[i].1 + tolerance).collect();
    Ok(EigenvalueCurve { samples, tolerance, violations })
}
