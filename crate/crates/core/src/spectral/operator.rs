use alloc::vec::Vec;

use super::SpectralError;
use crate::expander::ExpanderCurve;
use crate::math::{pairwise_sum, Real, Vec2};

/// Interior nodes closer than this fraction of the local spacing to the
/// boundary are folded into it.
const MIN_BOUNDARY_GAP: f64 = 0.2;

/// The Jacobi operator `L = Δ + (x/2)·∇ − 1/2 + |A|²` on `Σ_R`, discretised
/// by finite volumes so that it is symmetric for the weight `e^{|x|²/4}`:
///
/// `(Lφ)_i = [w_{i+½}(φ_{i+1} − φ_i)/h_{i+½} − w_{i−½}(φ_i − φ_{i−1})/h_{i−½}] / (w_i ℓ_i)
///           + (κ_i² − ½) φ_i`
///
/// with `ℓ_i` the dual cell length. Nodes `0` and `n − 1` lie on `|x| = R`
/// and carry the Dirichlet condition.
#[derive(Clone, Debug)]
pub struct WeightedJacobiOperator {
    radius: f64,
    nodes: Vec<Vec2>,
    /// Base curve index of node 1; node `i` (interior) is base node
    /// `first_base + i − 1`.
    first_base: usize,
    /// `|x|²/4` at nodes.
    log_weight: Vec<f64>,
    /// `|x|²/4` at edge midpoints.
    log_weight_mid: Vec<f64>,
    spacing: Vec<f64>,
    dual: Vec<f64>,
    kappa_sq: Vec<f64>,
}

fn boundary_point(inside: Vec2, outside: Vec2, radius: f64) -> Vec2 {
    // Solve |inside + t(outside − inside)| = radius for t ∈ (0, 1].
    let d = outside - inside;
    let a = d.norm_sq();
    let b = 2.0 * inside.dot(d);
    let c = inside.norm_sq() - radius * radius;
    let t = (-b + (b * b - 4.0 * a * c).max(0.0).sqrt()) / (2.0 * a);
    inside + d * t.clamp(0.0, 1.0)
}

impl WeightedJacobiOperator {
    pub fn assemble(sigma: &ExpanderCurve, radius: f64) -> Result<Self, SpectralError> {
        if !(radius >= 2.0) || !radius.is_finite() {
            return Err(SpectralError::InvalidRadius { radius });
        }
        let curve = &sigma.curve;
        let n = curve.len();
        let v = sigma.vertex;
        if curve.node(v).norm() >= radius {
            return Err(SpectralError::InvalidRadius { radius });
        }
        let mut lo = v;
        while lo > 0 && curve.node(lo - 1).norm() < radius {
            lo -= 1;
        }
        let mut hi = v;
        while hi + 1 < n && curve.node(hi + 1).norm() < radius {
            hi += 1;
        }
        if lo == 0 || hi + 1 == n {
            let extent = curve.node(0).norm().min(curve.node(n - 1).norm());
            return Err(SpectralError::RadiusExceedsCurve { radius, extent });
        }
        let start = boundary_point(curve.node(lo), curve.node(lo - 1), radius);
        let end = boundary_point(curve.node(hi), curve.node(hi + 1), radius);
        let h_local = curve.node(lo).dist(curve.node(lo - 1));
        if start.dist(curve.node(lo)) < MIN_BOUNDARY_GAP * h_local {
            lo += 1;
        }
        let h_local = curve.node(hi).dist(curve.node(hi + 1));
        if end.dist(curve.node(hi)) < MIN_BOUNDARY_GAP * h_local {
            hi -= 1;
        }
        if hi < lo + 2 {
            return Err(SpectralError::InvalidRadius { radius });
        }
        let mut nodes = Vec::with_capacity(hi - lo + 3);
        let mut kappa_sq = Vec::with_capacity(hi - lo + 3);
        nodes.push(start);
        kappa_sq.push(0.0);
        for i in lo..=hi {
            nodes.push(curve.node(i));
            let k = curve.curvature(i);
            kappa_sq.push(k * k);
        }
        nodes.push(end);
        kappa_sq.push(0.0);
        let m = nodes.len();
        let log_weight: Vec<f64> = nodes.iter().map(|p| 0.25 * p.norm_sq()).collect();
        let spacing: Vec<f64> = nodes.windows(2).map(|w| w[1].dist(w[0])).collect();
        let log_weight_mid: Vec<f64> = nodes.windows(2).map(|w| 0.25 * ((w[0] + w[1]) * 0.5).norm_sq()).collect();
        let mut dual = alloc::vec![0.0; m];
        for i in 1..m - 1 {
            dual[i] = 0.5 * (spacing[i - 1] + spacing[i]);
        }
        Ok(Self { radius, nodes, first_base: lo, log_weight, log_weight_mid, spacing, dual, kappa_sq })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// All nodes including the two boundary nodes.
    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn interior_len(&self) -> usize {
        self.nodes.len() - 2
    }

    /// Base curve index of interior node `i` (`1 ≤ i ≤ n − 2`).
    pub fn base_index(&self, i: usize) -> usize {
        self.first_base + i - 1
    }

    /// Range of base indices covered by interior nodes.
    pub fn base_range(&self) -> (usize, usize) {
        (self.first_base, self.first_base + self.interior_len() - 1)
    }

    pub fn kappa_sq(&self) -> &[f64] {
        &self.kappa_sq
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.log_weight[i].exp()
    }

    /// Lumped weighted mass `e^{|x_i|²/4} ℓ_i` (zero on the boundary).
    pub fn mass(&self, i: usize) -> f64 {
        self.dual[i] * self.log_weight[i].exp()
    }

    /// `Lφ` at every node for nodal values `phi` (boundary entries are used
    /// as given; the result is zero there).
    pub fn apply(&self, phi: &[f64]) -> Vec<f64> {
        let m = self.nodes.len();
        assert_eq!(phi.len(), m, "one value per operator node");
        let mut out = alloc::vec![0.0; m];
        for i in 1..m - 1 {
            let wp = (self.log_weight_mid[i] - self.log_weight[i]).exp();
            let wm = (self.log_weight_mid[i - 1] - self.log_weight[i]).exp();
            let flux = wp * (phi[i + 1] - phi[i]) / self.spacing[i] - wm * (phi[i] - phi[i - 1]) / self.spacing[i - 1];
            out[i] = flux / self.dual[i] + (self.kappa_sq[i] - 0.5) * phi[i];
        }
        out
    }

    /// Trapezoid weighted inner product over interior nodes.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let terms: Vec<f64> = (1..self.nodes.len() - 1).map(|i| self.mass(i) * a[i] * b[i]).collect();
        pairwise_sum(&terms)
    }

    /// Symmetric tridiagonal form of `−L` in the variables `ψ = √M φ` on
    /// interior nodes: `(diagonal, off-diagonal)`.
    pub fn symmetric_form(&self) -> (Vec<f64>, Vec<f64>) {
        let m = self.nodes.len();
        let k = m - 2;
        let mut diag = Vec::with_capacity(k);
        let mut off = Vec::with_capacity(k.saturating_sub(1));
        for i in 1..m - 1 {
            let wp = (self.log_weight_mid[i] - self.log_weight[i]).exp() / self.spacing[i];
            let wm = (self.log_weight_mid[i - 1] - self.log_weight[i]).exp() / self.spacing[i - 1];
            diag.push((wp + wm) / self.dual[i] - (self.kappa_sq[i] - 0.5));
            if i + 1 < m - 1 {
                let e = self.log_weight_mid[i] - 0.5 * (self.log_weight[i] + self.log_weight[i + 1]);
                off.push(-e.exp() / (self.spacing[i] * (self.dual[i] * self.dual[i + 1]).sqrt()));
            }
        }
        (diag, off)
    }

    /// Maps interior `ψ` to nodal `φ` (zero on the boundary).
    pub fn from_symmetric(&self, psi: &[f64]) -> Vec<f64> {
        let m = self.nodes.len();
        let mut phi = alloc::vec![0.0; m];
        for i in 1..m - 1 {
            phi[i] = psi[i - 1] / self.dual[i].sqrt() * (-0.5 * self.log_weight[i]).exp();
        }
        phi
    }

    /// Maps nodal `φ` to interior `ψ`.
    pub fn to_symmetric(&self, phi: &[f64]) -> Vec<f64> {
        (1..self.nodes.len() - 1)
            .map(|i| phi[i] * self.dual[i].sqrt() * (0.5 * self.log_weight[i]).exp())
            .collect()
    }
}
