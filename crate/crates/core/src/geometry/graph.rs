use alloc::vec::Vec;

use super::{DiscreteCurve, GeometryError};
use crate::math::{max_of, Real, Vec2};

/// Default admissibility margin: graphs must satisfy `|u||A| < η`.
pub const DEFAULT_ETA: f64 = 0.5;

/// A discrete expander passes the expander check when
/// `max |H - x·ν/2| <= EXPANDER_RESIDUAL_FACTOR · h² · (1 + max|x|)`.
pub const EXPANDER_RESIDUAL_FACTOR: f64 = 10.0;

/// Scalar field over the nodes of a base curve, read as the normal graph
/// `x + u(x) ν(x)`.
#[derive(Clone, Debug)]
pub struct GraphFunction<'a> {
    base: &'a DiscreteCurve,
    values: Vec<f64>,
}

/// Both sides of the mean curvature expansion of a graph at one node.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeanCurvatureTerms {
    /// `v · H_Γ`, measured on the embedded curve.
    pub lhs: f64,
    /// `H_M + Δu + |A|² u`.
    pub rhs: f64,
    pub residual: f64,
}

impl<'a> GraphFunction<'a> {
    pub fn new(base: &'a DiscreteCurve, values: Vec<f64>) -> Result<Self, GeometryError> {
        if values.len() != base.len() {
            return Err(GeometryError::LengthMismatch { values: values.len(), nodes: base.len() });
        }
        Ok(Self { base, values })
    }

    pub fn zero(base: &'a DiscreteCurve) -> Self {
        Self { base, values: alloc::vec![0.0; base.len()] }
    }

    pub fn constant(base: &'a DiscreteCurve, c: f64) -> Self {
        Self { base, values: alloc::vec![c; base.len()] }
    }

    pub fn from_fn(base: &'a DiscreteCurve, f: impl Fn(usize, Vec2) -> f64) -> Self {
        let values = base.nodes().iter().enumerate().map(|(i, &p)| f(i, p)).collect();
        Self { base, values }
    }

    pub fn base(&self) -> &'a DiscreteCurve {
        self.base
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self { base: self.base, values: self.values.iter().map(|v| v * lambda).collect() }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { base: self.base, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// First and second arclength derivatives by three-point differences,
    /// with one-sided closures at the ends of open curves.
    pub fn derivatives(&self) -> (Vec<f64>, Vec<f64>) {
        let d1 = differentiate(self.base, &self.values);
        let d2 = second_derivative(self.base, &self.values);
        (d1, d2)
    }

    /// `σ_0 = Σ_{k≤4} |∇^k u|` at each node.
    pub fn sigma0(&self) -> Vec<f64> {
        let mut total: Vec<f64> = self.values.iter().map(|v| v.abs()).collect();
        let mut current = self.values.clone();
        for _ in 0..4 {
            current = differentiate(self.base, &current);
            for (t, c) in total.iter_mut().zip(&current) {
                *t += c.abs();
            }
        }
        total
    }

    /// Checks `|u||A| < η` at every node.
    pub fn check_admissible(&self, eta: f64) -> Result<(), GeometryError> {
        for (i, (u, g)) in self.values.iter().zip(self.base.geometry()).enumerate() {
            let product = u.abs() * g.curvature.abs();
            if !(product < eta) {
                return Err(GeometryError::Inadmissible { node: i, product, eta });
            }
        }
        Ok(())
    }

    /// The curve `x_i + u_i ν(x_i)` with the base orientation.
    pub fn embed(&self) -> Result<DiscreteCurve, GeometryError> {
        self.check_admissible(DEFAULT_ETA)?;
        self.embed_unchecked()
    }

    pub(crate) fn embed_unchecked(&self) -> Result<DiscreteCurve, GeometryError> {
        let nodes = self
            .base
            .nodes()
            .iter()
            .zip(self.base.geometry())
            .zip(&self.values)
            .map(|((&p, g), &u)| p + g.normal * u)
            .collect();
        DiscreteCurve::new(nodes, self.base.is_closed(), self.base.orientation())
    }

    /// `v = (1 + |(Id - uS)^{-1} ∇u|²)^{1/2}`.
    pub fn speed_factor(&self) -> Result<Vec<f64>, GeometryError> {
        self.check_admissible(DEFAULT_ETA)?;
        let (d1, _) = self.derivatives();
        Ok(self.slopes(&d1).map(|q| (1.0 + q * q).sqrt()).collect())
    }

    /// `ν_Γ = v^{-1}(ν_M - (Id - uS)^{-1} ∇u)`.
    pub fn unit_normal(&self) -> Result<Vec<Vec2>, GeometryError> {
        self.check_admissible(DEFAULT_ETA)?;
        let (d1, _) = self.derivatives();
        Ok(self
            .slopes(&d1)
            .zip(self.base.geometry())
            .map(|(q, g)| (g.normal - g.tangent * q) / (1.0 + q * q).sqrt())
            .collect())
    }

    fn slopes<'s>(&'s self, d1: &'s [f64]) -> impl Iterator<Item = f64> + 's {
        self.values
            .iter()
            .zip(d1)
            .zip(self.base.geometry())
            .map(|((&u, &du), g)| du / (1.0 - u * g.curvature))
    }

    /// Mean curvature of the graph against its linearisation:
    /// `v H_Γ = H_M + Δu + |A|² u + E^H` with `E^H` quadratic in `u`.
    pub fn linearized_mean_curvature(&self) -> Result<Vec<MeanCurvatureTerms>, GeometryError> {
        let v = self.speed_factor()?;
        let embedded = self.embed()?;
        let (_, d2) = self.derivatives();
        Ok((0..self.values.len())
            .map(|i| {
                let g = &self.base.geometry()[i];
                let lhs = v[i] * embedded.curvature(i);
                let rhs = g.curvature + d2[i] + g.curvature * g.curvature * self.values[i];
                MeanCurvatureTerms { lhs, rhs, residual: lhs - rhs }
            })
            .collect())
    }

    /// Geometric evaluation of `v (∂_τ x_Γ - 𝐇 + x_Γ/2)·ν_Γ` for the graph
    /// moving with normal speed `du_dtau`. Positive values certify a
    /// supersolution of the rescaled flow.
    pub fn rescaled_flow_residual(&self, du_dtau: &GraphFunction<'_>) -> Result<Vec<f64>, GeometryError> {
        let tol = expander_tolerance(self.base);
        let max_residual = max_expander_residual(self.base);
        if !(max_residual <= tol) {
            return Err(GeometryError::NotAnExpander { max_residual, tolerance: tol });
        }
        self.rescaled_flow_residual_unchecked(du_dtau)
    }

    /// As [`rescaled_flow_residual`](Self::rescaled_flow_residual) without
    /// the expander check on the base; used for rescaled flow slices.
    pub fn rescaled_flow_residual_unchecked(&self, du_dtau: &GraphFunction<'_>) -> Result<Vec<f64>, GeometryError> {
        if du_dtau.values.len() != self.values.len() {
            return Err(GeometryError::LengthMismatch { values: du_dtau.values.len(), nodes: self.values.len() });
        }
        self.check_admissible(DEFAULT_ETA)?;
        let embedded = self.embed_unchecked()?;
        Ok((0..self.values.len())
            .map(|i| {
                let g = &embedded.geometry()[i];
                let v = 1.0 / g.normal.dot(self.base.normal(i));
                let x = embedded.node(i);
                du_dtau.values[i] + v * (-g.curvature + 0.5 * x.dot(g.normal))
            })
            .collect())
    }
}

/// `H - (x·ν)/2` at every node; vanishes on expanders.
pub fn expander_residual(curve: &DiscreteCurve) -> Vec<f64> {
    curve
        .nodes()
        .iter()
        .zip(curve.geometry())
        .map(|(&x, g)| g.curvature - 0.5 * x.dot(g.normal))
        .collect()
}

pub fn max_expander_residual(curve: &DiscreteCurve) -> f64 {
    max_of(expander_residual(curve).into_iter().map(f64::abs))
}

pub(crate) fn expander_tolerance(curve: &DiscreteCurve) -> f64 {
    let h = max_of(curve.edge_lengths());
    let r = max_of(curve.nodes().iter().map(|p| p.norm()));
    EXPANDER_RESIDUAL_FACTOR * h * h * (1.0 + r)
}

/// First derivative in arclength from the local parabola through three nodes.
pub(crate) fn differentiate(base: &DiscreteCurve, f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let p = base.nodes();
    let closed = base.is_closed();
    let mut out = alloc::vec![0.0; n];
    if n < 3 {
        if n == 2 {
            let d = (f[1] - f[0]) / p[1].dist(p[0]);
            out[0] = d;
            out[1] = d;
        }
        return out;
    }
    for i in 0..n {
        if closed || (i > 0 && i + 1 < n) {
            let (a, b, c) = ((i + n - 1) % n, i, (i + 1) % n);
            let h1 = p[b].dist(p[a]);
            let h2 = p[c].dist(p[b]);
            out[i] = (h1 * h1 * (f[c] - f[b]) + h2 * h2 * (f[b] - f[a])) / (h1 * h2 * (h1 + h2));
        } else {
            let (a, b, c, sign) = if i == 0 { (0, 1, 2, 1.0) } else { (n - 1, n - 2, n - 3, -1.0) };
            let h1 = p[b].dist(p[a]);
            let h2 = p[c].dist(p[b]);
            let d = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * f[a] + (h1 + h2) / (h1 * h2) * f[b]
                - h1 / (h2 * (h1 + h2)) * f[c];
            out[i] = sign * d;
        }
    }
    out
}

/// Second derivative in arclength; four-point one-sided stencils at the ends
/// of open curves.
pub(crate) fn second_derivative(base: &DiscreteCurve, f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let p = base.nodes();
    let closed = base.is_closed();
    let mut out = alloc::vec![0.0; n];
    if n < 3 {
        return out;
    }
    for i in 0..n {
        if closed || (i > 0 && i + 1 < n) {
            let (a, b, c) = ((i + n - 1) % n, i, (i + 1) % n);
            let h1 = p[b].dist(p[a]);
            let h2 = p[c].dist(p[b]);
            out[i] = 2.0 * (h1 * f[c] - (h1 + h2) * f[b] + h2 * f[a]) / (h1 * h2 * (h1 + h2));
        }
    }
    if !closed {
        if n >= 4 {
            let s: Vec<f64> = [0, 1, 2, 3].iter().map(|&k| p[k].dist(p[0])).collect();
            out[0] = lagrange_second(&s, &f[0..4], 0.0);
            let e: Vec<f64> = [n - 1, n - 2, n - 3, n - 4].iter().map(|&k| p[k].dist(p[n - 1])).collect();
            let fe = [f[n - 1], f[n - 2], f[n - 3], f[n - 4]];
            out[n - 1] = lagrange_second(&e, &fe, 0.0);
        } else {
            out[0] = out[1];
            out[n - 1] = out[n - 2];
        }
    }
    out
}

/// Second derivative at `x` of the cubic through four samples.
fn lagrange_second(xs: &[f64], fs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for j in 0..4 {
        let mut denom = 1.0;
        for m in 0..4 {
            if m != j {
                denom *= xs[j] - xs[m];
            }
        }
        // Second derivative of prod_{m != j} (x - x_m).
        let others: Vec<f64> = (0..4).filter(|&m| m != j).map(|m| xs[m]).collect();
        let d2 = 2.0 * ((x - others[0]) + (x - others[1]) + (x - others[2]));
        acc += fs[j] * d2 / denom;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Orientation;
    use crate::math::TAU;

    fn unit_circle(n: usize) -> DiscreteCurve {
        DiscreteCurve::circle(Vec2::ZERO, 1.0, n, Orientation::Negative).unwrap()
    }

    fn x_axis(h: f64, half: usize) -> DiscreteCurve {
        let nodes = (0..=2 * half).map(|i| Vec2::new((i as f64 - half as f64) * h, 0.0)).collect();
        DiscreteCurve::new(nodes, false, Orientation::Positive).unwrap()
    }

    #[test]
    fn zero_graph_embeds_to_base() {
        let c = unit_circle(64);
        assert_eq!(GraphFunction::zero(&c).embed().unwrap().nodes(), c.nodes());
    }

    #[test]
    fn constant_graph_over_circle_is_offset_circle() {
        let c = unit_circle(256);
        let u = GraphFunction::constant(&c, 0.3);
        let e = u.embed().unwrap();
        for (i, p) in e.nodes().iter().enumerate() {
            assert!((p.norm() - 1.3).abs() < 1e-12);
            assert!((e.curvature(i) + 1.0 / 1.3).abs() < 1e-4);
        }
        for v in u.speed_factor().unwrap() {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn inadmissible_graph_names_node() {
        let c = unit_circle(32);
        let mut vals = alloc::vec![0.0; 32];
        vals[7] = 0.6;
        let err = GraphFunction::new(&c, vals).unwrap().embed().unwrap_err();
        assert!(matches!(err, GeometryError::Inadmissible { node: 7, .. }));
    }

    #[test]
    fn speed_factor_over_line() {
        let l = x_axis(0.01, 100);
        let u = GraphFunction::from_fn(&l, |_, p| 0.5 * p.x);
        for v in u.speed_factor().unwrap() {
            assert!((v - 5f64.sqrt() / 2.0).abs() < 1e-12);
        }
        let u = GraphFunction::from_fn(&l, |_, p| p.x);
        let target = Vec2::new(-1.0, 1.0) / 2f64.sqrt();
        for n in u.unit_normal().unwrap() {
            assert!((n - target).norm() < 1e-12);
        }
    }

    #[test]
    fn unit_normal_matches_embedded_normal() {
        let c = unit_circle(6283);
        let u = GraphFunction::from_fn(&c, |_, p| {
            let s = p.angle();
            0.05 * (2.0 * s).cos() + 0.02 * (3.0 * s).sin()
        });
        let normals = u.unit_normal().unwrap();
        let v = u.speed_factor().unwrap();
        let e = u.embed().unwrap();
        for i in 0..c.len() {
            assert!((normals[i] - e.normal(i)).norm() < 1e-6);
            assert!((v[i] - 1.0 / e.normal(i).dot(c.normal(i))).abs() < 1e-6);
        }
    }

    #[test]
    fn sine_graph_curvature_over_line() {
        let l = x_axis(0.005, 400);
        let u = GraphFunction::from_fn(&l, |_, p| 0.1 * p.x.sin());
        let e = u.embed().unwrap();
        for i in 1..l.len() - 1 {
            let x = l.node(i).x;
            let (d1, d2) = (0.1 * x.cos(), -0.1 * x.sin());
            let exact = d2 / (1.0 + d1 * d1).powi(3).sqrt();
            assert!((e.curvature(i) - exact).abs() < 1e-5);
        }
    }

    #[test]
    fn quadratic_graph_linear_term() {
        let l = x_axis(0.01, 100);
        let eps = 1e-3;
        let u = GraphFunction::from_fn(&l, |_, p| eps * p.x * p.x);
        let terms = u.linearized_mean_curvature().unwrap();
        for t in &terms[1..terms.len() - 1] {
            assert!((t.rhs - 2.0 * eps).abs() < 1e-10);
            assert!(t.residual.abs() < 10.0 * eps * eps);
        }
    }

    #[test]
    fn linearization_residual_is_quadratic() {
        let c = unit_circle(2000);
        let shape = GraphFunction::from_fn(&c, |_, p| (2.0 * p.angle()).cos() + 0.5 * p.angle().sin());
        let res = |lambda: f64| max_of(shape.scaled(lambda).linearized_mean_curvature().unwrap().iter().map(|t| t.residual.abs()));
        let lambdas = [0.04, 0.02, 0.01];
        let xs: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
        let ys: Vec<f64> = lambdas.iter().map(|&l| res(l).ln()).collect();
        let slope = crate::math::fit_slope(&xs, &ys);
        assert!((1.8..=2.2).contains(&slope), "slope {slope}");
    }

    #[test]
    fn expander_residual_closed_forms() {
        let l = x_axis(0.1, 20);
        assert!(expander_residual(&l).iter().all(|r| *r == 0.0));
        let c = unit_circle(512);
        // Outward normal: H = -1, x·ν = 1.
        for r in expander_residual(&c) {
            assert!((r + 1.5).abs() < 1e-4);
        }
        let inward = c.with_orientation(Orientation::Positive);
        for r in expander_residual(&inward) {
            assert!((r - 1.5).abs() < 1e-4);
        }
    }

    #[test]
    fn derivative_orders() {
        let c = unit_circle(1000);
        let u = GraphFunction::from_fn(&c, |_, p| (3.0 * p.angle()).sin());
        let (d1, d2) = u.derivatives();
        for (i, p) in c.nodes().iter().enumerate() {
            let t = p.angle();
            // Arclength equals angle on the unit circle (counterclockwise).
            assert!((d1[i] - 3.0 * (3.0 * t).cos()).abs() < 1e-3);
            assert!((d2[i] + 9.0 * (3.0 * t).sin()).abs() < 1e-3);
        }
        let _ = TAU;
    }
}
