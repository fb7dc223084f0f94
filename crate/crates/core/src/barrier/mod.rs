//! Barriers built from an expander's positive Jacobi field and first
//! eigenfunction, with pointwise audits of their sub/supersolution
//! inequalities.
//!
//! The static barrier is the graph over `Σ` of `s·u`, where `u` welds
//! `f = v + αφ_{3R}` on `Σ_R` to the constant `h = max_{∂Σ_R} f` outside
//! `B_{2R}` by taking `min(f, h)` in between. Every inequality is checked
//! by evaluating the geometric rescaled flow residual at the nodes.

mod far;
mod uniqueness;
mod welded;

pub use far::{check_far_barrier, FarBarrierReport, FarSample};
pub use uniqueness::{
    build_uniqueness_barriers, check_between, BetweenSample, UniquenessBarrierPair, UniquenessSample,
};
pub use welded::{
    check_crossing, check_supersolution, AlphaSearch, BarrierSetup, Branch, CrossingCertificate, FailingNode,
    Region, StaticBarrier, SupersolutionReport,
};

use crate::geometry::GeometryError;
use crate::math::Vec2;
use crate::spectral::SpectralError;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum BarrierError {
    #[error("Jacobi field is not positive on Σ (min {min})")]
    JacobiNotPositive { min: f64 },
    #[error("expander is not stable on Σ_3R (μ = {mu})")]
    NotStable { mu: f64 },
    #[error("invalid {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("crossing certificate failed (margins {inner_margin}, {outer_margin}); try a larger R or a smaller alpha")]
    CrossingFailed { inner_margin: f64, outer_margin: f64 },
    #[error("no dyadic s down to {smallest} passes the supersolution audit")]
    NoAdmissibleS { smallest: f64 },
    #[error("delta = {delta} exceeds the admissible limit {limit}")]
    DeltaTooLarge { delta: f64, limit: f64 },
    #[error("rescaled flow at t = {t} is not a graph over Σ_3R near node {node} (norm {norm}, bound {bound})")]
    GraphicalityViolated { t: f64, node: usize, norm: f64, bound: f64 },
    #[error("pseudolocality window violated at t = {t}, x = ({}, {}): {measured} > {eta}", point.x, point.y)]
    EtaViolated { t: f64, point: Vec2, measured: f64, eta: f64 },
    #[error("time grids of the two flows differ")]
    TimeGridMismatch,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;
    use crate::expander::{expander_family, rotation_family, PairOptions, PlanarCone, Side};
    use crate::geometry::{DiscreteCurve, Orientation};
    use crate::math::Real;
    use crate::spectral::jacobi_field_from_family;
    use std::sync::OnceLock;

    fn cross_setup() -> &'static BarrierSetup {
        static SETUP: OnceLock<BarrierSetup> = OnceLock::new();
        SETUP.get_or_init(|| {
            let fam = expander_family(&PlanarCone::cross(), Side::W, &[1.0; 4], (-0.02, 0.02), 5, PairOptions::default())
                .unwrap();
            BarrierSetup::new(jacobi_field_from_family(&fam, 0).unwrap(), 2.0).unwrap()
        })
    }

    #[test]
    fn line_rotation_field_is_rejected() {
        let fam = rotation_family(&PlanarCone::line(0.0), Side::W, (-0.02, 0.02), 5, PairOptions::default()).unwrap();
        let j = jacobi_field_from_family(&fam, 0).unwrap();
        assert!(matches!(BarrierSetup::new(j, 2.0), Err(BarrierError::JacobiNotPositive { .. })));
    }

    #[test]
    fn cross_barrier_is_constant_outside_b4() {
        let setup = cross_setup();
        let a = setup.alpha_search().unwrap();
        assert!(a.alpha > 0.0 && a.alpha < a.alpha_max);
        let b = setup.build(a.alpha, 1e-2).unwrap();
        assert!(check_crossing(&b).passed());
        for (i, p) in setup.sigma().curve.nodes().iter().enumerate() {
            if p.norm() >= 4.0 {
                assert_eq!(b.u[i], b.h);
            }
        }
        // u is continuous: consecutive values differ by at most the
        // variation of f or h across one edge.
        for w in b.u.windows(2) {
            assert!((w[1] - w[0]).abs() < 0.05);
        }
    }

    #[test]
    fn crossing_margin_is_monotone_in_alpha() {
        let setup = cross_setup();
        let at0 = setup.crossing_at(0.0);
        assert!(at0.outer_margin > 0.0);
        assert!(setup.crossing_at(1e6).outer_margin < 0.0);
        assert!(matches!(setup.build(1e6, 1e-2), Err(BarrierError::CrossingFailed { .. })));
    }

    #[test]
    fn large_s_is_inadmissible() {
        let setup = cross_setup();
        let a = setup.alpha_search().unwrap();
        assert!(matches!(setup.build(a.alpha, 10.0), Err(BarrierError::Geometry(_))));
    }

    #[test]
    fn supersolution_residual_is_linear_in_s() {
        let setup = cross_setup();
        let a = setup.alpha_search().unwrap();
        let r1 = check_supersolution(setup, &setup.build(a.alpha, 1e-2).unwrap()).unwrap();
        let r2 = check_supersolution(setup, &setup.build(a.alpha, 5e-3).unwrap()).unwrap();
        assert!(r1.passed && r2.passed);
        let slope = (r1.min_f / r2.min_f).ln() / 2.0f64.ln();
        assert!((0.9..=1.1).contains(&slope), "{slope}");
        // min residual / s approaches α μ min φ over the f region.
        assert!(((r1.min_f / 1e-2) / (r2.min_f / 5e-3) - 1.0).abs() < 0.1);
        assert!(setup.s0_search(a.alpha).unwrap() >= 1e-2);
    }

    #[test]
    fn h_branch_fails_where_curvature_is_large() {
        let setup = cross_setup();
        let a = setup.alpha_search().unwrap();
        let mut b = setup.build(a.alpha, 1e-2).unwrap();
        let curve = &setup.sigma().curve;
        let k = curve.curvature(setup.sigma().vertex);
        // The h branch residual is about (1/2 − κ²) s h, so forcing the
        // constant piece onto the whole curve fails exactly where κ² > 1/2.
        for r in b.regions.iter_mut() {
            *r = Region::Outer;
        }
        let rep = check_supersolution(setup, &b).unwrap();
        if k * k > 0.5 {
            assert!(!rep.passed);
            assert!(rep.failing.iter().all(|f| f.branch == Branch::H && curve.curvature(f.index).powi(2) > 0.45));
        } else {
            assert!(rep.passed);
        }
    }

    #[test]
    fn static_line_far_barrier_is_exact() {
        let s = 0.1;
        let line = |_t: f64| DiscreteCurve::segment(Vec2::new(-5.0, 3.0), Vec2::new(5.0, 3.0), 201, Orientation::Positive);
        let rep = check_far_barrier(&line, &[0.25, 0.5, 1.0], s, 1.0, Some(0.1)).unwrap();
        assert!(rep.passed);
        for smp in &rep.samples {
            assert!((smp.min_residual - s / (2.0 * smp.t.sqrt())).abs() < 1e-10);
        }
    }

    #[test]
    fn shrinking_circle_far_barrier_flips_sign() {
        let s = 1e-3;
        let circle = |t: f64| DiscreteCurve::circle(Vec2::ZERO, (1.0 - 2.0 * t).sqrt(), 1000, Orientation::Positive);
        let times: std::vec::Vec<f64> = (1..=40).map(|k| 0.01 * k as f64).collect();
        let rep = check_far_barrier(&circle, &times, s, 0.0, None).unwrap();
        assert!(!rep.passed);
        let flip = rep.sign_flip_time.unwrap();
        assert!((flip - 0.25).abs() < 0.025, "{flip}");
        let r = check_far_barrier(&circle, &[0.1], s, 0.0, Some(1e-3));
        assert!(matches!(r, Err(BarrierError::EtaViolated { .. })));
    }

    #[test]
    fn self_similar_reference_reduces_to_static_barrier() {
        let setup = cross_setup();
        let a = setup.alpha_search().unwrap();
        let b = setup.build(a.alpha, 1e-2).unwrap();
        let sigma = crate::geometry::CurveSet::from_curves([&setup.sigma().curve]);
        let slices: std::vec::Vec<(f64, crate::geometry::CurveSet)> =
            [0.25, 0.5].iter().map(|&t: &f64| (t, sigma.map(|p| p * t.sqrt()))).collect();
        let pair = build_uniqueness_barriers(setup, &b, &slices, 0.1).unwrap();
        for smp in &pair.samples {
            assert!(smp.graph_norm < 1e-9);
            assert!(smp.crossing_ok(), "{:?}", smp.crossing);
            assert!((smp.crossing[1] - 1e-2 * b.crossing.inner_margin).abs() < 1e-6);
        }
        let between = check_between(setup, &b, &pair, &slices, 6.0).unwrap();
        assert!(between.iter().all(|x| x.contained));
        // A front shifted beyond the band is caught.
        let shifted: std::vec::Vec<_> = slices.iter().map(|(t, c)| (*t, c.map(|p| p + Vec2::new(0.2, 0.2) * t.sqrt()))).collect();
        let between = check_between(setup, &b, &pair, &shifted, 6.0).unwrap();
        assert!(between.iter().all(|x| !x.contained));
        assert!(matches!(
            build_uniqueness_barriers(setup, &b, &slices, 5.0),
            Err(BarrierError::DeltaTooLarge { .. })
        ));
    }
}
