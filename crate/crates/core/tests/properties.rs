//! Property tests of the invariants each module promises.

use conical_mcf_core::expander::{shoot_expander, solve_expander_for_ray_pair, PlanarCone, ShootOptions, ShootStart, Side};
use conical_mcf_core::geometry::{
    expander_residual, hausdorff, CurveSet, DiscreteCurve, GraphFunction, Orientation,
};
use conical_mcf_core::levelset::{
    evolve_level_set, extract_front, init_signed_distance, EvolveOptions, GridSpec, Shape,
};
use conical_mcf_core::math::{PI, TAU};
use conical_mcf_core::spectral::{first_eigenpair, WeightedJacobiOperator};
use conical_mcf_core::Vec2;
use proptest::prelude::*;

/// `r(θ) = 1 + a cos(kθ + φ)`, a smooth star-shaped closed curve.
fn wobbly(n: usize, a: f64, k: u32, phase: f64, o: Orientation) -> DiscreteCurve {
    let nodes = (0..n)
        .map(|i| {
            let t = TAU * i as f64 / n as f64;
            Vec2::from_angle(t) * (1.0 + a * (k as f64 * t + phase).cos())
        })
        .collect();
    DiscreteCurve::new(nodes, true, o).unwrap()
}

fn ellipse(n: usize, a: f64, b: f64) -> DiscreteCurve {
    let nodes = (0..n).map(|i| {
        let t = TAU * i as f64 / n as f64;
        Vec2::new(a * t.cos(), b * t.sin())
    });
    DiscreteCurve::new(nodes.collect(), true, Orientation::Positive).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn flipping_orientation_negates_normal_and_curvature(a in 0.0f64..0.3, k in 2u32..6, phase in 0.0f64..TAU) {
        let c = wobbly(400, a, k, phase, Orientation::Positive);
        let f = c.with_orientation(Orientation::Negative);
        prop_assert_eq!(c.nodes(), f.nodes());
        for i in 0..c.len() {
            prop_assert!((c.normal(i) + f.normal(i)).norm() < 1e-12);
            prop_assert!((c.curvature(i) + f.curvature(i)).abs() < 1e-9);
        }
        let g = GraphFunction::from_fn(&c, |_, p| 0.01 * p.x);
        let h = GraphFunction::from_fn(&f, |_, p| -0.01 * p.x);
        let (ga, gb) = (g.embed().unwrap(), h.embed().unwrap());
        for (p, q) in ga.nodes().iter().zip(gb.nodes()) {
            prop_assert!(p.dist(*q) < 1e-12);
        }
    }

    #[test]
    fn speed_factor_inverts_normal_cosine(amp in 0.01f64..0.05, k in 1u32..5, phase in 0.0f64..TAU) {
        let c = wobbly(800, 0.1, 3, 0.0, Orientation::Positive);
        let h = c.length() / c.len() as f64;
        let g = GraphFunction::from_fn(&c, |i, _| amp * (k as f64 * TAU * i as f64 / 800.0 + phase).sin());
        let v = g.speed_factor().unwrap();
        let nu = g.unit_normal().unwrap();
        for i in 0..c.len() {
            let expected = 1.0 / nu[i].dot(c.normal(i));
            prop_assert!((v[i] - expected).abs() <= 50.0 * h * h, "{} {}", v[i], expected);
        }
    }

    #[test]
    fn mesh_refinement_is_second_order(a in 1.0f64..2.0, b in 0.5f64..1.0) {
        let exact = |p: Vec2| a * b / ((b * p.x / a).powi(2) + (a * p.y / b).powi(2)).powf(1.5);
        let err = |n: usize| {
            let c = ellipse(n, a, b);
            (0..n).map(|i| (c.curvature(i).abs() - exact(c.node(i))).abs()).fold(0.0, f64::max)
        };
        let order = (err(200) / err(400)).log2();
        prop_assert!(order >= 1.9, "{order}");
    }

    #[test]
    fn shooting_commutes_with_reflection(y in 0.3f64..2.0, angle in -0.5f64..0.5) {
        let opts = ShootOptions::default();
        let a = shoot_expander(ShootStart::new(Vec2::new(0.0, y), angle), 30.0, opts).unwrap();
        let b = shoot_expander(ShootStart::new(Vec2::new(0.0, y), PI - angle), 30.0, opts).unwrap();
        prop_assert_eq!(a.points.len(), b.points.len());
        for (p, q) in a.points.iter().zip(&b.points) {
            prop_assert!((p.x + q.x).abs() < 1e-11 && (p.y - q.y).abs() < 1e-11);
        }
    }

    #[test]
    fn eigenpairs_are_converged_positive_and_normalized(r in 2.0f64..5.0) {
        let line = solve_expander_for_ray_pair(0.0, PI, Side::W).unwrap();
        let op = WeightedJacobiOperator::assemble(&line, r).unwrap();
        let res = first_eigenpair(&op).unwrap();
        prop_assert!(res.residual <= 1e-8);
        prop_assert!(res.min_interior() > 0.0);
        prop_assert!((res.normalization - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn circle_front_matches_radius(cx in -0.3f64..0.3, cy in -0.3f64..0.3, r in 0.4f64..1.0) {
        let spec = GridSpec::centered(2.2, 128).unwrap();
        let c = Vec2::new(cx, cy);
        let field = init_signed_distance(&Shape::circle(c, r).unwrap(), spec, 0.0).unwrap();
        let front = extract_front(&field);
        prop_assert_eq!(front.polylines.len(), 1);
        prop_assert!(front.polylines[0].1);
        let h = spec.spacing();
        for p in front.points() {
            prop_assert!((p.dist(c) - r).abs() <= 0.05 * h);
        }
    }

    #[test]
    fn polygon_distance_is_lipschitz(a in 0.2f64..0.4, k in 2u32..5, phase in 0.0f64..TAU) {
        let curve = wobbly(600, a, k, phase, Orientation::Positive);
        let shape = Shape::from_curve(&curve).unwrap();
        let spec = GridSpec::centered(2.0, 40).unwrap();
        let h = spec.spacing();
        let d = shape.signed_distance_grid(&spec, 10.0);
        for j in 0..spec.n {
            for i in 0..spec.n - 1 {
                prop_assert!((d[spec.index(i + 1, j)] - d[spec.index(i, j)]).abs() <= h * (1.0 + 1e-9));
            }
        }
        prop_assert!(shape.signed_distance(Vec2::ZERO) < 0.0);
    }

    #[test]
    fn cone_distance_sign_matches_membership(x in -3.0f64..3.0, y in -3.0f64..3.0, bis in -3.0f64..3.0, open in 0.3f64..2.8) {
        let cone = PlanarCone::wedge(bis, open);
        let p = Vec2::new(x, y);
        let d = cone.signed_distance(p);
        prop_assert_eq!(d < 0.0, cone.contains(p) && d != 0.0);
        prop_assert!((d.abs() - cone.distance(p)).abs() < 1e-12);
    }

    #[test]
    fn hausdorff_is_a_metric(pts in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 3..12), shift in 0.0f64..1.0) {
        let a: Vec<Vec2> = pts.iter().map(|&(x, y)| Vec2::new(x, y)).collect();
        let b: Vec<Vec2> = a.iter().map(|p| *p + Vec2::new(shift, 0.0)).collect();
        let c: Vec<Vec2> = a.iter().map(|p| *p * 0.5).collect();
        let set = |v: &Vec<Vec2>| { let mut s = CurveSet::new(); s.push(v.clone(), false); s };
        let (sa, sb, sc) = (set(&a), set(&b), set(&c));
        prop_assert!(hausdorff(&sa, &sa) <= 1e-12);
        prop_assert!((hausdorff(&sa, &sb) - hausdorff(&sb, &sa)).abs() < 1e-12);
        prop_assert!(hausdorff(&sa, &sb) <= shift + 1e-12);
        prop_assert!(hausdorff(&sa, &sc) <= hausdorff(&sa, &sb) + hausdorff(&sb, &sc) + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn expanders_decay_and_scaling_breaks_them(open in 1.2f64..2.9, lambda in prop_oneof![0.5f64..0.9, 1.1f64..2.0]) {
        let (a, b) = (0.5 * PI - 0.5 * open, 0.5 * PI + 0.5 * open);
        let e = solve_expander_for_ray_pair(a, b, Side::W).unwrap();
        prop_assert!(e.decay_is_decreasing());
        let v = e.vertex;
        let x = e.curve.node(v);
        let half = 0.5 * x.dot(e.curve.normal(v));
        let scaled = e.curve.scaled(lambda).unwrap();
        let res = expander_residual(&scaled)[v];
        // H and x·ν scale by 1/λ and λ, so the residual is about (1/λ − λ) x·ν/2.
        prop_assert!(res.signum() == (half * (1.0 / lambda - lambda)).signum(), "{res} {half}");
    }

    #[test]
    fn nested_initial_data_stay_nested(dx in -0.2f64..0.2, dy in -0.2f64..0.2, shrink in 0.5f64..0.9) {
        let spec = GridSpec::centered(2.0, 64).unwrap();
        let big = init_signed_distance(&Shape::circle(Vec2::ZERO, 0.9).unwrap(), spec, 0.0).unwrap();
        let small =
            init_signed_distance(&Shape::circle(Vec2::new(dx, dy), 0.9 * shrink - dx.hypot(dy)).unwrap(), spec, 0.0).unwrap();
        let times = [0.02, 0.05];
        let a = evolve_level_set(&small, &times, EvolveOptions::default()).unwrap();
        let b = evolve_level_set(&big, &times, EvolveOptions::default()).unwrap();
        for (fa, fb) in a.iter().zip(&b) {
            prop_assert!(fa.values.iter().zip(&fb.values).all(|(x, y)| x >= y));
        }
    }

    #[test]
    fn whole_cell_translation_commutes(si in -4i32..4, sj in -4i32..4) {
        let spec = GridSpec::centered(2.0, 64).unwrap();
        let h = spec.spacing();
        let shift = Vec2::new(si as f64 * h, sj as f64 * h);
        let run = |c: Vec2| {
            let f = init_signed_distance(&Shape::from_curve(&wobbly(800, 0.15, 3, 0.0, Orientation::Positive).map_points(|p| p * 0.7 + c).unwrap()).unwrap(), spec, 0.0).unwrap();
            extract_front(&evolve_level_set(&f, &[0.03], EvolveOptions::default()).unwrap()[0])
        };
        let moved = run(Vec2::ZERO).map(|p| p + shift);
        prop_assert!(hausdorff(&moved, &run(shift)) <= 1e-9);
    }
}
