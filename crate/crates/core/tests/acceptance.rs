//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line
//! and then asserts it. Run with
//! `cargo test --release -p conical-mcf-core --test acceptance -- --nocapture`.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use conical_mcf_core::barrier::{check_crossing, check_far_barrier, check_supersolution, BarrierSetup};
use conical_mcf_core::expander::{
    expander_family, outermost_expanders, rotation_family, shoot_expander, solve_expander_for_ray_pair,
    solve_expander_for_ray_pair_with, OutermostResult, PairOptions, PlanarCone, ShootOptions, ShootStart, Side,
};
use conical_mcf_core::geometry::{hausdorff, local_hausdorff, CurveSet, DiscreteCurve, Orientation};
use conical_mcf_core::levelset::{
    barrier_cross_check, evolve_level_set, fattening_gap, init_signed_distance, inner_outer_flows, single_flow,
    uniqueness_pinch, EvolveOptions, FlowParams, FlowRun, GridSpec, Shape, Verdict,
};
use conical_mcf_core::math::PI;
use conical_mcf_core::spectral::{
    appendix_scaling, first_eigenpair, jacobi_field_from_family, WeightedJacobiOperator,
};
use conical_mcf_core::Vec2;
use rand::{Rng, SeedableRng};

const N: usize = 512;

fn report(criterion: u32, checks: &[(&str, bool)], detail: String, started: Instant, limit: Duration) {
    let elapsed = started.elapsed();
    let in_time = elapsed <= limit;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let pass = failed.is_empty() && in_time;
    println!(
        "criterion {criterion}: {} ({:.1}s / {}s) {detail}{}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs(),
        if failed.is_empty() { String::new() } else { format!(" failed: {}", failed.join(", ")) }
    );
    assert!(pass, "criterion {criterion} failed: {failed:?}, in time: {in_time}");
}

fn cross() -> &'static OutermostResult {
    static CELL: OnceLock<OutermostResult> = OnceLock::new();
    CELL.get_or_init(|| outermost_expanders(&PlanarCone::cross()).unwrap())
}

const CROSS_TIMES: [f64; 4] = [0.0625, 0.25, 0.5, 1.0];

/// Outer and inner flows of the cross cone at `N`, shared by criteria 6 and 7.
fn cross_runs() -> &'static (FlowRun, FlowRun) {
    static CELL: OnceLock<(FlowRun, FlowRun)> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = FlowParams::new(GridSpec::centered(4.0, N).unwrap(), CROSS_TIMES.to_vec());
        inner_outer_flows(&Shape::Cone(PlanarCone::cross()), &p).unwrap()
    })
}

/// Gaussian-localised trigonometric bumps in the arclength `s` about `mid`.
fn random_shapes(rng: &mut impl Rng, s: &[f64], mid: f64, localise: bool, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| {
            let modes: Vec<(f64, f64)> = (1..=4).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0 * PI))).collect();
            s.iter()
                .map(|&x| {
                    let y = x - mid;
                    let (freq, envelope) = if localise { (0.5, (-y * y / 8.0).exp()) } else { (1.0, 1.0) };
                    let wave: f64 =
                        modes.iter().enumerate().map(|(k, (a, ph))| a * ((k as f64 + 1.0) * freq * y + ph).cos()).sum();
                    envelope * wave
                })
                .collect()
        })
        .collect()
}

#[test]
fn criterion_1_appendix_scaling() {
    let started = Instant::now();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let lambdas = [0.04, 0.02, 0.01];
    let sigma = &cross().sigma[0].curve;
    let s = sigma.arclength();
    let total = *s.last().unwrap();
    let shapes = random_shapes(&mut rng, &s, 0.5 * total, true, 20);
    let on_sigma = appendix_scaling(sigma, &shapes, &lambdas, true).unwrap();

    let circle = DiscreteCurve::circle(Vec2::ZERO, 1.0, 2000, Orientation::Negative).unwrap();
    let cs = circle.arclength();
    let shapes = random_shapes(&mut rng, &cs, 0.0, false, 20);
    let on_circle = appendix_scaling(&circle, &shapes, &lambdas, false).unwrap();

    let range = |v: &[f64]| v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
    let (c0, c1) = range(&on_circle.curvature_slopes);
    let (e0, e1) = range(&on_sigma.curvature_slopes);
    let (f0, f1) = range(&on_sigma.flow_slopes);
    report(
        1,
        &[("circle lemma slopes", on_circle.within(1.8, 2.2)), ("expander slopes", on_sigma.within(1.8, 2.2))],
        format!("circle curvature slopes [{c0:.3}, {c1:.3}], expander curvature [{e0:.3}, {e1:.3}], flow [{f0:.3}, {f1:.3}]"),
        started,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_2_expander_solver() {
    let started = Instant::now();
    let line = solve_expander_for_ray_pair(0.0, PI, Side::W).unwrap();
    let line_res = line.max_residual();

    let (a, b) = (PI / 6.0, 5.0 * PI / 6.0);
    let from_w = solve_expander_for_ray_pair(a, b, Side::W).unwrap();
    let from_wp = solve_expander_for_ray_pair(b, a, Side::WPrime).unwrap();
    let both = hausdorff(&CurveSet::from_curves([&from_w.curve]), &CurveSet::from_curves([&from_wp.curve]));

    let start = ShootStart::new(Vec2::new(0.0, 1.0), 0.0);
    let run = |h: f64| {
        let o = ShootOptions { step: h, stop_radius: f64::INFINITY, ..ShootOptions::default() };
        shoot_expander(start, 4.0, o).unwrap().final_angle()
    };
    let (t1, t2, t3) = (run(0.08), run(0.04), run(0.02));
    let order = ((t1 - t2).abs() / (t2 - t3).abs()).log2();

    report(
        2,
        &[
            ("line residual", line.is_line() && line_res <= 1e-10),
            ("wedge both sides", both <= 2.0 * from_w.step),
            ("rk4 order", order >= 3.8),
        ],
        format!("line residual {line_res:.2e}, wedge gap {both:.2e} (2h = {:.2e}), order {order:.3}", 2.0 * from_w.step),
        started,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_3_spectral() {
    let started = Instant::now();
    let line = solve_expander_for_ray_pair_with(0.0, PI, Side::W, PairOptions { step: 0.02, ..PairOptions::default() })
        .unwrap();
    let mut mus = Vec::new();
    let mut worst_mu: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    let mut positive = true;
    for r in [2.0, 3.0, 4.0] {
        let op = WeightedJacobiOperator::assemble(&line, r).unwrap();
        let res = first_eigenpair(&op).unwrap();
        let (diag, off) = op.symmetric_form();
        let k = diag.len();
        let m = nalgebra::DMatrix::<f64>::from_fn(k, k, |i, j| {
            if i == j {
                diag[i]
            } else if j == i + 1 {
                off[i]
            } else if i == j + 1 {
                off[j]
            } else {
                0.0
            }
        });
        let oracle = nalgebra::SymmetricEigen::new(m).eigenvalues.min();
        worst_mu = worst_mu.max((res.mu - oracle).abs());
        worst_norm = worst_norm.max((res.normalization - 1.0).abs());
        positive &= res.min_interior() > 0.0;
        mus.push(res.mu);
    }
    let decreasing = mus.windows(2).all(|w| w[1] < w[0]);

    let sigma = &cross().sigma[0];
    let mu_cross = first_eigenpair(&WeightedJacobiOperator::assemble(sigma, 6.0).unwrap()).unwrap().mu;
    report(
        3,
        &[
            ("dense oracle", worst_mu <= 1e-6),
            ("decreasing", decreasing),
            ("interior positive", positive),
            ("normalization", worst_norm <= 1e-8),
            ("cross mu_6 > 0", mu_cross > 0.0),
        ],
        format!("mu(2,3,4) = {mus:.6?}, |dmu| {worst_mu:.1e}, |norm - 1| {worst_norm:.1e}, cross mu_6 {mu_cross:.4}"),
        started,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_4_jacobi_field() {
    let started = Instant::now();
    let opts = PairOptions::default();
    let fam = rotation_family(&PlanarCone::line(0.0), Side::W, (-0.02, 0.02), 5, opts).unwrap();
    let j = jacobi_field_from_family(&fam, 0).unwrap();
    let h = opts.step;
    let v_err = j.curve().nodes().iter().enumerate().map(|(i, p)| (j.v[i] - p.x).abs()).fold(0.0, f64::max);
    let line_ok = j.max_residual <= 10.0 * h * h;

    let fam = expander_family(&PlanarCone::cross(), Side::W, &[1.0; 4], (-0.02, 0.02), 5, opts).unwrap();
    let mut cross_ok = Vec::new();
    let mut min_v = f64::INFINITY;
    for c in 0..fam.base.len() {
        let j = jacobi_field_from_family(&fam, c).unwrap();
        min_v = min_v.min(j.min_v);
        cross_ok.push(j.positive && j.residual_ok() && j.rw_bounded);
    }
    report(
        4,
        &[("line v = x", v_err <= 1e-6 && line_ok), ("cross positive field", cross_ok.iter().all(|x| *x))],
        format!("line |v - x| {v_err:.1e}, residual {:.1e} (10h² = {:.1e}), cross min v {min_v:.4}", j.max_residual, 10.0 * h * h),
        started,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_5_static_barrier() {
    let started = Instant::now();
    let fam =
        expander_family(&PlanarCone::cross(), Side::W, &[1.0; 4], (-0.02, 0.02), 5, PairOptions::default()).unwrap();
    let setup = BarrierSetup::new(jacobi_field_from_family(&fam, 0).unwrap(), 2.0).unwrap();
    let alpha = setup.alpha_search().unwrap().alpha;
    let mut ratios = Vec::new();
    let mut checks = Vec::new();
    for s in [1e-2, 5e-3] {
        let b = setup.build(alpha, s).unwrap();
        let c = check_crossing(&b);
        let sup = check_supersolution(&setup, &b).unwrap();
        checks.push(c.passed() && sup.passed);
        ratios.push(sup.min_f / s);
    }
    let stable = (ratios[0] / ratios[1] - 1.0).abs() <= 0.1;
    report(
        5,
        &[("crossing and supersolution", checks.iter().all(|x| *x)), ("min residual / s stable", stable)],
        format!("alpha {alpha:.4}, min residual / s = {ratios:.5?}"),
        started,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_6_level_set_baseline() {
    let started = Instant::now();
    // Radius law.
    let spec = GridSpec::centered(2.0, N).unwrap();
    let h = spec.spacing();
    let p = FlowParams::new(spec, vec![0.1, 0.25, 0.4]);
    let run = single_flow(&Shape::circle(Vec2::ZERO, 1.0).unwrap(), &p).unwrap();
    let mut radius_err: f64 = 0.0;
    for s in &run.slices {
        let r = (1.0 - 2.0 * s.t).sqrt();
        radius_err = radius_err.max(s.curves.points().map(|q| (q.norm() - r).abs()).fold(0.0, f64::max));
    }

    // Nested initial data stay nested.
    let times = [0.05, 0.1, 0.2];
    let small = init_signed_distance(&Shape::circle(Vec2::new(0.1, 0.0), 0.8).unwrap(), spec, 0.0).unwrap();
    let big = init_signed_distance(&Shape::circle(Vec2::ZERO, 1.0).unwrap(), spec, 0.0).unwrap();
    let a = evolve_level_set(&small, &times, EvolveOptions::default()).unwrap();
    let b = evolve_level_set(&big, &times, EvolveOptions::default()).unwrap();
    let nested = small.values.iter().zip(&big.values).all(|(x, y)| x >= y)
        && a.iter().zip(&b).all(|(fa, fb)| fa.values.iter().zip(&fb.values).all(|(x, y)| x >= y));

    // Scale law on the extrapolated outer cross flow, compared in the
    // frame of t = 1/4 inside B_1.
    let (outer, _) = cross_runs();
    let hc = outer.spacing();
    let base = &outer.front_at(0.25).unwrap().curves;
    let mut scale_err: f64 = 0.0;
    for lambda in [0.5, 2.0] {
        let t = 0.25 * lambda * lambda;
        let scaled = outer.front_at(t).unwrap().curves.map(|q| q / lambda);
        scale_err = scale_err.max(local_hausdorff(&scaled, base, Vec2::ZERO, 1.0));
    }
    report(
        6,
        &[("radius law", radius_err <= 2.0 * h), ("nesting", nested), ("scale law", scale_err <= 3.0 * hc)],
        format!("radius error {radius_err:.2e} (2h = {:.2e}), scale error {scale_err:.2e} (3h = {:.2e})", 2.0 * h, 3.0 * hc),
        started,
        Duration::from_secs(600),
    );
}

fn cone_verdict(cone: PlanarCone) -> (Verdict, f64) {
    let times = [0.25, 0.5, 1.0];
    let p = FlowParams::new(GridSpec::centered(4.0, N).unwrap(), times.to_vec());
    let (o, i) = inner_outer_flows(&Shape::Cone(cone), &p).unwrap();
    let rep = fattening_gap(&o, &i, &times).unwrap();
    (rep.verdict, rep.samples.iter().map(|s| s.gap).fold(0.0, f64::max))
}

#[test]
fn criterion_7_fattening_dichotomy() {
    let started = Instant::now();
    let oracle = cross();
    let (outer, inner) = cross_runs();
    let h = outer.spacing();
    let rep = fattening_gap(outer, inner, &[0.25, 0.5, 1.0]).unwrap();
    let gap1 = rep.samples[2].gap;
    let cross_ok = rep.verdict == Verdict::Fattening && (gap1 - oracle.gap_measure).abs() <= 3.0 * h;

    let (wedge, wedge_gap) = cone_verdict(PlanarCone::wedge(0.5 * PI, 2.0 * PI / 3.0));
    let (line, line_gap) = cone_verdict(PlanarCone::line(0.0));

    let times = [0.0625, 0.125, 0.25];
    let p = FlowParams::new(GridSpec::centered(6.5, N).unwrap(), times.to_vec());
    let h8 = p.grid.spacing();
    let (o8, i8) = inner_outer_flows(&Shape::figure_eight(6.0).unwrap(), &p).unwrap();
    let rep8 = fattening_gap(&o8, &i8, &times).unwrap();
    let r = 0.5;
    let sigma = oracle.curve_set(Side::W).map(|q| q * r);
    let dist8 = local_hausdorff(&o8.front_at(0.25).unwrap().curves, &sigma, Vec2::ZERO, 2.0 * r);

    report(
        7,
        &[
            ("cross fattens", cross_ok),
            ("wedge does not fatten", wedge == Verdict::NonFattening),
            ("line does not fatten", line == Verdict::NonFattening),
            ("figure eight fattens", rep8.verdict == Verdict::Fattening),
            ("figure eight matches sigma", dist8 <= 3.0 * h8),
        ],
        format!(
            "cross gap(1) {gap1:.4} vs {:.4} (3h = {:.3}); wedge max gap {wedge_gap:.2e}, line {line_gap:.2e}; \
             figure eight gaps {:.3?} {:?}, dist at 1/4 {dist8:.4} (3h = {:.3})",
            oracle.gap_measure,
            3.0 * h,
            rep8.samples.iter().map(|s| s.gap).collect::<Vec<_>>(),
            rep8.verdict,
            3.0 * h8
        ),
        started,
        Duration::from_secs(1800),
    );
}

#[test]
fn criterion_8_uniqueness_pinching() {
    let started = Instant::now();
    let (bisector, opening) = (0.5 * PI, 2.0 * PI / 3.0);
    let times: Vec<f64> = (2..=6).rev().map(|k| 0.5f64.powi(k)).collect();
    let p = FlowParams::new(GridSpec::new(Vec2::new(0.0, 5.0), 7.0, N).unwrap(), times.clone());
    let (outer, inner) = inner_outer_flows(&Shape::wedge_corner(bisector, opening, 5.0).unwrap(), &p).unwrap();
    let pinch = uniqueness_pinch(&outer, &inner, &times).unwrap();

    let fam = expander_family(&PlanarCone::wedge(bisector, opening), Side::W, &[1.0; 2], (-0.02, 0.02), 5, PairOptions::default())
        .unwrap();
    let setup = BarrierSetup::new(jacobi_field_from_family(&fam, 0).unwrap(), 2.0).unwrap();
    let cc = barrier_cross_check(&setup, &outer, &inner, 0.8, 2.0).unwrap();
    report(
        8,
        &[("dist/sqrt t halves", pinch.halved), ("between barriers", cc.crossings_ok && cc.contained)],
        format!(
            "dist/sqrt t {:.3?}, change {:.3}, floor reached at {:?}; s = {} (s0 = {}), graph norms <= {:.3}",
            pinch.samples.iter().map(|s| s.dist_over_sqrt_t).collect::<Vec<_>>(),
            pinch.ratio_change,
            pinch.floor_reached_at,
            cc.s,
            cc.s0,
            cc.graph_norms.iter().fold(0.0f64, |m, x| m.max(*x))
        ),
        started,
        Duration::from_secs(1800),
    );
}

#[test]
fn criterion_9_far_barrier() {
    let started = Instant::now();
    let s = 0.1;
    let line = |_t: f64| DiscreteCurve::segment(Vec2::new(-5.0, 3.0), Vec2::new(5.0, 3.0), 201, Orientation::Positive);
    let rep = check_far_barrier(&line, &[0.25, 0.5, 1.0], s, 1.0, Some(0.1)).unwrap();
    let line_err = rep.samples.iter().map(|x| (x.min_residual - s / (2.0 * x.t.sqrt())).abs()).fold(0.0, f64::max);

    let s = 1e-3;
    let circle = |t: f64| DiscreteCurve::circle(Vec2::ZERO, (1.0 - 2.0 * t).sqrt(), 1000, Orientation::Positive);
    let times: Vec<f64> = (1..=40).map(|k| 0.01 * k as f64).collect();
    let rep = check_far_barrier(&circle, &times, s, 0.0, None).unwrap();
    // s/(2√t) = |A|² s√t with |A|² = 1/(1 − 2t) gives t = 1/4.
    let flip = rep.sign_flip_time;
    let flip_ok = flip.is_some_and(|f| (f - 0.25).abs() <= 0.025);
    report(
        9,
        &[("static line exact", line_err <= 1e-10), ("circle sign flip", flip_ok)],
        format!("line error {line_err:.1e}, flip at {flip:?} vs 0.25"),
        started,
        Duration::from_secs(60),
    );
}
