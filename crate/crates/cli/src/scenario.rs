use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use conical_mcf_core::barrier::{check_crossing, check_supersolution, BarrierSetup};
use conical_mcf_core::expander::{expander_family, outermost_expanders_with, ExpanderCurve, OutermostResult, PlanarCone, Side};
use conical_mcf_core::geometry::{DiscreteCurve, Orientation};
use conical_mcf_core::levelset::{
    barrier_cross_check, fattening_gap, inner_outer_flows, offset_flow, rescaled_convergence, uniqueness_pinch,
    FlowRun, Provenance, Shape, Verdict,
};
use conical_mcf_core::spectral::{appendix_scaling, eigenvalue_curve, jacobi_field_from_family};
use conical_mcf_core::Vec2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ScenarioConfig, ScenarioKind};
use crate::io::export_expander;
use crate::report::{at_time, FrontRecord, ScenarioReport, Status, Table};
use crate::{CliError, ModuleError};

/// A report together with the expanders it was measured against.
#[derive(Clone, Debug)]
pub struct ScenarioOutput {
    pub report: ScenarioReport,
    pub expanders: Vec<(String, ExpanderCurve)>,
}

impl ScenarioOutput {
    /// Writes the report, its tables and the expander curves into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        let mut written = self.report.write(dir)?;
        for (stem, e) in &self.expanders {
            written.extend(export_expander(e, dir, stem)?);
        }
        Ok(written)
    }
}

/// Half-width of the cone perturbation used for Jacobi fields.
const FAMILY_RANGE: (f64, f64) = (-0.02, 0.02);
const FAMILY_MEMBERS: usize = 5;
/// Allowed spread of `min residual / s` across barrier heights.
const RATIO_SPREAD: f64 = 0.1;
const SLOPE_RANGE: (f64, f64) = (1.8, 2.2);

struct Ctx {
    scenario: ScenarioKind,
}

impl Ctx {
    fn err<E: Into<ModuleError>>(&self, stage: &'static str) -> impl FnOnce(E) -> CliError + '_ {
        move |e| CliError::Scenario { scenario: self.scenario.name(), stage, source: e.into() }
    }
}

/// Runs one scenario. Outputs depend only on the config (and files it
/// names, resolved against `base_dir`).
pub fn run_scenario(cfg: &ScenarioConfig, base_dir: &Path) -> Result<ScenarioOutput, CliError> {
    cfg.validate()?;
    let mut out = ScenarioOutput { report: ScenarioReport::new(cfg), expanders: Vec::new() };
    let ctx = Ctx { scenario: cfg.scenario };
    match cfg.scenario {
        ScenarioKind::Dichotomy => dichotomy(cfg, base_dir, &ctx, &mut out)?,
        ScenarioKind::Structure => structure(cfg, base_dir, &ctx, &mut out)?,
        ScenarioKind::Uniqueness => uniqueness(cfg, base_dir, &ctx, &mut out)?,
        ScenarioKind::BarrierAudit => barrier_audit(cfg, &ctx, &mut out)?,
        ScenarioKind::AppendixValidation => appendix_validation(cfg, &ctx, &mut out)?,
    }
    Ok(out)
}

fn oracle(cfg: &ScenarioConfig, cone: &PlanarCone, ctx: &Ctx) -> Result<OutermostResult, CliError> {
    outermost_expanders_with(cone, cfg.expander.pair_options()).map_err(ctx.err("outermost_expanders"))
}

fn push_fronts(report: &mut ScenarioReport, run: &FlowRun, label: &str) {
    for s in &run.slices {
        report.fronts.push(FrontRecord::new(label, s.t, &s.curves));
    }
}

fn keep_expanders(out: &mut ScenarioOutput, o: &OutermostResult) {
    for side in [Side::W, Side::WPrime] {
        let tag = if side == Side::W { "sigma" } else { "sigma_prime" };
        for (k, e) in o.curves(side).iter().enumerate() {
            out.expanders.push((format!("expander_{tag}_{k}"), e.clone()));
        }
    }
}

fn dichotomy(cfg: &ScenarioConfig, base: &Path, ctx: &Ctx, out: &mut ScenarioOutput) -> Result<(), CliError> {
    let shape = cfg.shape.to_shape(base)?;
    let params = cfg.flow_params()?;
    let (outer, inner) = inner_outer_flows(&shape, &params).map_err(ctx.err("inner_outer_flows"))?;
    let gap = fattening_gap(&outer, &inner, &cfg.times).map_err(ctx.err("fattening_gap"))?;
    let r = &mut out.report;
    let src = "levelset::fattening_gap";
    let mut table = Table::new("gap", src, &["t", "gap", "gap_over_sqrt_t"]);
    for s in &gap.samples {
        table.push(vec![s.t, s.gap, s.gap_over_sqrt_t]);
        r.metric(at_time("gap", s.t), s.gap, src);
    }
    r.tables.push(table);
    r.metric("spacing", gap.spacing, src);
    r.metric("fattens", f64::from(u8::from(gap.verdict == Verdict::Fattening)), src);
    r.metric("nesting_violation", outer.nesting_violation.max(inner.nesting_violation), "levelset::inner_outer_flows");
    r.status = if gap.verdict == Verdict::Inconclusive { Status::Inconclusive } else { Status::Pass };
    r.summary = format!("verdict {:?}", gap.verdict);

    if let Some(cone) = cfg.shape.cone()? {
        let o = oracle(cfg, &cone, ctx)?;
        let r = &mut out.report;
        let src = "expander::outermost_expanders";
        r.metric("expander_gap_measure", o.gap_measure, src);
        r.metric("expander_fattens", f64::from(u8::from(o.fattens)), src);
        let outer_fit = rescaled_convergence(&outer, &o.curve_set(Side::W), cfg.rho);
        let inner_fit = rescaled_convergence(&inner, &o.curve_set(Side::WPrime), cfg.rho);
        let mut table = Table::new(
            "expander_match",
            "levelset::rescaled_convergence against expander::outermost_expanders",
            &["t", "gap_over_sqrt_t", "gap_measure", "outer_vs_sigma", "inner_vs_sigma_prime", "floor"],
        );
        for ((g, a), b) in gap.samples.iter().zip(&outer_fit.samples).zip(&inner_fit.samples) {
            table.push(vec![g.t, g.gap_over_sqrt_t, o.gap_measure, a.distance, b.distance, a.floor]);
        }
        r.tables.push(table);
        let decisive = gap.verdict != Verdict::Inconclusive;
        if decisive && (gap.verdict == Verdict::Fattening) != o.fattens {
            r.status = Status::Fail;
            r.summary.push_str("; disagrees with the expander oracle");
        }
        keep_expanders(out, &o);
    }

    if let Shape::Circle { center, radius } = shape {
        let r = &mut out.report;
        let src = "levelset::inner_outer_flows (outer, extrapolated)";
        let mut table = Table::new("radius_law", src, &["t", "radius", "max_error"]);
        let mut worst: f64 = 0.0;
        for s in &outer.slices {
            let sq = radius * radius - 2.0 * s.t;
            if sq <= 0.0 {
                continue;
            }
            let rt = sq.sqrt();
            let err = s.curves.points().map(|p| (p.dist(center) - rt).abs()).fold(0.0, f64::max);
            worst = worst.max(err);
            table.push(vec![s.t, rt, err]);
            r.metric(at_time("radius_law_error", s.t), err, src);
        }
        r.tables.push(table);
        r.metric("radius_law_error", worst, src);
    }
    push_fronts(&mut out.report, &outer, "outer");
    push_fronts(&mut out.report, &inner, "inner");
    Ok(())
}

fn structure(cfg: &ScenarioConfig, base: &Path, ctx: &Ctx, out: &mut ScenarioOutput) -> Result<(), CliError> {
    let shape = cfg.shape.to_shape(base)?;
    let cone = cfg.shape.cone()?.expect("validated");
    let o = oracle(cfg, &cone, ctx)?;
    let outer = offset_flow(&shape, &cfg.flow_params()?, Provenance::Outer).map_err(ctx.err("offset_flow"))?;
    let conv = rescaled_convergence(&outer, &o.curve_set(Side::W), cfg.rho);
    let r = &mut out.report;
    let src = "levelset::rescaled_convergence";
    let mut table = Table::new("rescaled_convergence", src, &["t", "distance", "floor"]);
    for s in &conv.samples {
        table.push(vec![s.t, s.distance, s.floor]);
        r.metric(at_time("rescaled_distance", s.t), s.distance, src);
    }
    r.tables.push(table);
    r.metric("monotone", f64::from(u8::from(conv.monotone)), src);
    r.status = if conv.monotone { Status::Pass } else { Status::Inconclusive };
    r.summary = format!("rescaled convergence in B_{} {}", cfg.rho, if conv.monotone { "monotone" } else { "not monotone" });
    push_fronts(r, &outer, "outer");
    keep_expanders(out, &o);
    Ok(())
}

fn barrier_setup(cfg: &ScenarioConfig, cone: &PlanarCone, ctx: &Ctx) -> Result<BarrierSetup, CliError> {
    let weights = vec![1.0; cone.ray_count()];
    let fam = expander_family(cone, Side::W, &weights, FAMILY_RANGE, FAMILY_MEMBERS, cfg.expander.pair_options())
        .map_err(ctx.err("expander_family"))?;
    let j = jacobi_field_from_family(&fam, 0).map_err(ctx.err("jacobi_field_from_family"))?;
    BarrierSetup::new(j, cfg.spectral.radius).map_err(ctx.err("barrier_setup"))
}

fn uniqueness(cfg: &ScenarioConfig, base: &Path, ctx: &Ctx, out: &mut ScenarioOutput) -> Result<(), CliError> {
    let shape = cfg.shape.to_shape(base)?;
    let (outer, inner) = inner_outer_flows(&shape, &cfg.flow_params()?).map_err(ctx.err("inner_outer_flows"))?;
    let pinch = uniqueness_pinch(&outer, &inner, &cfg.times).map_err(ctx.err("uniqueness_pinch"))?;
    let cone = cfg.shape.cone()?.expect("validated");
    let setup = barrier_setup(cfg, &cone, ctx)?;
    let cc = barrier_cross_check(&setup, &outer, &inner, cfg.barrier.delta, cfg.barrier.rho)
        .map_err(ctx.err("barrier_cross_check"))?;

    let r = &mut out.report;
    let src = "levelset::uniqueness_pinch";
    let mut table = Table::new("pinch", src, &["t", "dist", "dist_over_sqrt_t"]);
    for s in &pinch.samples {
        table.push(vec![s.t, s.dist, s.dist_over_sqrt_t]);
        r.metric(at_time("pinch_ratio", s.t), s.dist_over_sqrt_t, src);
    }
    r.tables.push(table);
    r.metric("ratio_change", pinch.ratio_change, src);
    r.metric("halved", f64::from(u8::from(pinch.halved)), src);
    if let Some(t) = pinch.floor_reached_at {
        r.metric("floor_reached_at", t, src);
    }
    let src = "levelset::barrier_cross_check";
    let mut table = Table::new("between", src, &["t", "graph_norm", "max_violation", "min_half_width", "contained"]);
    for (b, g) in cc.between.iter().zip(&cc.graph_norms) {
        table.push(vec![b.t, *g, b.max_violation, b.min_half_width, f64::from(u8::from(b.contained))]);
    }
    r.tables.push(table);
    r.metric("alpha", cc.alpha, src);
    r.metric("s0", cc.s0, src);
    r.metric("s", cc.s, src);
    let contained = cc.contained && cc.crossings_ok;
    r.metric("contained", f64::from(u8::from(contained)), src);
    r.status = match (pinch.halved, contained) {
        (true, true) => Status::Pass,
        (_, false) => Status::Fail,
        (false, true) if pinch.floor_reached_at.is_some() => Status::Inconclusive,
        (false, true) => Status::Fail,
    };
    r.summary = format!(
        "dist/sqrt(t) change {:.3}, floor reached at {:?}, fronts {} the barriers at s = {}",
        pinch.ratio_change,
        pinch.floor_reached_at,
        if contained { "between" } else { "not between" },
        cc.s
    );
    push_fronts(r, &outer, "outer");
    push_fronts(r, &inner, "inner");
    Ok(())
}

fn barrier_audit(cfg: &ScenarioConfig, ctx: &Ctx, out: &mut ScenarioOutput) -> Result<(), CliError> {
    let cone = cfg.shape.cone()?.expect("validated");
    let setup = barrier_setup(cfg, &cone, ctx)?;
    let curve = eigenvalue_curve(setup.sigma(), &cfg.spectral.radii).map_err(ctx.err("eigenvalue_curve"))?;
    let search = setup.alpha_search().map_err(ctx.err("alpha_search"))?;
    let alpha = match cfg.barrier.alpha_bounds {
        Some([lo, hi]) => search.alpha.clamp(lo, hi),
        None => search.alpha,
    };
    let r = &mut out.report;
    let src = "spectral::eigenvalue_curve";
    let mut table = Table::new("eigenvalues", src, &["radius", "mu"]);
    for &(radius, mu) in &curve.samples {
        table.push(vec![radius, mu]);
        r.metric(format!("mu@R={radius}"), mu, src);
    }
    r.tables.push(table);
    r.metric("mu_monotone", f64::from(u8::from(curve.is_monotone())), src);
    r.metric("alpha_max", search.alpha_max, "barrier::alpha_search");
    r.metric("alpha", alpha, "barrier::alpha_search");

    let src = "barrier::check_crossing, barrier::check_supersolution";
    let mut table =
        Table::new("supersolution", src, &["s", "inner_margin", "outer_margin", "min_f", "min_h", "min_f_over_s", "passed"]);
    let mut all_passed = true;
    let mut ratios = Vec::new();
    for &s in &cfg.barrier.s {
        let b = setup.build(alpha, s).map_err(ctx.err("build"))?;
        let c = check_crossing(&b);
        let sup = check_supersolution(&setup, &b).map_err(ctx.err("check_supersolution"))?;
        let passed = c.passed() && sup.passed;
        all_passed &= passed;
        ratios.push(sup.min_f / s);
        table.push(vec![s, c.inner_margin, c.outer_margin, sup.min_f, sup.min_h, sup.min_f / s, f64::from(u8::from(passed))]);
    }
    r.tables.push(table);
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
    let spread = if ratios.is_empty() { 0.0 } else { hi / lo - 1.0 };
    r.metric("ratio_spread", spread, src);
    let s0 = setup.s0_search(alpha).map_err(ctx.err("s0_search"))?;
    r.metric("s0", s0, "barrier::s0_search");
    let stable = spread.abs() <= RATIO_SPREAD;
    r.status = if all_passed && stable { Status::Pass } else { Status::Fail };
    r.summary = format!("alpha {alpha:.4}, s0 {s0}, ratio spread {spread:.3}");
    out.expanders.push(("expander_sigma_0".into(), setup.sigma().clone()));
    Ok(())
}

/// Smooth random functions of arclength: four cosine modes with random
/// amplitudes and phases, damped by a Gaussian about `mid` if `localise`.
pub fn random_graphs(rng: &mut impl Rng, s: &[f64], mid: f64, localise: bool, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| {
            let modes: Vec<(f64, f64)> = (1..=4).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.0..TAU))).collect();
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

fn appendix_validation(cfg: &ScenarioConfig, ctx: &Ctx, out: &mut ScenarioOutput) -> Result<(), CliError> {
    let cone = cfg.shape.cone()?.unwrap_or_else(PlanarCone::cross);
    let o = oracle(cfg, &cone, ctx)?;
    let sigma = o.sigma.iter().find(|e| !e.is_line()).unwrap_or(&o.sigma[0]);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let a = &cfg.appendix;
    let s = sigma.curve.arclength();
    let total = *s.last().expect("expanders have nodes");
    let shapes = random_graphs(&mut rng, &s, 0.5 * total, true, a.count);
    let on_sigma = appendix_scaling(&sigma.curve, &shapes, &a.lambdas, true).map_err(ctx.err("appendix_scaling"))?;

    let nodes = ((TAU / cfg.expander.step).round() as usize).max(64);
    let circle = DiscreteCurve::circle(Vec2::ZERO, 1.0, nodes, Orientation::Negative)
        .map_err(ctx.err("circle"))?;
    let cs = circle.arclength();
    let shapes = random_graphs(&mut rng, &cs, 0.0, false, a.count);
    let on_circle = appendix_scaling(&circle, &shapes, &a.lambdas, false).map_err(ctx.err("appendix_scaling"))?;

    let r = &mut out.report;
    let src = "spectral::appendix_scaling";
    let mut table = Table::new("circle_slopes", src, &["index", "curvature_slope"]);
    for (k, v) in on_circle.curvature_slopes.iter().enumerate() {
        table.push(vec![k as f64, *v]);
    }
    r.tables.push(table);
    let mut table = Table::new("expander_slopes", src, &["index", "curvature_slope", "flow_slope"]);
    for (k, (c, f)) in on_sigma.curvature_slopes.iter().zip(&on_sigma.flow_slopes).enumerate() {
        table.push(vec![k as f64, *c, *f]);
    }
    r.tables.push(table);
    let all: Vec<f64> = on_circle.curvature_slopes.iter().chain(&on_sigma.curvature_slopes).chain(&on_sigma.flow_slopes).copied().collect();
    let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    r.metric("min_slope", lo, src);
    r.metric("max_slope", hi, src);
    let ok = on_circle.within(SLOPE_RANGE.0, SLOPE_RANGE.1) && on_sigma.within(SLOPE_RANGE.0, SLOPE_RANGE.1);
    r.status = if ok { Status::Pass } else { Status::Fail };
    r.summary = format!("slopes in [{lo:.3}, {hi:.3}] at step {}", cfg.expander.step);
    out.expanders.push(("expander_base".into(), sigma.clone()));
    Ok(())
}
