use std::path::Path;
use std::process::Command;

use conical_mcf::config::{ScenarioConfig, ScenarioKind, ShapeSpec};
use conical_mcf::io::{curve_set_from_records, read_curve_file, ExpanderSidecar};
use conical_mcf::{compare_reports, export_fronts, run_scenario, CliError, ScenarioReport, Status};
use conical_mcf_core::geometry::hausdorff;

fn level_set(kind: ScenarioKind, shape: ShapeSpec, half_width: f64, n: usize, times: &[f64]) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(kind, shape);
    cfg.grid.half_width = half_width;
    cfg.grid.n = n;
    cfg.times = times.to_vec();
    cfg
}

fn metric(r: &ScenarioReport, name: &str) -> f64 {
    r.metrics.get(name).unwrap_or_else(|| panic!("no metric {name}")).value
}

#[test]
fn line_does_not_fatten_and_runs_are_deterministic() {
    let cfg = level_set(ScenarioKind::Dichotomy, ShapeSpec::Line { angle: 0.3 }, 2.0, 64, &[0.25, 0.5, 1.0]);
    let a = run_scenario(&cfg, Path::new(".")).unwrap().report;
    let b = run_scenario(&cfg, Path::new(".")).unwrap().report;
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.status, Status::Pass);
    assert_eq!(metric(&a, "fattens"), 0.0);
    assert_eq!(metric(&a, "expander_fattens"), 0.0);
    let h = metric(&a, "spacing");
    assert!(a.tables[0].rows.iter().all(|r| r[1] <= 5.0 * h));
    let c = compare_reports(&a, &b, false).unwrap();
    assert!(c.identical() && c.orders.is_empty());
}

#[test]
fn cross_fattens_and_fronts_export() {
    let cfg = level_set(ScenarioKind::Dichotomy, ShapeSpec::Cross, 4.0, 160, &[0.25, 0.5, 1.0]);
    let out = run_scenario(&cfg, Path::new(".")).unwrap();
    let r = &out.report;
    assert_eq!(r.status, Status::Pass, "{}", r.summary);
    assert_eq!(metric(r, "fattens"), 1.0);
    let h = metric(r, "spacing");
    assert!((metric(r, "gap@t=1") - metric(r, "expander_gap_measure")).abs() <= 3.0 * h);
    let matched = r.tables.iter().find(|t| t.name == "expander_match").unwrap();
    assert!(matched.source.contains("rescaled_convergence"));
    assert!(matched.rows.iter().all(|row| row[3] <= 3.0 * row[5]));

    let dir = tempfile::tempdir().unwrap();
    let written = out.write(dir.path()).unwrap();
    assert!(written.iter().any(|p| p.ends_with("gap.csv")));
    let sidecar: ExpanderSidecar =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("expander_sigma_0.json")).unwrap()).unwrap();
    assert_eq!(sidecar.side, "W");
    let back = ScenarioReport::read(&dir.path().join("report.json")).unwrap();
    assert_eq!(&back, r);

    let files = export_fronts(&back, &[1.0], &dir.path().join("fronts")).unwrap();
    let mut outer = Vec::new();
    for f in &files {
        if f.file_name().unwrap().to_str().unwrap().starts_with("front_outer_t1_") {
            outer.push(read_curve_file(f).unwrap());
        }
    }
    let front = r.fronts.iter().find(|f| f.run == "outer" && f.t == 1.0).unwrap().curve_set();
    assert_eq!(hausdorff(&curve_set_from_records(&outer), &front), 0.0);

    assert!(export_fronts(&back, &[], &dir.path().join("none")).unwrap().is_empty());
    assert!(!dir.path().join("none").exists());
    match export_fronts(&back, &[0.3, 1.0], dir.path()) {
        Err(CliError::MissingTimes { times }) => assert_eq!(times, vec![0.3]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn circle_resolution_study_reports_first_order() {
    let run = |n| {
        let cfg = level_set(
            ScenarioKind::Dichotomy,
            ShapeSpec::Circle { center: [0.0, 0.0], radius: 1.0 },
            2.0,
            n,
            &[0.1, 0.25],
        );
        run_scenario(&cfg, Path::new(".")).unwrap().report
    };
    let (a, b) = (run(128), run(256));
    assert_eq!(metric(&b, "fattens"), 0.0);
    let c = compare_reports(&a, &b, true).unwrap();
    let order = c.orders.iter().find(|o| o.metric == "radius_law_error").unwrap();
    assert!(order.order >= 1.0, "{order:?}");

    let other = ScenarioConfig::new(ScenarioKind::AppendixValidation, ShapeSpec::Cross);
    let mut fake = a.clone();
    fake.scenario = other.scenario;
    assert!(matches!(compare_reports(&a, &fake, false), Err(CliError::ScenarioMismatch { .. })));
}

#[test]
fn barrier_audit_passes_on_the_cross() {
    let cfg = ScenarioConfig::new(ScenarioKind::BarrierAudit, ShapeSpec::Cross);
    let r = run_scenario(&cfg, Path::new(".")).unwrap().report;
    assert_eq!(r.status, Status::Pass, "{}", r.summary);
    assert!(metric(&r, "ratio_spread").abs() <= 0.1);
    assert_eq!(metric(&r, "mu_monotone"), 1.0);
    assert!(metric(&r, "s0") >= 1e-2);
}

#[test]
fn appendix_validation_passes() {
    let mut cfg = ScenarioConfig::new(ScenarioKind::AppendixValidation, ShapeSpec::Cross);
    cfg.appendix.count = 5;
    cfg.seed = 11;
    let r = run_scenario(&cfg, Path::new(".")).unwrap().report;
    assert_eq!(r.status, Status::Pass, "{}", r.summary);
    assert!(metric(&r, "min_slope") >= 1.8 && metric(&r, "max_slope") <= 2.2);
}

#[test]
fn module_errors_carry_the_scenario() {
    // The circle does not fit with its buffer.
    let cfg = level_set(ScenarioKind::Dichotomy, ShapeSpec::Circle { center: [0.0, 0.0], radius: 1.9 }, 2.0, 64, &[0.1]);
    let err = run_scenario(&cfg, Path::new(".")).unwrap_err();
    assert!(matches!(err, CliError::Scenario { scenario: "dichotomy", stage: "inner_outer_flows", .. }));
    assert!(err.to_string().starts_with("dichotomy failed in inner_outer_flows"));
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conical-mcf"))
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // Too coarse to decide: exit code 2.
    let cfg = level_set(ScenarioKind::Dichotomy, ShapeSpec::Cross, 4.0, 64, &[0.25, 1.0]);
    let path = dir.path().join("coarse.json");
    std::fs::write(&path, cfg.to_json()).unwrap();
    let status = bin().arg("run").arg(&path).env("CONICAL_MCF_OUTPUT_ROOT", dir.path()).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let report = dir.path().join("out").join("report.json");
    assert!(report.exists());

    let status = bin().args(["export", "--report"]).arg(&report).args(["--times", "0.5"]).status().unwrap();
    assert_eq!(status.code(), Some(1));
    let status = bin().args(["export", "--report"]).arg(&report).args(["--times", "1"]).status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(dir.path().join("out/fronts/front_outer_t1_0.csv").exists());

    let out = bin().arg("compare").arg(&report).arg(&report).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"deltas\""));

    std::fs::write(&path, "{\"schema\": 2}").unwrap();
    assert_eq!(bin().arg("run").arg(&path).status().unwrap().code(), Some(1));

    let status = bin()
        .args(["validate-appendix", "--h", "0.01", "--out"])
        .arg(dir.path().join("appendix"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
}
