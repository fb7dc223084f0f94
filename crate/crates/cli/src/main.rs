use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use conical_mcf::config::{ScenarioConfig, ScenarioKind, ShapeSpec};
use conical_mcf::io::read_text;
use conical_mcf::{compare_reports, export_fronts, run_scenario, CliError, ScenarioReport, OUTPUT_ROOT_VAR};

#[derive(Parser)]
#[command(name = "conical-mcf", version, about = "Mean curvature flow from planar cones: scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a JSON config.
    Run {
        config: PathBuf,
        /// Output directory, overriding the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the fronts of a report at the given times as curve CSV files.
    Export {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, num_args = 0..)]
        times: Vec<f64>,
        /// Defaults to `fronts/` next to the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-metric differences between two reports of the same scenario.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Report convergence orders of error metrics.
        #[arg(long)]
        resolution: bool,
    },
    /// Quadratic scaling of the graph remainders at one curve spacing.
    ValidateAppendix {
        #[arg(long)]
        h: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

fn run(cfg: &ScenarioConfig, base: &Path, out: Option<PathBuf>) -> Result<i32, CliError> {
    let output = run_scenario(cfg, base)?;
    let dir = out.unwrap_or_else(|| output_root().join(&cfg.output_dir));
    output.write(&dir)?;
    let r = &output.report;
    say(format_args!("{} {:?}: {} ({})", r.scenario.name(), r.status, r.summary, dir.join("report.json").display()));
    Ok(r.status.exit_code())
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = ScenarioConfig::from_json(&read_text(&config)?)?;
            let base = config.parent().map(Path::to_path_buf).unwrap_or_default();
            run(&cfg, &base, out)
        }
        Command::Export { report, times, out } => {
            let r = ScenarioReport::read(&report)?;
            let dir = out.unwrap_or_else(|| report.parent().map(Path::to_path_buf).unwrap_or_default().join("fronts"));
            let files = export_fronts(&r, &times, &dir)?;
            say(format_args!("wrote {} curve files to {}", files.len(), dir.display()));
            Ok(0)
        }
        Command::Compare { a, b, resolution } => {
            let c = compare_reports(&ScenarioReport::read(&a)?, &ScenarioReport::read(&b)?, resolution)?;
            say(format_args!("{}", serde_json::to_string_pretty(&c).expect("comparison serializes")));
            Ok(0)
        }
        Command::ValidateAppendix { h, seed, out } => {
            let mut cfg = ScenarioConfig::new(ScenarioKind::AppendixValidation, ShapeSpec::Cross);
            cfg.expander.step = h;
            cfg.seed = seed;
            cfg.output_dir = PathBuf::from("appendix-validation");
            cfg.validate()?;
            run(&cfg, Path::new("."), out)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Prints a line, ignoring a closed stdout such as `| head`.
fn say(line: std::fmt::Arguments<'_>) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}
