//! Scenario runner and file formats for `conical-mcf-core`.
//!
//! A [`ScenarioConfig`] (versioned JSON) selects one experiment; running it
//! yields a [`ScenarioReport`] with numeric tables, per-time fronts and a
//! content hash of the config. Reports can be compared and their fronts
//! exported as curve CSV files.

pub mod compare;
pub mod config;
pub mod export;
pub mod io;
pub mod report;
pub mod scenario;

use std::path::PathBuf;

use conical_mcf_core::barrier::BarrierError;
use conical_mcf_core::expander::ExpanderError;
use conical_mcf_core::geometry::GeometryError;
use conical_mcf_core::levelset::LevelSetError;
use conical_mcf_core::spectral::SpectralError;

pub use compare::{compare_reports, Comparison};
pub use config::{ScenarioConfig, ScenarioKind, ShapeSpec, SCHEMA_VERSION};
pub use export::export_fronts;
pub use report::{ScenarioReport, Status};
pub use scenario::{run_scenario, ScenarioOutput};

/// Environment variable naming the root under which relative output
/// directories are created.
pub const OUTPUT_ROOT_VAR: &str = "CONICAL_MCF_OUTPUT_ROOT";

#[derive(Debug, thiserror::Error)]
pub enum ModuleError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Expander(#[from] ExpanderError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Barrier(#[from] BarrierError),
    #[error(transparent)]
    LevelSet(#[from] LevelSetError),
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("schema version {found} is not supported (expected {expected})")]
    Schema { found: u64, expected: u32 },
    #[error("invalid {field}: {reason}")]
    InvalidConfig { field: String, reason: String },
    #[error("curve file line {line}: {reason}")]
    CurveFormat { line: usize, reason: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{scenario} failed in {stage}: {source}")]
    Scenario {
        scenario: &'static str,
        stage: &'static str,
        #[source]
        source: ModuleError,
    },
    #[error("cannot compare a {a} report with a {b} report")]
    ScenarioMismatch { a: &'static str, b: &'static str },
    #[error("no fronts at t = {times:?}")]
    MissingTimes { times: Vec<f64> },
}
