use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use conical_mcf_core::geometry::CurveSet;
use conical_mcf_core::Vec2;
use serde::{Deserialize, Serialize};

use crate::config::{ScenarioConfig, ScenarioKind};
use crate::io::{read_text, write_text};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Inconclusive => 2,
            Status::Fail => 1,
        }
    }
}

/// A scalar result and the module operation that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub value: f64,
    pub source: String,
}

/// A numeric table; `source` names the module operation behind every cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub source: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, source: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), source: source.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Long format: one `(row, column, value)` triple per line.
    pub fn to_long_csv(&self) -> String {
        let mut out = String::from("table,source,row,column,value\n");
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in self.columns.iter().zip(row) {
                writeln!(out, "{},{},{r},{c},{v}", self.name, self.source).expect("writing to a String");
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub closed: bool,
    pub points: Vec<[f64; 2]>,
}

/// Front of one run at one time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontRecord {
    pub run: String,
    pub t: f64,
    pub polylines: Vec<Polyline>,
}

impl FrontRecord {
    pub fn new(run: &str, t: f64, curves: &CurveSet) -> Self {
        let polylines = curves
            .polylines
            .iter()
            .map(|(pts, closed)| Polyline { closed: *closed, points: pts.iter().map(|p| [p.x, p.y]).collect() })
            .collect();
        Self { run: run.into(), t, polylines }
    }

    pub fn curve_set(&self) -> CurveSet {
        let mut s = CurveSet::new();
        for p in &self.polylines {
            s.push(p.points.iter().map(|q| Vec2::new(q[0], q[1])).collect(), p.closed);
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub schema: u32,
    pub scenario: ScenarioKind,
    pub config_hash: String,
    pub config: ScenarioConfig,
    pub status: Status,
    pub summary: String,
    pub metrics: BTreeMap<String, Metric>,
    pub tables: Vec<Table>,
    pub fronts: Vec<FrontRecord>,
}

impl ScenarioReport {
    pub fn new(config: &ScenarioConfig) -> Self {
        Self {
            schema: config.schema,
            scenario: config.scenario,
            config_hash: config.content_hash(),
            config: config.clone(),
            status: Status::Pass,
            summary: String::new(),
            metrics: BTreeMap::new(),
            tables: Vec::new(),
            fronts: Vec::new(),
        }
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64, source: &str) {
        self.metrics.insert(name.into(), Metric { value, source: source.into() });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Json { path: path.to_path_buf(), source: e })
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        Self::from_json(&read_text(path)?, path)
    }

    /// Writes `report.json` and one long-format CSV per table into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        let mut written = Vec::new();
        let path = dir.join("report.json");
        write_text(&path, &self.to_json())?;
        written.push(path);
        for t in &self.tables {
            let path = dir.join(format!("{}.csv", t.name));
            write_text(&path, &t.to_long_csv())?;
            written.push(path);
        }
        Ok(written)
    }

    pub fn times(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self.fronts.iter().map(|f| f.t).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts
    }
}

/// Key of a per-time metric, e.g. `gap@t=0.25`.
pub fn at_time(name: &str, t: f64) -> String {
    format!("{name}@t={t}")
}
