//! Curve CSV files, cone JSON and expander exports.
//!
//! A curve file holds one node per line as `x,y` after the header
//! `# closed=<0|1> orientation=<+1|-1>`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use conical_mcf_core::expander::{ExpanderCurve, PlanarCone, Side};
use conical_mcf_core::geometry::{CurveSet, DiscreteCurve, Orientation};
use conical_mcf_core::Vec2;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct CurveRecord {
    pub points: Vec<Vec2>,
    pub closed: bool,
    pub orientation: Orientation,
}

impl CurveRecord {
    pub fn to_curve(&self) -> Result<DiscreteCurve, CliError> {
        Ok(DiscreteCurve::new(self.points.clone(), self.closed, self.orientation)?)
    }

    pub fn from_curve(c: &DiscreteCurve) -> Self {
        Self { points: c.nodes().to_vec(), closed: c.is_closed(), orientation: c.orientation() }
    }
}

/// Formats a curve. Coordinates use the shortest representation that
/// parses back to the same `f64`.
pub fn format_curve_csv(points: &[Vec2], closed: bool, orientation: Orientation) -> String {
    let sign = if orientation == Orientation::Positive { "+1" } else { "-1" };
    let mut out = format!("# closed={} orientation={sign}\n", u8::from(closed));
    for p in points {
        writeln!(out, "{},{}", p.x, p.y).expect("writing to a String");
    }
    out
}

pub fn parse_curve_csv(text: &str) -> Result<CurveRecord, CliError> {
    let err = |line: usize, reason: &str| CliError::CurveFormat { line, reason: reason.into() };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let header = header.strip_prefix('#').ok_or_else(|| err(1, "missing header"))?;
    let (mut closed, mut orientation) = (None, None);
    for field in header.split_whitespace() {
        match field.split_once('=') {
            Some(("closed", "0")) => closed = Some(false),
            Some(("closed", "1")) => closed = Some(true),
            Some(("orientation", "+1" | "1")) => orientation = Some(Orientation::Positive),
            Some(("orientation", "-1")) => orientation = Some(Orientation::Negative),
            _ => return Err(err(1, "unrecognised header field")),
        }
    }
    let (closed, orientation) = closed.zip(orientation).ok_or_else(|| err(1, "header needs closed and orientation"))?;
    let mut points = Vec::new();
    for (k, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (x, y) = line.split_once(',').ok_or_else(|| err(k + 1, "expected x,y"))?;
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| err(k + 1, "not a number"));
        points.push(Vec2::new(parse(x)?, parse(y)?));
    }
    Ok(CurveRecord { points, closed, orientation })
}

pub fn read_curve_file(path: &Path) -> Result<CurveRecord, CliError> {
    parse_curve_csv(&read_text(path)?)
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.to_path_buf(), source: e })?;
    }
    fs::write(path, text).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })
}

/// Reassembles curve files into a set, as read back by `export` consumers.
pub fn curve_set_from_records(records: &[CurveRecord]) -> CurveSet {
    let mut set = CurveSet::new();
    for r in records {
        set.push(r.points.clone(), r.closed);
    }
    set
}

/// `{"rays": [...], "inside": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeFile {
    pub rays: Vec<f64>,
    pub inside: Vec<bool>,
}

impl ConeFile {
    pub fn from_cone(cone: &PlanarCone) -> Self {
        Self { rays: cone.ray_angles().to_vec(), inside: cone.inside().to_vec() }
    }

    pub fn to_cone(&self) -> Result<PlanarCone, CliError> {
        PlanarCone::new(self.rays.clone(), self.inside.clone())
            .map_err(|e| CliError::InvalidConfig { field: "cone".into(), reason: e.to_string() })
    }
}

/// Sidecar of an exported expander curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExpanderSidecar {
    pub asymptotic: [f64; 2],
    pub side: String,
    pub max_residual: f64,
}

/// Writes `<stem>.csv` and `<stem>.json` and returns both paths.
pub fn export_expander(e: &ExpanderCurve, dir: &Path, stem: &str) -> Result<[PathBuf; 2], CliError> {
    let csv = dir.join(format!("{stem}.csv"));
    let json = dir.join(format!("{stem}.json"));
    let c = &e.curve;
    write_text(&csv, &format_curve_csv(c.nodes(), c.is_closed(), c.orientation()))?;
    let side = match e.side {
        Side::W => "W",
        Side::WPrime => "W'",
    };
    let sidecar = ExpanderSidecar {
        asymptotic: [e.asymptotic_angles.0, e.asymptotic_angles.1],
        side: side.into(),
        max_residual: e.max_residual(),
    };
    write_text(&json, &serde_json::to_string_pretty(&sidecar).expect("sidecar serializes"))?;
    Ok([csv, json])
}
