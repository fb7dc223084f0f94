use std::path::{Path, PathBuf};

use conical_mcf_core::geometry::Orientation;
use conical_mcf_core::Vec2;

use crate::io::{format_curve_csv, write_text};
use crate::report::ScenarioReport;
use crate::CliError;

/// Relative tolerance when matching requested times to report slices.
const TIME_MATCH: f64 = 1e-9;

/// Writes one CSV curve file per polyline of every front at `times`:
/// `front_<run>_t<t>_<k>.csv`. Fronts carry no orientation, so files are
/// written with `+1`.
pub fn export_fronts(report: &ScenarioReport, times: &[f64], dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let matches = |a: f64, b: f64| (a - b).abs() <= TIME_MATCH * a.abs().max(1.0);
    let missing: Vec<f64> = times.iter().copied().filter(|&t| !report.fronts.iter().any(|f| matches(f.t, t))).collect();
    if !missing.is_empty() {
        return Err(CliError::MissingTimes { times: missing });
    }
    let mut written = Vec::new();
    for f in report.fronts.iter().filter(|f| times.iter().any(|&t| matches(f.t, t))) {
        for (k, p) in f.polylines.iter().enumerate() {
            let pts: Vec<Vec2> = p.points.iter().map(|q| Vec2::new(q[0], q[1])).collect();
            let path = dir.join(format!("front_{}_t{}_{k}.csv", f.run, f.t));
            write_text(&path, &format_curve_csv(&pts, p.closed, Orientation::Positive))?;
            written.push(path);
        }
    }
    Ok(written)
}
