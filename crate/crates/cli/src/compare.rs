use serde::Serialize;

use crate::config::ScenarioKind;
use crate::report::ScenarioReport;
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Delta {
    pub metric: String,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
}

/// Observed convergence order of an error metric between two grids.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Order {
    pub metric: String,
    pub n_a: usize,
    pub n_b: usize,
    pub order: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub scenario: ScenarioKind,
    pub deltas: Vec<Delta>,
    /// Metrics present in only one report.
    pub unmatched: Vec<String>,
    pub orders: Vec<Order>,
}

impl Comparison {
    pub fn identical(&self) -> bool {
        self.unmatched.is_empty() && self.deltas.iter().all(|d| d.delta == 0.0)
    }
}

/// Per-metric deltas `b − a`. In resolution-study mode (forced, or
/// automatic when the grids differ) every metric whose name contains
/// `error` also gets the order `log(e_a/e_b) / log(n_b/n_a)`.
pub fn compare_reports(a: &ScenarioReport, b: &ScenarioReport, resolution: bool) -> Result<Comparison, CliError> {
    if a.scenario != b.scenario {
        return Err(CliError::ScenarioMismatch { a: a.scenario.name(), b: b.scenario.name() });
    }
    let mut deltas = Vec::new();
    let mut unmatched = Vec::new();
    for (name, ma) in &a.metrics {
        match b.metrics.get(name) {
            Some(mb) => deltas.push(Delta { metric: name.clone(), a: ma.value, b: mb.value, delta: mb.value - ma.value }),
            None => unmatched.push(name.clone()),
        }
    }
    unmatched.extend(b.metrics.keys().filter(|k| !a.metrics.contains_key(*k)).cloned());
    let (n_a, n_b) = (a.config.grid.n, b.config.grid.n);
    let mut orders = Vec::new();
    if resolution || n_a != n_b {
        if n_a == n_b {
            return Err(CliError::InvalidConfig { field: "grid.n".into(), reason: "a resolution study needs two grid sizes".into() });
        }
        for d in deltas.iter().filter(|d| d.metric.contains("error")) {
            if d.a > 0.0 && d.b > 0.0 {
                let order = (d.a / d.b).ln() / (n_b as f64 / n_a as f64).ln();
                orders.push(Order { metric: d.metric.clone(), n_a, n_b, order });
            }
        }
    }
    Ok(Comparison { scenario: a.scenario, deltas, unmatched, orders })
}
