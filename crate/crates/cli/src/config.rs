use std::path::{Path, PathBuf};

use conical_mcf_core::expander::{PairOptions, PlanarCone, DEFAULT_STEP, R_MAX};
use conical_mcf_core::levelset::{EvolveOptions, FlowParams, GridSpec, Shape};
use conical_mcf_core::Vec2;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::io::read_curve_file;
use crate::CliError;

/// Version of the config and report schema.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Dichotomy,
    Structure,
    Uniqueness,
    BarrierAudit,
    AppendixValidation,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Dichotomy => "dichotomy",
            ScenarioKind::Structure => "structure",
            ScenarioKind::Uniqueness => "uniqueness",
            ScenarioKind::BarrierAudit => "barrier-audit",
            ScenarioKind::AppendixValidation => "appendix-validation",
        }
    }
}

/// Initial data. Angles are in radians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ShapeSpec {
    /// A cone given by its ray angles and which sectors belong to `W`.
    Cone { rays: Vec<f64>, inside: Vec<bool> },
    Cross,
    Line { angle: f64 },
    Wedge { bisector: f64, opening: f64 },
    /// Lemniscate with lobes in the first and third quadrants.
    FigureEight { a: f64 },
    /// Teardrop with one corner at the origin.
    WedgeCorner { bisector: f64, opening: f64, radius: f64 },
    Circle { center: [f64; 2], radius: f64 },
    /// A closed curve in the CSV curve format, relative to the config file.
    Curve { path: PathBuf },
}

impl ShapeSpec {
    /// The cone itself, or the tangent cone at the singular point.
    pub fn cone(&self) -> Result<Option<PlanarCone>, CliError> {
        Ok(match self {
            ShapeSpec::Cone { rays, inside } => Some(
                PlanarCone::new(rays.clone(), inside.clone())
                    .map_err(|e| CliError::InvalidConfig { field: "shape".into(), reason: e.to_string() })?,
            ),
            ShapeSpec::Cross | ShapeSpec::FigureEight { .. } => Some(PlanarCone::cross()),
            ShapeSpec::Line { angle } => Some(PlanarCone::line(*angle)),
            ShapeSpec::Wedge { bisector, opening } | ShapeSpec::WedgeCorner { bisector, opening, .. } => {
                Some(PlanarCone::wedge(*bisector, *opening))
            }
            ShapeSpec::Circle { .. } | ShapeSpec::Curve { .. } => None,
        })
    }

    pub fn to_shape(&self, base_dir: &Path) -> Result<Shape, CliError> {
        let invalid = |e: conical_mcf_core::levelset::LevelSetError| CliError::InvalidConfig {
            field: "shape".into(),
            reason: e.to_string(),
        };
        match self {
            ShapeSpec::FigureEight { a } => Shape::figure_eight(*a).map_err(invalid),
            ShapeSpec::WedgeCorner { bisector, opening, radius } => {
                Shape::wedge_corner(*bisector, *opening, *radius).map_err(invalid)
            }
            ShapeSpec::Circle { center, radius } => Shape::circle(Vec2::new(center[0], center[1]), *radius).map_err(invalid),
            ShapeSpec::Curve { path } => {
                let curve = read_curve_file(&base_dir.join(path))?.to_curve()?;
                Shape::from_curve(&curve).map_err(invalid)
            }
            _ => Ok(Shape::Cone(self.cone()?.expect("cone shapes have a cone"))),
        }
    }
}

fn default_cfl() -> f64 {
    EvolveOptions::default().cfl
}
fn default_reinit() -> usize {
    EvolveOptions::default().reinit_every
}
fn default_eps() -> Vec<f64> {
    vec![4.0, 2.0, 1.0]
}

/// Level set grid: `n × n` cells over `center + [-half_width, half_width]²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: f64,
    /// In `[16, 4096]`.
    pub n: usize,
    /// In `(0, 0.25]`.
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default)]
    pub center: [f64; 2],
    #[serde(default = "default_reinit")]
    pub reinit_every: usize,
    /// Offsets in cells, at least two, all positive.
    #[serde(default = "default_eps")]
    pub eps_cells: Vec<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            half_width: 4.0,
            n: 256,
            cfl: default_cfl(),
            center: [0.0, 0.0],
            reinit_every: default_reinit(),
            eps_cells: default_eps(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExpanderConfig {
    /// Arclength step, in `(0, 0.1]`.
    pub step: f64,
    /// Truncation radius, in `[8, 200]`.
    pub r_max: f64,
}

impl Default for ExpanderConfig {
    fn default() -> Self {
        Self { step: DEFAULT_STEP, r_max: R_MAX }
    }
}

impl ExpanderConfig {
    pub fn pair_options(&self) -> PairOptions {
        PairOptions { step: self.step, max_radius: self.r_max }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralConfig {
    /// Barrier radius `R`; the eigenfunction lives on `Σ_{3R}`.
    pub radius: f64,
    /// Radii of the eigenvalue table, increasing.
    pub radii: Vec<f64>,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self { radius: 2.0, radii: vec![2.0, 3.0, 4.0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BarrierConfig {
    /// Clamp for the searched `α`.
    pub alpha_bounds: Option<[f64; 2]>,
    /// Barrier heights audited by `barrier-audit`, in `(0, 1]`.
    pub s: Vec<f64>,
    /// Half-width of the rescaled band around the reference front.
    pub delta: f64,
    /// Rescaled radius of the comparison ball.
    pub rho: f64,
}

impl Default for BarrierConfig {
    fn default() -> Self {
        Self { alpha_bounds: None, s: vec![1e-2, 5e-3], delta: 0.8, rho: 2.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppendixConfig {
    /// Number of random graphs per base curve.
    pub count: usize,
    /// Scalings `λ`, at least two, in `(0, 1)`.
    pub lambdas: Vec<f64>,
}

impl Default for AppendixConfig {
    fn default() -> Self {
        Self { count: 20, lambdas: vec![0.04, 0.02, 0.01] }
    }
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn default_rho() -> f64 {
    2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema: u32,
    pub scenario: ScenarioKind,
    pub shape: ShapeSpec,
    #[serde(default)]
    pub grid: GridConfig,
    /// Output times of the level set runs, increasing and positive.
    #[serde(default)]
    pub times: Vec<f64>,
    /// Rescaled radius for the convergence measurement of `structure`.
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default)]
    pub expander: ExpanderConfig,
    #[serde(default)]
    pub spectral: SpectralConfig,
    #[serde(default)]
    pub barrier: BarrierConfig,
    #[serde(default)]
    pub appendix: AppendixConfig,
    /// Relative paths are resolved against the output root.
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    /// Seed of the random graphs of `appendix-validation`.
    #[serde(default)]
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn new(scenario: ScenarioKind, shape: ShapeSpec) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            scenario,
            shape,
            grid: GridConfig::default(),
            times: Vec::new(),
            rho: default_rho(),
            expander: ExpanderConfig::default(),
            spectral: SpectralConfig::default(),
            barrier: BarrierConfig::default(),
            appendix: AppendixConfig::default(),
            output_dir: default_output(),
            seed: 0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Json { path: PathBuf::from("<config>"), source: e })?;
        let found = value.get("schema").and_then(|v| v.as_u64()).unwrap_or(0);
        if found != u64::from(SCHEMA_VERSION) {
            return Err(CliError::Schema { found, expected: SCHEMA_VERSION });
        }
        let cfg: Self =
            serde_json::from_value(value).map_err(|e| CliError::Json { path: PathBuf::from("<config>"), source: e })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Git-style content hash: SHA-256 of `blob <len>\0` and the compact JSON.
    pub fn content_hash(&self) -> String {
        let body = serde_json::to_vec(self).expect("config serializes");
        let mut h = Sha256::new();
        h.update(format!("blob {}\0", body.len()).as_bytes());
        h.update(&body);
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, reason: &str| Err(CliError::InvalidConfig { field: field.into(), reason: reason.into() });
        let positive = |x: f64| x > 0.0 && x.is_finite();
        let g = &self.grid;
        if !positive(g.half_width) {
            return bad("grid.half_width", "must be positive");
        }
        if !(16..=4096).contains(&g.n) {
            return bad("grid.n", "must lie in [16, 4096]");
        }
        if !(g.cfl > 0.0 && g.cfl <= 0.25) {
            return bad("grid.cfl", "must lie in (0, 0.25]");
        }
        if g.reinit_every == 0 {
            return bad("grid.reinit_every", "must be at least 1");
        }
        if g.eps_cells.len() < 2 || !g.eps_cells.iter().all(|e| positive(*e)) {
            return bad("grid.eps_cells", "needs at least two positive offsets");
        }
        if !g.center.iter().all(|c| c.is_finite()) {
            return bad("grid.center", "must be finite");
        }
        if self.times.iter().any(|t| !positive(*t)) || self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("times", "must be positive and increasing");
        }
        let level_set = matches!(self.scenario, ScenarioKind::Dichotomy | ScenarioKind::Structure | ScenarioKind::Uniqueness);
        if level_set && self.times.is_empty() {
            return bad("times", "level set scenarios need output times");
        }
        if !positive(self.rho) {
            return bad("rho", "must be positive");
        }
        let e = &self.expander;
        if !(e.step > 0.0 && e.step <= 0.1) {
            return bad("expander.step", "must lie in (0, 0.1]");
        }
        if !(8.0..=200.0).contains(&e.r_max) {
            return bad("expander.r_max", "must lie in [8, 200]");
        }
        let s = &self.spectral;
        if !positive(s.radius) || 6.0 * s.radius >= e.r_max {
            return bad("spectral.radius", "must be positive with 6R below expander.r_max");
        }
        if s.radii.iter().any(|r| !(*r > 1.0 && *r < e.r_max)) || s.radii.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("spectral.radii", "must be increasing within (1, r_max)");
        }
        let b = &self.barrier;
        if let Some([lo, hi]) = b.alpha_bounds {
            if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
                return bad("barrier.alpha_bounds", "must satisfy 0 <= lo <= hi");
            }
        }
        if b.s.iter().any(|x| !(*x > 0.0 && *x <= 1.0)) {
            return bad("barrier.s", "values must lie in (0, 1]");
        }
        if !positive(b.delta) || !positive(b.rho) {
            return bad("barrier", "delta and rho must be positive");
        }
        let a = &self.appendix;
        if a.count == 0 || a.count > 1000 {
            return bad("appendix.count", "must lie in [1, 1000]");
        }
        if a.lambdas.len() < 2 || a.lambdas.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
            return bad("appendix.lambdas", "needs at least two values in (0, 1)");
        }
        let needs_cone = matches!(self.scenario, ScenarioKind::BarrierAudit | ScenarioKind::Uniqueness | ScenarioKind::Structure);
        if needs_cone && self.shape.cone()?.is_none() {
            return bad("shape", "this scenario needs a cone or a shape with a tangent cone");
        }
        Ok(())
    }

    pub fn flow_params(&self) -> Result<FlowParams, CliError> {
        let g = &self.grid;
        let spec = GridSpec::new(Vec2::new(g.center[0], g.center[1]), g.half_width, g.n)
            .map_err(|e| CliError::InvalidConfig { field: "grid".into(), reason: e.to_string() })?;
        let mut p = FlowParams::new(spec, self.times.clone());
        p.eps_cells = g.eps_cells.clone();
        p.evolve = EvolveOptions { cfl: g.cfl, reinit_every: g.reinit_every };
        Ok(p)
    }
}
