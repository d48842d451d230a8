//! Experiment configuration files.
//!
//! A config is a JSON object; every section is optional and command-line
//! flags override what it says. Example:
//!
//! ```json
//! {
//!   "seed": 7,
//!   "curve": { "exprs": ["t", "t^2", "t^4"] },
//!   "levels": { "min": -4, "max": 4 },
//!   "grid": { "half_width": 8.0, "resolution": 64, "nodes": 512, "support": [-0.5, 0.5] }
//! }
//! ```
//!
//! `curve` is one of `{"exprs": ["t", "t^2"]}`, `{"components": [[0, 1], [0, 0, 1]]}`
//! (ascending coefficients), `{"path": "curve.json"}` or
//! `{"random": {"dim": 2, "degree": 4, "count": 20}}`. A curve file holds
//! `{"d": 2, "components": [[0, 1], [0, 0, 1]]}` or `{"exprs": ["t", "t^2"]}`;
//! `d` is optional and checked when present.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use torsionlab_core::poly::Polynomial;
use torsionlab_core::{Interval, PolyCurve};

use crate::random::RandomFamily;
use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ExperimentKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveSource>,
    #[serde(default)]
    pub quick: bool,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub levels: LevelRange,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub exponents: ExponentsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Analyze,
    Verify,
    Sweep,
    Field,
    Exponents,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSource {
    Exprs(Vec<String>),
    Components(Vec<Vec<f64>>),
    Path(PathBuf),
    Random(RandomFamily),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: f64,
    pub resolution: usize,
    pub nodes: usize,
    pub support: [f64; 2],
    pub weighted: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { half_width: 8.0, resolution: 64, nodes: 512, support: [-0.5, 0.5], weighted: true }
    }
}

impl GridConfig {
    pub fn support(&self) -> Interval {
        Interval::closed(self.support[0], self.support[1])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Gaussian,
    Indicator,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub p: f64,
    pub q: f64,
    pub budget: usize,
    pub family: FamilyKind,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { p: 2.0, q: 6.0, budget: 40, family: FamilyKind::Both }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LevelRange {
    pub min: i32,
    pub max: i32,
}

impl Default for LevelRange {
    fn default() -> Self {
        LevelRange { min: -4, max: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub suite: String,
    /// Random curves for the geometric ratio scan.
    pub curves: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { suite: "all".into(), curves: 20 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExponentsConfig {
    pub dim: usize,
    /// Rationals such as `"2"`, `"7/2"` or `"1.5"`.
    pub q: Vec<String>,
}

impl Default for ExponentsConfig {
    fn default() -> Self {
        ExponentsConfig { dim: 3, q: ["1", "3/2", "2", "3", "4", "6", "8"].map(String::from).to_vec() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldFormat {
    #[default]
    Csv,
    Binary,
    Both,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub format: FieldFormat,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveFile {
    #[serde(default)]
    d: Option<usize>,
    #[serde(default)]
    components: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    exprs: Option<Vec<String>>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| CliError::usage(format!("{}: {}", path.display(), e.message)))
    }

    /// Checks referenced paths and the presence of a seed wherever randomness
    /// is used.
    pub fn validate(&self) -> Result<(), CliError> {
        match &self.curve {
            Some(CurveSource::Path(p)) if !p.is_file() => {
                return Err(CliError::usage(format!("curve file {} does not exist", p.display())));
            }
            Some(CurveSource::Random(r)) if r.seed.or(self.seed).is_none() => {
                return Err(CliError::usage("random curve family needs a seed"));
            }
            Some(CurveSource::Exprs(c)) if c.is_empty() => {
                return Err(CliError::usage("curve needs at least one component"));
            }
            Some(CurveSource::Components(c)) if c.is_empty() => {
                return Err(CliError::usage("curve needs at least one component"));
            }
            _ => {}
        }
        if self.levels.min > self.levels.max {
            return Err(CliError::usage("levels.min exceeds levels.max"));
        }
        let [a, b] = self.grid.support;
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(CliError::usage("grid.support must be a finite interval [lo, hi] with lo < hi"));
        }
        Ok(())
    }

    /// The single curve named by the config.
    pub fn single_curve(&self) -> Result<PolyCurve, CliError> {
        match &self.curve {
            None => Err(CliError::usage("no curve given (use --curve or a config with a curve section)")),
            Some(CurveSource::Exprs(c)) => parse_exprs(c),
            Some(CurveSource::Components(c)) => from_coefficients(c.clone()),
            Some(CurveSource::Path(p)) => load_curve(p),
            Some(CurveSource::Random(_)) => Err(CliError::usage("this command takes a single curve, not a random family")),
        }
    }

    pub fn seed_for(&self, family: &RandomFamily) -> Result<u64, CliError> {
        family.seed.or(self.seed).ok_or_else(|| CliError::usage("random curve family needs a seed"))
    }
}

pub fn parse_exprs(exprs: &[String]) -> Result<PolyCurve, CliError> {
    let comps = exprs
        .iter()
        .map(|e| e.parse::<Polynomial>().map_err(|err| CliError::usage(format!("component {e:?}: {err}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PolyCurve::new(comps)?)
}

pub fn load_curve(path: &Path) -> Result<PolyCurve, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read curve {}: {e}", path.display())))?;
    let file: CurveFile = serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let curve = match (file.components, file.exprs) {
        (Some(cs), None) => from_coefficients(cs)?,
        (None, Some(es)) => parse_exprs(&es)?,
        _ => return Err(CliError::usage(format!("{}: give exactly one of \"components\" and \"exprs\"", path.display()))),
    };
    match file.d {
        Some(d) if d != curve.dim() => {
            Err(CliError::usage(format!("{}: \"d\" is {d} but the curve has {} components", path.display(), curve.dim())))
        }
        _ => Ok(curve),
    }
}

fn from_coefficients(cs: Vec<Vec<f64>>) -> Result<PolyCurve, CliError> {
    Ok(PolyCurve::new(cs.into_iter().map(Polynomial::new).collect())?)
}
