//! TOML run configuration.
//!
//! ```toml
//! [model]
//! s_a = 2.0
//! s_b = 2.0
//!
//! [gradient_a]
//! family = "linear"
//! intercept = 2.0
//! slope = -1.5
//!
//! [gradient_b]
//! family = "linear"
//! intercept = 0.5
//! slope = 1.5
//!
//! [solver]
//! eps = 1e-4
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{CompetitionModel, Direction, GradientFamily, GradientSpec, ModelError};
use crate::pde::{InitialCondition, SteadyOptions};
use crate::wave::WaveSettings;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub s_a: f64,
    pub s_b: f64,
    #[serde(default = "one")]
    pub d_a: f64,
    #[serde(default = "one")]
    pub d_b: f64,
}

/// One gradient; which parameters are required depends on `family`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradientSection {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intercept: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knots: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default = "default_floor")]
    pub floor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitChoice {
    /// Centred tanh ramp between the pure states.
    #[default]
    Ramp,
    /// `A = 0`, `B = F_B(1)`.
    Corner,
    /// Sorted uniform random values drawn from `seed`.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_list: Option<Vec<f64>>,
    /// Grid nodes; absent means the smallest grid with `h <= sqrt(eps)/10`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Time-step cap; absent means `0.1 / sup|H|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_max: Option<f64>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default)]
    pub init: InitChoice,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Positions for the zero-diffusion demo.
    #[serde(default = "default_zero_cells")]
    pub zero_cells: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            eps: None,
            eps_list: None,
            n: None,
            tol: default_tol(),
            dt_max: None,
            max_steps: default_max_steps(),
            init: InitChoice::default(),
            seed: default_seed(),
            zero_cells: default_zero_cells(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveSection {
    /// Half-length `L` of the moving frame.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_length: Option<f64>,
    #[serde(default = "default_spacing")]
    pub spacing: f64,
    #[serde(default = "default_wave_tol")]
    pub tol: f64,
    #[serde(default = "default_tol_x")]
    pub tol_x: f64,
    /// Positions for `wavespeed --map`; absent means nine interior points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xs: Option<Vec<f64>>,
}

impl Default for WaveSection {
    fn default() -> Self {
        Self { half_length: None, spacing: default_spacing(), tol: default_wave_tol(), tol_x: default_tol_x(), xs: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    /// Any of `"csv"`, `"svg"`.
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { directory: default_directory(), formats: default_formats() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub gradient_a: GradientSection,
    pub gradient_b: GradientSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub wave: WaveSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn one() -> f64 {
    1.0
}
fn default_floor() -> f64 {
    0.1
}
fn default_tol() -> f64 {
    1e-8
}
fn default_max_steps() -> usize {
    5_000_000
}
fn default_seed() -> u64 {
    1
}
fn default_zero_cells() -> usize {
    201
}
fn default_spacing() -> f64 {
    0.02
}
fn default_wave_tol() -> f64 {
    1e-10
}
fn default_tol_x() -> f64 {
    1e-6
}
fn default_directory() -> PathBuf {
    PathBuf::from("out")
}
fn default_formats() -> Vec<String> {
    vec!["csv".into(), "svg".into()]
}

fn need(v: Option<f64>, family: &str, key: &str) -> Result<f64, ConfigError> {
    v.ok_or_else(|| ConfigError::Invalid(format!("{family} gradient needs `{key}`")))
}

impl GradientSection {
    pub fn to_spec(&self, direction: Direction) -> Result<GradientSpec, ConfigError> {
        let fam = self.family.as_str();
        let stray = |keys: &[(&str, bool)]| -> Result<(), ConfigError> {
            match keys.iter().find(|(_, set)| *set) {
                Some((k, _)) => Err(ConfigError::Invalid(format!("`{k}` does not apply to the {fam} family"))),
                None => Ok(()),
            }
        };
        let family = match fam {
            "linear" => {
                stray(&[("scale", self.scale.is_some()), ("rate", self.rate.is_some()), ("knots", self.knots.is_some()), ("values", self.values.is_some())])?;
                GradientFamily::Linear { intercept: need(self.intercept, fam, "intercept")?, slope: need(self.slope, fam, "slope")? }
            }
            "exponential" => {
                stray(&[("intercept", self.intercept.is_some()), ("slope", self.slope.is_some()), ("knots", self.knots.is_some()), ("values", self.values.is_some())])?;
                GradientFamily::Exponential { scale: need(self.scale, fam, "scale")?, rate: need(self.rate, fam, "rate")? }
            }
            "tabulated" => {
                stray(&[("intercept", self.intercept.is_some()), ("slope", self.slope.is_some()), ("scale", self.scale.is_some()), ("rate", self.rate.is_some())])?;
                let knots = self.knots.clone().ok_or_else(|| ConfigError::Invalid("tabulated gradient needs `knots`".into()))?;
                let values = self.values.clone().ok_or_else(|| ConfigError::Invalid("tabulated gradient needs `values`".into()))?;
                GradientFamily::Tabulated { knots, values }
            }
            other => return Err(ConfigError::Invalid(format!("unknown gradient family `{other}`"))),
        };
        Ok(GradientSpec::new(family, direction, self.floor)?)
    }

    pub fn from_spec(spec: &GradientSpec) -> Self {
        let mut s = GradientSection {
            family: String::new(),
            intercept: None,
            slope: None,
            scale: None,
            rate: None,
            knots: None,
            values: None,
            floor: spec.floor(),
        };
        match spec.family() {
            GradientFamily::Linear { intercept, slope } => {
                s.family = "linear".into();
                s.intercept = Some(*intercept);
                s.slope = Some(*slope);
            }
            GradientFamily::Exponential { scale, rate } => {
                s.family = "exponential".into();
                s.scale = Some(*scale);
                s.rate = Some(*rate);
            }
            GradientFamily::Tabulated { knots, values } => {
                s.family = "tabulated".into();
                s.knots = Some(knots.clone());
                s.values = Some(values.clone());
            }
        }
        s
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
    (line, column)
}

impl RunConfig {
    pub fn from_model(model: &CompetitionModel) -> Self {
        Self {
            model: ModelSection { s_a: model.s_a(), s_b: model.s_b(), d_a: model.d_a(), d_b: model.d_b() },
            gradient_a: GradientSection::from_spec(model.f_a()),
            gradient_b: GradientSection::from_spec(model.f_b()),
            solver: SolverSection::default(),
            wave: WaveSection::default(),
            output: OutputSection::default(),
        }
    }

    /// Parses TOML text; `origin` only labels error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
            ConfigError::Parse { path: origin.to_string(), line, column, message: e.message().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.display().to_string(), e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.solver;
        if let Some(e) = s.eps {
            if !(e >= 0.0) || !e.is_finite() {
                return Err(ConfigError::Invalid(format!("solver.eps must be >= 0, got {e}")));
            }
        }
        if let Some(list) = &s.eps_list {
            if list.is_empty() || list.iter().any(|e| !(*e > 0.0)) || list.windows(2).any(|w| !(w[1] < w[0])) {
                return Err(ConfigError::Invalid("solver.eps_list must be positive and strictly decreasing".into()));
            }
        }
        if s.n.is_some_and(|n| n < 3) {
            return Err(ConfigError::Invalid("solver.n must be at least 3".into()));
        }
        if !(s.tol > 0.0) {
            return Err(ConfigError::Invalid(format!("solver.tol must be positive, got {}", s.tol)));
        }
        if s.dt_max.is_some_and(|d| !(d > 0.0)) {
            return Err(ConfigError::Invalid("solver.dt_max must be positive".into()));
        }
        let w = &self.wave;
        if !(w.spacing > 0.0) || !(w.tol > 0.0) || !(w.tol_x > 0.0) || w.half_length.is_some_and(|l| !(l > 0.0)) {
            return Err(ConfigError::Invalid("wave settings must be positive".into()));
        }
        if let Some(f) = self.output.formats.iter().find(|f| !matches!(f.as_str(), "csv" | "svg")) {
            return Err(ConfigError::Invalid(format!("unknown output format `{f}`")));
        }
        self.build_model().map(|_| ())
    }

    pub fn build_model(&self) -> Result<CompetitionModel, ConfigError> {
        let m = &self.model;
        Ok(CompetitionModel::new(
            self.gradient_a.to_spec(Direction::Decreasing)?,
            self.gradient_b.to_spec(Direction::Increasing)?,
            m.s_a,
            m.s_b,
            m.d_a,
            m.d_b,
        )?)
    }

    pub fn steady_options(&self, strict: bool) -> SteadyOptions {
        SteadyOptions {
            tol: self.solver.tol,
            strict,
            dt_max: self.solver.dt_max,
            max_steps: self.solver.max_steps,
            ..SteadyOptions::default()
        }
    }

    pub fn wave_settings(&self) -> WaveSettings {
        WaveSettings {
            half_length: self.wave.half_length,
            spacing: self.wave.spacing,
            tol: self.wave.tol,
            ..WaveSettings::default()
        }
    }

    /// The ramp and corner choices; random data needs a grid and seed and is
    /// built by the caller.
    pub fn initial_condition(&self) -> Option<InitialCondition> {
        match self.solver.init {
            InitChoice::Ramp => Some(InitialCondition::MonotoneRamp { center: None }),
            InitChoice::Corner => Some(InitialCondition::Corner),
            InitChoice::Random => None,
        }
    }

    pub fn wants(&self, format: &str) -> bool {
        self.output.formats.iter().any(|f| f == format)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REF: &str = r#"
[model]
s_a = 2.0
s_b = 2.0

[gradient_a]
family = "linear"
intercept = 2.0
slope = -1.5

[gradient_b]
family = "linear"
intercept = 0.5
slope = 1.5

[solver]
eps = 1e-4
"#;

    #[test]
    fn parses_reference() {
        let c = RunConfig::parse(REF, "ref").unwrap();
        assert_eq!(c.build_model().unwrap(), CompetitionModel::reference_linear());
        assert_eq!(c.solver.eps, Some(1e-4));
        assert_eq!(c.solver.n, None);
    }

    #[test]
    fn round_trip() {
        let c = RunConfig::parse(REF, "ref").unwrap();
        let again = RunConfig::parse(&c.to_toml(), "again").unwrap();
        assert_eq!(c, again);
        let e = RunConfig::from_model(&CompetitionModel::exponential_figure());
        assert_eq!(RunConfig::parse(&e.to_toml(), "e").unwrap().build_model().unwrap(), CompetitionModel::exponential_figure());
    }

    #[test]
    fn unknown_key_has_position() {
        let bad = REF.replace("slope = 1.5", "slope = 1.5\nslpoe = 2");
        match RunConfig::parse(&bad, "bad") {
            Err(ConfigError::Parse { line, column, .. }) => {
                assert_eq!(line, 15);
                assert_eq!(column, 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn family_parameters_are_checked() {
        let bad = REF.replace("intercept = 2.0\n", "rate = 1.0\n");
        assert!(matches!(RunConfig::parse(&bad, "bad"), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn line_column_counts_from_one() {
        assert_eq!(line_column("ab\ncd", 0), (1, 1));
        assert_eq!(line_column("ab\ncd", 4), (2, 2));
    }
}
