//! Declarative sweep configuration (TOML).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::benchmarks::BenchmarkKind;
use crate::channels::DEFAULT_QUAD_ORDER;
use crate::channels::{PhaseDiffusionSpec, ThermalSpec};
use crate::detection::PnrModel;
use crate::fock::DEFAULT_TAIL_TOL;
use crate::receiver::Numerics;

/// Invalid configuration, naming the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Ideal,
    Pnr,
    PhaseDiffusion,
    Thermal,
    /// Phase diffusion and thermal noise together.
    Combined,
    Benchmarks,
    /// Largest thermal occupation at which the receiver still beats the
    /// squeezed-state SQL.
    TolerableThermal,
    /// Photon-number populations of the states along the receiver.
    Populations,
}

impl Scenario {
    /// Swept parameters the scenario reads; others must keep their
    /// defaults.
    pub fn parameters(&self) -> &'static [&'static str] {
        const DET: &str = "detector.M";
        const ETA: &str = "detector.eta";
        const NU: &str = "detector.nu";
        const SIGMA: &str = "noise.sigma";
        const NT: &str = "noise.n_t";
        match self {
            Scenario::Ideal => &[DET],
            Scenario::Pnr => &[DET, ETA, NU],
            Scenario::PhaseDiffusion => &[DET, ETA, NU, SIGMA],
            Scenario::Thermal => &[DET, ETA, NU, NT],
            Scenario::Combined => &[DET, ETA, NU, SIGMA, NT],
            Scenario::Benchmarks => &[],
            Scenario::TolerableThermal => &[DET, ETA, NU],
            Scenario::Populations => &[SIGMA, NT],
        }
    }
}

/// A scalar or a list; lists are swept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn values(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Energy grid: either `start/stop/count/spacing` or explicit `values`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default)]
    pub spacing: Spacing,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl GridSpec {
    pub fn linear(start: f64, stop: f64, count: usize) -> Self {
        Self {
            start: Some(start),
            stop: Some(stop),
            count: Some(count),
            ..Self::default()
        }
    }

    /// Grid points; call after [`SweepConfig::validate`].
    pub fn points(&self) -> Vec<f64> {
        if let Some(v) = &self.values {
            return v.clone();
        }
        let (a, b, n) = (
            self.start.unwrap_or(0.0),
            self.stop.unwrap_or(0.0),
            self.count.unwrap_or(0),
        );
        let last = (n.max(2) - 1) as f64;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    return b;
                }
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => a + (b - a) * t,
                    Spacing::Log => (a.ln() + (b.ln() - a.ln()) * t).exp(),
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if let Some(v) = &self.values {
            if self.start.is_some() || self.stop.is_some() || self.count.is_some() {
                return Err(ConfigError::new(
                    "grid",
                    "give either values or start/stop/count",
                ));
            }
            if v.is_empty() {
                return Err(ConfigError::new("grid.values", "must not be empty"));
            }
            if let Some(x) = v.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
                return Err(ConfigError::new(
                    "grid.values",
                    format!("energy {x} must be finite and >= 0"),
                ));
            }
            return Ok(());
        }
        let start = self
            .start
            .ok_or_else(|| ConfigError::new("grid.start", "missing"))?;
        let stop = self
            .stop
            .ok_or_else(|| ConfigError::new("grid.stop", "missing"))?;
        let count = self
            .count
            .ok_or_else(|| ConfigError::new("grid.count", "missing"))?;
        if count < 2 {
            return Err(ConfigError::new(
                "grid.count",
                format!("must be at least 2, got {count}"),
            ));
        }
        if !(start >= 0.0 && start.is_finite() && stop.is_finite()) {
            return Err(ConfigError::new("grid.start", "must be finite and >= 0"));
        }
        if start >= stop {
            return Err(ConfigError::new(
                "grid",
                format!("start {start} must be below stop {stop}"),
            ));
        }
        if self.spacing == Spacing::Log && start <= 0.0 {
            return Err(ConfigError::new(
                "grid.start",
                "log spacing needs start > 0",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    #[serde(rename = "M", default = "default_m")]
    pub m: OneOrMany<usize>,
    #[serde(default = "default_one")]
    pub eta: OneOrMany<f64>,
    #[serde(default = "default_zero")]
    pub nu: OneOrMany<f64>,
}

fn default_m() -> OneOrMany<usize> {
    OneOrMany::One(1)
}

fn default_one() -> OneOrMany<f64> {
    OneOrMany::One(1.0)
}

fn default_zero() -> OneOrMany<f64> {
    OneOrMany::One(0.0)
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            m: default_m(),
            eta: default_one(),
            nu: default_zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    #[serde(default = "default_zero")]
    pub sigma: OneOrMany<f64>,
    #[serde(default = "default_zero")]
    pub n_t: OneOrMany<f64>,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            sigma: default_zero(),
            n_t: default_zero(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorsConfig {
    pub p0: f64,
    pub p1: f64,
}

impl Default for PriorsConfig {
    fn default() -> Self {
        Self { p0: 0.5, p1: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalConfig {
    /// Squeezing fraction; optimal for each energy when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsConfig {
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
    #[serde(default = "default_quad_order")]
    pub quad_order: usize,
    /// Largest photon number reported by the populations scenario.
    #[serde(default = "default_max_photon")]
    pub max_photon: usize,
}

fn default_tail_tol() -> f64 {
    DEFAULT_TAIL_TOL
}

fn default_quad_order() -> usize {
    DEFAULT_QUAD_ORDER
}

fn default_max_photon() -> usize {
    20
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            tail_tol: default_tail_tol(),
            quad_order: default_quad_order(),
            max_photon: default_max_photon(),
        }
    }
}

impl NumericsConfig {
    pub fn numerics(&self) -> Numerics {
        Numerics {
            tail_tol: self.tail_tol,
            quad_order: self.quad_order,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json_path: Option<PathBuf>,
    #[serde(default)]
    pub ratio_benchmarks: Vec<BenchmarkKind>,
    /// Denominator of the ratio columns; the receiver error when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_reference: Option<BenchmarkKind>,
}

/// A curve of `N` for crossover search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Curve {
    /// Receiver error under the configured scenario.
    Dsr,
    Benchmark(BenchmarkKind),
    Constant(f64),
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Curve::Dsr => f.write_str("DSR"),
            Curve::Benchmark(b) => write!(f, "{b}"),
            Curve::Constant(c) => write!(f, "{c}"),
        }
    }
}

impl FromStr for Curve {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let s = s.trim();
        if s == "DSR" {
            return Ok(Curve::Dsr);
        }
        if let Ok(c) = s.parse::<f64>() {
            return Ok(Curve::Constant(c));
        }
        s.parse::<BenchmarkKind>()
            .map(Curve::Benchmark)
            .map_err(|e| ConfigError::new("crossover", e.to_string()))
    }
}

impl TryFrom<String> for Curve {
    type Error = ConfigError;

    fn try_from(s: String) -> Result<Self, ConfigError> {
        s.parse()
    }
}

impl From<Curve> for String {
    fn from(c: Curve) -> String {
        c.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossoverConfig {
    pub curve_a: Curve,
    pub curve_b: Curve,
    pub bracket: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub scenario: Scenario,
    #[serde(alias = "N_grid")]
    pub grid: GridSpec,
    #[serde(default)]
    pub detector: DetectorConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub priors: PriorsConfig,
    #[serde(default)]
    pub signal: SignalConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossover: Option<CrossoverConfig>,
}

impl SweepConfig {
    pub fn new(scenario: Scenario, grid: GridSpec) -> Self {
        Self {
            name: None,
            scenario,
            grid,
            detector: DetectorConfig::default(),
            noise: NoiseConfig::default(),
            priors: PriorsConfig::default(),
            signal: SignalConfig::default(),
            numerics: NumericsConfig::default(),
            outputs: OutputsConfig::default(),
            crossover: None,
        }
    }

    /// Parses and validates.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: SweepConfig =
            toml::from_str(text).map_err(|e| ConfigError::new("config", e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.grid.validate()?;
        let ms = self.detector.m.values();
        let etas = self.detector.eta.values();
        let nus = self.detector.nu.values();
        for (field, len) in [
            ("detector.M", ms.len()),
            ("detector.eta", etas.len()),
            ("detector.nu", nus.len()),
        ] {
            if len == 0 {
                return Err(ConfigError::new(field, "must not be empty"));
            }
        }
        for &m in &ms {
            for &eta in &etas {
                for &nu in &nus {
                    PnrModel::new(m, eta, nu)
                        .map_err(|e| ConfigError::new("detector", e.to_string()))?;
                }
            }
        }
        let sigmas = self.noise.sigma.values();
        let nts = self.noise.n_t.values();
        if sigmas.is_empty() {
            return Err(ConfigError::new("noise.sigma", "must not be empty"));
        }
        if nts.is_empty() {
            return Err(ConfigError::new("noise.n_t", "must not be empty"));
        }
        for &s in &sigmas {
            PhaseDiffusionSpec::new(s, self.numerics.quad_order)
                .map_err(|e| ConfigError::new("noise.sigma", e.to_string()))?;
        }
        for &t in &nts {
            ThermalSpec::new(t).map_err(|e| ConfigError::new("noise.n_t", e.to_string()))?;
        }
        let PriorsConfig { p0, p1 } = self.priors;
        if !(p0 >= 0.0 && p1 >= 0.0 && (p0 + p1 - 1.0).abs() <= 1e-12) {
            return Err(ConfigError::new(
                "priors",
                format!("need p0, p1 >= 0 summing to 1, got ({p0}, {p1})"),
            ));
        }
        if let Some(b) = self.signal.beta {
            if !(0.0..=1.0).contains(&b) {
                return Err(ConfigError::new(
                    "signal.beta",
                    format!("must lie in [0, 1], got {b}"),
                ));
            }
        }
        let tol = self.numerics.tail_tol;
        if !(tol > 0.0 && tol < 1.0) {
            return Err(ConfigError::new(
                "numerics.tail_tol",
                format!("must lie in (0, 1), got {tol}"),
            ));
        }
        if self.numerics.quad_order.is_multiple_of(2) {
            return Err(ConfigError::new("numerics.quad_order", "must be odd"));
        }
        if let Some(c) = &self.crossover {
            let [lo, hi] = c.bracket;
            if !(lo < hi && lo >= 0.0) {
                return Err(ConfigError::new(
                    "crossover.bracket",
                    format!("need 0 <= lo < hi, got [{lo}, {hi}]"),
                ));
            }
        }
        let used = self.scenario.parameters();
        let unused = |field: &str, default: bool| -> Result<(), ConfigError> {
            if !default && !used.contains(&field) {
                return Err(ConfigError::new(
                    field,
                    format!("not used by scenario {:?}; remove it", self.scenario),
                ));
            }
            Ok(())
        };
        unused("detector.M", ms == [1])?;
        unused("detector.eta", etas == [1.0])?;
        unused("detector.nu", nus == [0.0])?;
        unused("noise.sigma", sigmas == [0.0])?;
        unused("noise.n_t", nts == [0.0])?;
        if self.scenario == Scenario::TolerableThermal
            && self.grid.points().iter().any(|n| *n <= 0.0)
        {
            return Err(ConfigError::new("grid", "tolerable_thermal needs N > 0"));
        }
        Ok(())
    }
}

/// A figure recipe: one sweep per panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Recipe {
    pub figure: u32,
    pub panels: Vec<SweepConfig>,
}

impl Recipe {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let recipe: Recipe =
            toml::from_str(text).map_err(|e| ConfigError::new("recipe", e.to_string()))?;
        for (i, p) in recipe.panels.iter().enumerate() {
            if p.name.is_none() {
                return Err(ConfigError::new(format!("panels[{i}].name"), "missing"));
            }
            p.validate()
                .map_err(|e| ConfigError::new(format!("panels[{i}].{}", e.field), e.message))?;
        }
        Ok(recipe)
    }
}

const RECIPES: [(u32, &str); 5] = [
    (3, include_str!("../../recipes/fig3.toml")),
    (4, include_str!("../../recipes/fig4.toml")),
    (5, include_str!("../../recipes/fig5.toml")),
    (6, include_str!("../../recipes/fig6.toml")),
    (9, include_str!("../../recipes/fig9.toml")),
];

/// Figure numbers with a built-in recipe.
pub fn recipe_figures() -> Vec<u32> {
    RECIPES.iter().map(|(f, _)| *f).collect()
}

pub fn builtin_recipe(figure: u32) -> Result<Recipe, ConfigError> {
    let text = RECIPES
        .iter()
        .find(|(f, _)| *f == figure)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            ConfigError::new(
                "figure",
                format!(
                    "no recipe for figure {figure}; available: {:?}",
                    recipe_figures()
                ),
            )
        })?;
    Recipe::from_toml(text)
}
