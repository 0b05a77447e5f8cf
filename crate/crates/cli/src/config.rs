//! Run configuration: a TOML document with one table per concern. Unknown
//! keys are rejected and reported with their full path.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use dispersplit_core::harness::CommutatorCheckSpec;
use dispersplit_core::splitting::REFERENCE_TOLERANCE;
use dispersplit_core::{
    indices_for, BurgersMethod, BurgersSolveOptions, EquationPreset, GrowthPolicy,
    InitialCondition, PeriodicGrid, PresetName, SchemeKind, SobolevIndices, StudySpec,
};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub equation: EquationConfig,
    pub grid: GridConfig,
    pub initial: InitialCondition,
    pub scheme: SchemeConfig,
    #[serde(default)]
    pub burgers: BurgersConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub commutator: CommutatorConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationConfig {
    pub preset: PresetName,
    /// Benney–Lin dissipation weight.
    pub beta: Option<f64>,
    /// Reject symbols that amplify any resolved mode.
    #[serde(default = "yes")]
    pub strict: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(default = "two_pi")]
    pub length: Length,
}

/// A positive number, or a multiple of π written as `"pi"`, `"2pi"`, ….
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Length {
    Value(f64),
    Text(String),
}

impl Length {
    pub fn resolve(&self) -> Result<f64, String> {
        match self {
            Length::Value(v) => Ok(*v),
            Length::Text(text) => {
                let t = text.trim();
                let factor = t
                    .strip_suffix("pi")
                    .ok_or_else(|| format!("grid.length: cannot read `{text}`"))?
                    .trim()
                    .trim_end_matches('*');
                let factor = if factor.is_empty() {
                    1.0
                } else {
                    factor
                        .parse::<f64>()
                        .map_err(|_| format!("grid.length: cannot read `{text}`"))?
                };
                Ok(factor * PI)
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    #[serde(default = "strang")]
    pub kind: SchemeKind,
    pub t_final: f64,
    pub dt: Option<f64>,
    pub dt_list: Option<Vec<f64>>,
    #[serde(default = "one")]
    pub r: u32,
    pub ref_dt: Option<f64>,
    #[serde(default = "reference_tolerance")]
    pub reference_tolerance: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BurgersConfig {
    #[serde(default)]
    pub method: BurgersMethod,
    #[serde(default = "burgers_tolerance")]
    pub tolerance: f64,
    #[serde(default = "max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "safety_fraction")]
    pub safety_fraction: f64,
    pub rk_substeps: Option<usize>,
}

impl Default for BurgersConfig {
    fn default() -> Self {
        Self {
            method: BurgersMethod::default(),
            tolerance: burgers_tolerance(),
            max_iterations: max_iterations(),
            safety_fraction: safety_fraction(),
            rk_substeps: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Dat,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "all_formats")]
    pub formats: Vec<Format>,
    /// Off by default so that repeated runs write identical bytes.
    #[serde(default)]
    pub record_wallclock: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            formats: all_formats(),
            record_wallclock: false,
        }
    }
}

impl OutputConfig {
    pub fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommutatorConfig {
    /// Presets to check; all four when absent.
    pub presets: Option<Vec<PresetName>>,
    #[serde(default = "twenty")]
    pub seeds: u64,
    #[serde(default)]
    pub first_seed: u64,
    /// Defaults to `N/6`.
    pub max_mode: Option<u32>,
    #[serde(default = "unit")]
    pub amplitude: f64,
    #[serde(default = "yes")]
    pub include_constant: bool,
    /// Scales the symbol fed to the expanded routes; 1 means no fault.
    #[serde(default = "unit")]
    pub coefficient_scale: f64,
    #[serde(default = "commutator_tolerance")]
    pub tolerance: f64,
}

impl Default for CommutatorConfig {
    fn default() -> Self {
        Self {
            presets: None,
            seeds: twenty(),
            first_seed: 0,
            max_mode: None,
            amplitude: unit(),
            include_constant: true,
            coefficient_scale: unit(),
            tolerance: commutator_tolerance(),
        }
    }
}

fn yes() -> bool {
    true
}
fn one() -> u32 {
    1
}
fn twenty() -> u64 {
    20
}
fn unit() -> f64 {
    1.0
}
fn two_pi() -> Length {
    Length::Value(2.0 * PI)
}
fn strang() -> SchemeKind {
    SchemeKind::Strang
}
fn reference_tolerance() -> f64 {
    REFERENCE_TOLERANCE
}
fn burgers_tolerance() -> f64 {
    BurgersSolveOptions::default().tolerance
}
fn max_iterations() -> usize {
    BurgersSolveOptions::default().max_iterations
}
fn safety_fraction() -> f64 {
    BurgersSolveOptions::default().safety_fraction
}
fn commutator_tolerance() -> f64 {
    1e-8
}
fn default_directory() -> PathBuf {
    PathBuf::from("out")
}
fn all_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json, Format::Dat]
}

/// Reads `path`, applies `key.path=value` overrides and deserializes.
pub fn load(path: &Path, overrides: &[String]) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse(&text, overrides)
}

pub fn parse(text: &str, overrides: &[String]) -> Result<RunConfig, String> {
    let mut table: toml::Table = text.parse().map_err(|e| format!("malformed config: {e}"))?;
    for item in overrides {
        apply_override(&mut table, item)?;
    }
    let value = toml::Value::Table(table);
    let config: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        format!("config key `{path}`: {}", e.into_inner())
    })?;
    config.check()?;
    Ok(config)
}

fn apply_override(table: &mut toml::Table, item: &str) -> Result<(), String> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| format!("--set expects key=value, got `{item}`"))?;
    let value = parse_value(raw.trim());
    let parts: Vec<&str> = key.trim().split('.').collect();
    let (last, parents) = parts.split_last().expect("split yields one part");
    let mut current = table;
    for part in parents {
        current = current
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| format!("--set {key}: `{part}` is not a table"))?;
    }
    current.insert(last.to_string(), value);
    Ok(())
}

/// TOML literal if it parses as one, otherwise a bare string.
fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

impl RunConfig {
    /// Cross-block checks that serde cannot express.
    fn check(&self) -> Result<(), String> {
        if let InitialCondition::Soliton { .. } = self.initial {
            if self.equation.preset != PresetName::Kdv {
                return Err(format!(
                    "initial.family = \"soliton\" is a KdV traveling wave and cannot be used with preset `{}`",
                    self.equation.preset
                ));
            }
        }
        self.initial
            .validate()
            .map_err(|e| format!("initial: {e}"))?;
        self.grid()?;
        self.preset()?;
        self.burgers_options()
            .validate()
            .map_err(|e| format!("burgers: {e}"))?;
        if !(self.scheme.t_final >= 0.0 && self.scheme.t_final.is_finite()) {
            return Err("scheme.t_final must be non-negative".into());
        }
        if self.equation.beta.is_some() && self.equation.preset != PresetName::BenneyLin {
            return Err("equation.beta only applies to benney-lin".into());
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<PeriodicGrid, String> {
        let length = self.grid.length.resolve()?;
        PeriodicGrid::new(self.grid.n, length).map_err(|e| format!("grid: {e}"))
    }

    pub fn preset(&self) -> Result<EquationPreset, String> {
        dispersplit_core::model::preset(self.equation.preset, self.equation.beta.unwrap_or(0.0))
            .map_err(|e| format!("equation: {e}"))
    }

    pub fn indices(&self) -> Result<SobolevIndices, String> {
        let ell = self.preset()?.symbol.degree() as u32;
        indices_for(self.scheme.r, ell).map_err(|e| format!("scheme.r: {e}"))
    }

    pub fn growth(&self) -> GrowthPolicy {
        if self.equation.strict {
            GrowthPolicy::Reject
        } else {
            GrowthPolicy::Allow
        }
    }

    pub fn burgers_options(&self) -> BurgersSolveOptions {
        BurgersSolveOptions {
            tolerance: self.burgers.tolerance,
            max_iterations: self.burgers.max_iterations,
            safety_fraction: self.burgers.safety_fraction,
            method: self.burgers.method,
            rk_substeps: self.burgers.rk_substeps,
        }
    }

    pub fn dt(&self) -> Result<f64, String> {
        self.scheme
            .dt
            .ok_or_else(|| "scheme.dt is required for this command".to_string())
    }

    pub fn study(&self) -> Result<StudySpec, String> {
        let dt_list = self
            .scheme
            .dt_list
            .clone()
            .ok_or_else(|| "scheme.dt_list is required for this command".to_string())?;
        let grid = self.grid()?;
        Ok(StudySpec {
            preset: self.preset()?,
            n_points: grid.n_points(),
            length: grid.length(),
            initial: self.initial.clone(),
            r: self.scheme.r,
            t_final: self.scheme.t_final,
            dt_list,
            scheme: self.scheme.kind,
            ref_dt: self.scheme.ref_dt,
            burgers: self.burgers_options(),
            growth: self.growth(),
            reference_tolerance: self.scheme.reference_tolerance,
        })
    }

    pub fn commutator_spec(&self) -> Result<CommutatorCheckSpec, String> {
        let grid = self.grid()?;
        let names = self
            .commutator
            .presets
            .clone()
            .unwrap_or_else(|| PresetName::ALL.to_vec());
        let beta = self.equation.beta.unwrap_or(1.0);
        let presets = names
            .into_iter()
            .map(|name| dispersplit_core::model::preset(name, beta))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format!("commutator.presets: {e}"))?;
        let c = &self.commutator;
        Ok(CommutatorCheckSpec {
            presets,
            n_points: grid.n_points(),
            length: grid.length(),
            seeds: c.seeds,
            first_seed: c.first_seed,
            max_mode: c.max_mode.unwrap_or((grid.n_points() / 6) as u32),
            amplitude: c.amplitude,
            include_constant: c.include_constant,
            route2_coefficient_scale: c.coefficient_scale,
            tolerance: c.tolerance,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[equation]
preset = "kdv"

[grid]
n = 64
length = "2pi"

[initial]
family = "sine"
amplitude = 0.5
mode = 1

[scheme]
t_final = 1.0
dt = 0.125
"#;

    #[test]
    fn defaults_fill_in() {
        let c = parse(BASE, &[]).unwrap();
        assert_eq!(c.scheme.kind, SchemeKind::Strang);
        assert_eq!(c.scheme.r, 1);
        assert!(c.equation.strict);
        assert!((c.grid().unwrap().length() - 2.0 * PI).abs() < 1e-15);
        assert_eq!(c.output.formats.len(), 3);
        assert!(!c.output.record_wallclock);
        assert_eq!(c.indices().unwrap().p, 6);
    }

    #[test]
    fn unknown_key_reports_path() {
        let text = BASE.replace("dt = 0.125", "dt = 0.125\nstep = 3");
        let err = parse(&text, &[]).unwrap_err();
        assert!(err.contains("scheme"), "{err}");
        assert!(err.contains("step"), "{err}");
    }

    #[test]
    fn overrides_apply() {
        let c = parse(
            BASE,
            &[
                "scheme.dt=0.25".into(),
                "scheme.kind=lie".into(),
                "grid.length=4pi".into(),
                "output.directory=results".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.scheme.dt, Some(0.25));
        assert_eq!(c.scheme.kind, SchemeKind::Lie);
        assert!((c.grid().unwrap().length() - 4.0 * PI).abs() < 1e-14);
        assert_eq!(c.output.directory, PathBuf::from("results"));
    }

    #[test]
    fn soliton_requires_kdv() {
        let text = BASE
            .replace("preset = \"kdv\"", "preset = \"kawahara\"")
            .replace(
                "family = \"sine\"\namplitude = 0.5\nmode = 1",
                "family = \"soliton\"\nc = 0.3",
            );
        assert!(parse(&text, &[]).unwrap_err().contains("soliton"));
    }

    #[test]
    fn lengths() {
        assert!((Length::Text("pi".into()).resolve().unwrap() - PI).abs() < 1e-15);
        assert!((Length::Text("4pi".into()).resolve().unwrap() - 4.0 * PI).abs() < 1e-15);
        assert!(Length::Text("tau".into()).resolve().is_err());
    }
}
