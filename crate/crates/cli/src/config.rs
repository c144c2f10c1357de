//! Scenario configuration: a flat JSON document, optionally overridden by
//! command-line flags, validated into a [`ScenarioConfig`].

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use idjc_core::phase_space::GridSpec;
use idjc_core::{default_dim, CatSpec, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    PurityMixture,
    InversionCat,
    QfuncMixture,
    CatTransition,
    OrdinaryContrast,
}

impl Scenario {
    fn uses_cat(self) -> bool {
        matches!(self, Scenario::InversionCat | Scenario::CatTransition)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// `"auto"` or an explicit Fock dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DimSetting {
    Fixed(usize),
    Named(String),
}

impl FromStr for DimSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.parse::<usize>() {
            Ok(n) => Ok(DimSetting::Fixed(n)),
            Err(_) if s == "auto" => Ok(DimSetting::Named(s.to_owned())),
            Err(_) => Err(format!("expected \"auto\" or a positive integer, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl FromStr for GridConfig {
    type Err = String;

    /// `x_min,x_max,y_min,y_max,nx,ny`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [x0, x1, y0, y1, nx, ny] = parts[..] else {
            return Err(format!("expected x_min,x_max,y_min,y_max,nx,ny, got {s:?}"));
        };
        let float = |v: &str| v.parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
        let int = |v: &str| v.parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
        Ok(GridConfig {
            x_min: float(x0)?,
            x_max: float(x1)?,
            y_min: float(y0)?,
            y_max: float(y1)?,
            nx: int(nx)?,
            ny: int(ny)?,
        })
    }
}

/// Configuration as read from disk; every field is optional until
/// validation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub scenario: Option<Scenario>,
    pub alpha: Option<f64>,
    pub parity_r: Option<i32>,
    pub lambda: Option<f64>,
    pub tau_max: Option<f64>,
    pub tau_steps: Option<usize>,
    pub dim: Option<DimSetting>,
    pub grid: Option<GridConfig>,
    pub q_taus: Option<Vec<f64>>,
    pub output_path: Option<PathBuf>,
    pub output_format: Option<OutputFormat>,
}

impl RawConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Config(vec![FieldError::new("config", format!("invalid JSON document: {e}"))])
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(self, other: RawConfig) -> RawConfig {
        RawConfig {
            scenario: other.scenario.or(self.scenario),
            alpha: other.alpha.or(self.alpha),
            parity_r: other.parity_r.or(self.parity_r),
            lambda: other.lambda.or(self.lambda),
            tau_max: other.tau_max.or(self.tau_max),
            tau_steps: other.tau_steps.or(self.tau_steps),
            dim: other.dim.or(self.dim),
            grid: other.grid.or(self.grid),
            q_taus: other.q_taus.or(self.q_taus),
            output_path: other.output_path.or(self.output_path),
            output_format: other.output_format.or(self.output_format),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: &str, message: impl Into<String>) -> Self {
        Self { field: field.to_owned(), message: message.into() }
    }
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// A complete, validated scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub alpha: f64,
    pub parity_r: i32,
    pub lambda: f64,
    pub tau_max: f64,
    pub tau_steps: usize,
    pub dim: usize,
    pub grid: Option<GridConfig>,
    pub q_taus: Vec<f64>,
    pub output_path: PathBuf,
    pub output_format: OutputFormat,
}

impl ScenarioConfig {
    /// `tau_steps` evenly spaced samples of `[0, tau_max]`, both ends
    /// included.
    pub fn tau_grid(&self) -> Vec<f64> {
        let last = (self.tau_steps - 1) as f64;
        (0..self.tau_steps).map(|k| self.tau_max * k as f64 / last).collect()
    }

    pub fn cat_spec(&self) -> CatSpec {
        CatSpec::new(C64::new(self.alpha, 0.0), self.parity_r)
            .expect("validated configs hold a valid cat")
    }

    pub fn grid_spec(&self) -> Option<GridSpec> {
        self.grid.map(|g| {
            GridSpec::new(g.x_min, g.x_max, g.y_min, g.y_max, g.nx, g.ny)
                .expect("validated configs hold a valid grid")
        })
    }
}

/// Defaults follow the figure parameters: `α = 5`, `λ = 1`, even cat for
/// the cat scenarios, Q snapshots at `τ ∈ {0, π/4, π/2}`.
pub fn validate_config(raw: &RawConfig) -> Result<ScenarioConfig, Vec<FieldError>> {
    let mut errors = Vec::new();

    let scenario = raw.scenario;
    if scenario.is_none() {
        errors.push(FieldError::new("scenario", "missing"));
    }

    let alpha = raw.alpha.unwrap_or(5.0);
    if !alpha.is_finite() {
        errors.push(FieldError::new("alpha", format!("must be finite, got {alpha}")));
    }

    let uses_cat = scenario.is_some_and(Scenario::uses_cat);
    let parity_r = raw.parity_r.unwrap_or(if uses_cat { 1 } else { 0 });
    if !(-1..=1).contains(&parity_r) {
        errors.push(FieldError::new("parity_r", format!("must be -1, 0 or 1, got {parity_r}")));
    } else if uses_cat && parity_r == -1 && alpha == 0.0 {
        errors.push(FieldError::new("parity_r", "odd cat requires alpha != 0"));
    }
    if scenario == Some(Scenario::CatTransition) && alpha == 0.0 {
        errors.push(FieldError::new("alpha", "cat-transition compares against the odd cat at i*alpha, which needs alpha != 0"));
    }

    let lambda = raw.lambda.unwrap_or(1.0);
    if !(lambda > 0.0 && lambda.is_finite()) {
        errors.push(FieldError::new("lambda", format!("must be positive, got {lambda}")));
    }

    let default_tau_max = match scenario {
        Some(Scenario::OrdinaryContrast) => TAU * (alpha * alpha + 1.0).sqrt(),
        _ => PI,
    };
    let tau_max = raw.tau_max.unwrap_or(default_tau_max);
    if !(tau_max > 0.0 && tau_max.is_finite()) {
        errors.push(FieldError::new("tau_max", format!("must be positive, got {tau_max}")));
    }

    let tau_steps = raw.tau_steps.unwrap_or(601);
    if tau_steps < 2 {
        errors.push(FieldError::new("tau_steps", format!("must be at least 2, got {tau_steps}")));
    }

    let dim = match &raw.dim {
        None => Some(default_dim(C64::new(alpha, 0.0))),
        Some(DimSetting::Named(s)) if s == "auto" => Some(default_dim(C64::new(alpha, 0.0))),
        Some(DimSetting::Named(s)) => {
            errors.push(FieldError::new("dim", format!("expected \"auto\" or an integer, got {s:?}")));
            None
        }
        Some(DimSetting::Fixed(n)) if *n < 2 => {
            errors.push(FieldError::new("dim", format!("must be at least 2, got {n}")));
            None
        }
        Some(DimSetting::Fixed(n)) => Some(*n),
    };

    let grid = raw.grid;
    match (scenario, grid) {
        (Some(Scenario::QfuncMixture), None) => {
            errors.push(FieldError::new("grid", "required for qfunc-mixture (x_min, x_max, y_min, y_max, nx, ny)"));
        }
        (_, Some(g)) => {
            if let Err(e) = GridSpec::new(g.x_min, g.x_max, g.y_min, g.y_max, g.nx, g.ny) {
                errors.push(FieldError::new("grid", e.to_string()));
            }
        }
        _ => {}
    }

    let q_taus = raw.q_taus.clone().unwrap_or_else(|| vec![0.0, FRAC_PI_4, FRAC_PI_2]);
    if q_taus.is_empty() {
        errors.push(FieldError::new("q_taus", "must list at least one time"));
    }
    if let Some(bad) = q_taus.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        errors.push(FieldError::new("q_taus", format!("times must be non-negative, got {bad}")));
    }

    let output_path = raw.output_path.clone();
    if output_path.is_none() {
        errors.push(FieldError::new("output_path", "missing"));
    }

    if !errors.is_empty() {
        return Err(errors);
    }
    Ok(ScenarioConfig {
        scenario: scenario.expect("checked above"),
        alpha,
        parity_r,
        lambda,
        tau_max,
        tau_steps,
        dim: dim.expect("checked above"),
        grid,
        q_taus,
        output_path: output_path.expect("checked above"),
        output_format: raw.output_format.unwrap_or_default(),
    })
}
