//! Scenario evaluation. Every scenario samples its time axis in parallel
//! and assembles rows in index order, so output never depends on the
//! thread count.

use std::path::{Path, PathBuf};

use idjc_core::oracles::{inversion_cat_closed, purity_mixture_closed, revival_time};
use idjc_core::phase_space::{q_grid, q_mixture_closed};
use idjc_core::{
    atomic_inversion, evolve_field, excited_population, fidelity_with_pure, make_cat, make_coherent, mix,
    pure_density, purity_defect, CatSpec, CouplingMode, DensityMatrix, EvolutionParams, C64,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Scenario, ScenarioConfig};
use crate::error::CliError;
use crate::output;

/// Tolerance for numeric and closed-form columns in `--self-check`.
pub const SELF_CHECK_TOL: f64 = 1e-9;
const RANGE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>, rows: Vec<Vec<f64>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == columns.len()));
        Self { columns, rows }
    }

    pub fn columns(&self) -> &[&'static str] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// One output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub path: PathBuf,
    /// Snapshot time for per-τ outputs.
    pub tau: Option<f64>,
    pub table: Table,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub config: ScenarioConfig,
    pub dim: usize,
    /// Initial-state population beyond the truncation.
    pub tail_mass: f64,
    /// Revival time `t` of the initial state under intensity-dependent
    /// coupling; the only output that depends on `λ`.
    pub revival_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_normalization: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub artifacts: Vec<Artifact>,
    pub metadata: Metadata,
}

impl RunOutput {
    /// Metadata specialised to one artifact.
    pub fn metadata_for(&self, artifact: &Artifact) -> Metadata {
        let mut meta = self.metadata.clone();
        meta.tau = artifact.tau;
        if artifact.tau.is_some() {
            meta.q_normalization = artifact_normalization(&self.metadata.config, &artifact.table);
        }
        meta
    }
}

fn artifact_normalization(cfg: &ScenarioConfig, table: &Table) -> Option<f64> {
    let spec = cfg.grid_spec()?;
    let q = table.column("Q")?;
    Some(q.iter().sum::<f64>() * spec.cell_area())
}

fn context(cfg: &ScenarioConfig) -> String {
    format!("alpha = {}, dim = {}", cfg.alpha, cfg.dim)
}

fn at_tau(cfg: &ScenarioConfig, tau: f64) -> String {
    format!("alpha = {}, dim = {}, tau = {tau}", cfg.alpha, cfg.dim)
}

fn params(cfg: &ScenarioConfig, tau: f64, mode: CouplingMode) -> Result<EvolutionParams, CliError> {
    EvolutionParams::new(cfg.lambda, tau, mode, cfg.dim).map_err(|e| CliError::numeric(at_tau(cfg, tau), e))
}

/// Equal mixture of `|α⟩⟨α|` and `|−α⟩⟨−α|`.
fn coherent_mixture(cfg: &ScenarioConfig) -> Result<DensityMatrix, CliError> {
    let build = || {
        let plus = pure_density(&make_coherent(C64::new(cfg.alpha, 0.0), cfg.dim)?);
        let minus = pure_density(&make_coherent(C64::new(-cfg.alpha, 0.0), cfg.dim)?);
        mix(&[(0.5, &plus), (0.5, &minus)])
    };
    build().map_err(|e| CliError::numeric(context(cfg), e))
}

fn cat_density(cfg: &ScenarioConfig) -> Result<DensityMatrix, CliError> {
    make_cat(&cfg.cat_spec(), cfg.dim)
        .map(|psi| pure_density(&psi))
        .map_err(|e| CliError::numeric(context(cfg), e))
}

fn sweep<F>(cfg: &ScenarioConfig, row: F) -> Result<Vec<Vec<f64>>, CliError>
where
    F: Fn(f64) -> Result<Vec<f64>, CliError> + Send + Sync,
{
    cfg.tau_grid().into_par_iter().map(row).collect()
}

fn purity_mixture(cfg: &ScenarioConfig) -> Result<Table, CliError> {
    let rho0 = coherent_mixture(cfg)?;
    let rows = sweep(cfg, |tau| {
        let rho = evolve_field(&rho0, &params(cfg, tau, CouplingMode::IntensityDependent)?)
            .map_err(|e| CliError::numeric(at_tau(cfg, tau), e))?;
        let closed = purity_mixture_closed(cfg.alpha, tau, cfg.dim).map_err(|e| CliError::numeric(at_tau(cfg, tau), e))?;
        Ok(vec![tau, purity_defect(&rho), closed])
    })?;
    Ok(Table::new(vec!["tau", "zeta_numeric", "zeta_closed"], rows))
}

fn inversion_cat(cfg: &ScenarioConfig) -> Result<Table, CliError> {
    let rho0 = cat_density(cfg)?;
    let rows = sweep(cfg, |tau| {
        let w = atomic_inversion(&rho0, &params(cfg, tau, CouplingMode::IntensityDependent)?)
            .map_err(|e| CliError::numeric(at_tau(cfg, tau), e))?;
        let closed =
            inversion_cat_closed(cfg.alpha, cfg.parity_r, tau).map_err(|e| CliError::numeric(at_tau(cfg, tau), e))?;
        Ok(vec![tau, w, closed])
    })?;
    Ok(Table::new(vec!["tau", "W_numeric", "W_closed"], rows))
}

fn cat_transition(cfg: &ScenarioConfig) -> Result<Table, CliError> {
    let rho0 = cat_density(cfg)?;
    let targets = || {
        let even = make_cat(&CatSpec::even(C64::new(cfg.alpha, 0.0))?, cfg.dim)?;
        let odd = make_cat(&CatSpec::odd(C64::new(0.0, cfg.alpha))?, cfg.dim)?;
        Ok((even, odd))
    };
    let (even, odd) = targets().map_err(|e| CliError::numeric(context(cfg), e))?;
    let rows = sweep(cfg, |tau| {
        let p = params(cfg, tau, CouplingMode::IntensityDependent)?;
        let run = || {
            let pe = excited_population(&rho0, &p)?;
            let rho = evolve_field(&rho0, &p)?;
            Ok(vec![tau, pe, fidelity_with_pure(&rho, &even)?, fidelity_with_pure(&rho, &odd)?])
        };
        run().map_err(|e| CliError::numeric(at_tau(cfg, tau), e))
    })?;
    Ok(Table::new(
        vec!["tau", "P_excited", "fidelity_even_cat_alpha", "fidelity_odd_cat_i_alpha"],
        rows,
    ))
}

fn ordinary_contrast(cfg: &ScenarioConfig) -> Result<Table, CliError> {
    let rho0 = coherent_mixture(cfg)?;
    let rows = sweep(cfg, |tau| {
        let zeta = |mode| -> Result<f64, CliError> {
            evolve_field(&rho0, &params(cfg, tau, mode)?)
                .map(|rho| purity_defect(&rho))
                .map_err(|e| CliError::numeric(at_tau(cfg, tau), e))
        };
        Ok(vec![tau, zeta(CouplingMode::IntensityDependent)?, zeta(CouplingMode::Ordinary)?])
    })?;
    Ok(Table::new(vec!["tau", "zeta_ID", "zeta_ordinary"], rows))
}

fn qfunc_mixture(cfg: &ScenarioConfig) -> Result<Vec<(f64, Table)>, CliError> {
    let rho0 = coherent_mixture(cfg)?;
    let spec = cfg.grid_spec().expect("validated qfunc configs carry a grid");
    cfg.q_taus
        .iter()
        .map(|&tau| {
            let p = params(cfg, tau, CouplingMode::IntensityDependent)?;
            let grid = evolve_field(&rho0, &p)
                .and_then(|rho| q_grid(&rho, &spec))
                .map_err(|e| CliError::numeric(at_tau(cfg, tau), e))?;
            let rows = grid.rows().map(|(x, y, q)| vec![x, y, q]).collect();
            Ok((tau, Table::new(vec!["x", "y", "Q"], rows)))
        })
        .collect()
}

/// `out.csv` → `out_tau{k}.csv` for the k-th snapshot.
pub fn snapshot_path(base: &Path, index: usize) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}_tau{index}.{}", ext.to_string_lossy()),
        None => format!("{stem}_tau{index}"),
    };
    base.with_file_name(name)
}

/// Evaluates the scenario without touching the filesystem.
pub fn compute_scenario(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let single = |table| {
        vec![Artifact { path: cfg.output_path.clone(), tau: None, table }]
    };
    let artifacts = match cfg.scenario {
        Scenario::PurityMixture => single(purity_mixture(cfg)?),
        Scenario::InversionCat => single(inversion_cat(cfg)?),
        Scenario::CatTransition => single(cat_transition(cfg)?),
        Scenario::OrdinaryContrast => single(ordinary_contrast(cfg)?),
        Scenario::QfuncMixture => qfunc_mixture(cfg)?
            .into_iter()
            .enumerate()
            .map(|(k, (tau, table))| Artifact { path: snapshot_path(&cfg.output_path, k), tau: Some(tau), table })
            .collect(),
    };
    let initial = match cfg.scenario {
        Scenario::InversionCat | Scenario::CatTransition => cfg.cat_spec(),
        _ => CatSpec::coherent(C64::new(cfg.alpha, 0.0)),
    };
    let metadata = Metadata {
        config: cfg.clone(),
        dim: cfg.dim,
        tail_mass: initial.tail_mass(cfg.dim),
        revival_time: revival_time(&initial, cfg.lambda),
        tau: None,
        q_normalization: None,
    };
    Ok(RunOutput { artifacts, metadata })
}

fn check_pair(
    name: &str,
    table: &Table,
    numeric: &str,
    closed: impl Fn(&[f64]) -> Result<f64, String>,
    out: &mut Vec<String>,
) {
    let idx = table.columns().iter().position(|c| *c == numeric).expect("column exists");
    for row in table.rows() {
        let expected = match closed(row) {
            Ok(v) => v,
            Err(msg) => {
                out.push(msg);
                continue;
            }
        };
        let diff = (row[idx] - expected).abs();
        if !(diff <= SELF_CHECK_TOL) {
            out.push(format!("{name}: {numeric} = {} vs {expected} at tau = {} (|diff| = {diff:e})", row[idx], row[0]));
        }
    }
}

fn check_range(table: &Table, column: &str, lo: f64, hi: f64, out: &mut Vec<String>) {
    let idx = table.columns().iter().position(|c| *c == column).expect("column exists");
    for row in table.rows() {
        let v = row[idx];
        if !(v >= lo - RANGE_SLACK && v <= hi + RANGE_SLACK) {
            out.push(format!("{column} = {v} outside [{lo}, {hi}] in row starting {}", row[0]));
        }
    }
}

/// Checks a computed run against closed forms and range invariants.
/// Returns one message per violation.
pub fn self_check(cfg: &ScenarioConfig, run: &RunOutput) -> Vec<String> {
    let mut failures = Vec::new();
    let oracle_failed = |tau: f64, e: idjc_core::Error| format!("closed form unavailable at tau = {tau}: {e}");
    for artifact in &run.artifacts {
        let t = &artifact.table;
        match cfg.scenario {
            Scenario::PurityMixture => {
                check_pair("purity", t, "zeta_numeric", |r| Ok(r[2]), &mut failures);
                check_range(t, "zeta_numeric", 0.0, 1.0, &mut failures);
            }
            Scenario::InversionCat => {
                check_pair("inversion", t, "W_numeric", |r| Ok(r[2]), &mut failures);
                check_range(t, "W_numeric", -1.0, 1.0, &mut failures);
            }
            Scenario::CatTransition => {
                let closed = |r: &[f64]| {
                    inversion_cat_closed(cfg.alpha, cfg.parity_r, r[0])
                        .map(|w| 0.5 * (1.0 + w))
                        .map_err(|e| oracle_failed(r[0], e))
                };
                check_pair("excited population", t, "P_excited", closed, &mut failures);
                for col in ["P_excited", "fidelity_even_cat_alpha", "fidelity_odd_cat_i_alpha"] {
                    check_range(t, col, 0.0, 1.0, &mut failures);
                }
            }
            Scenario::OrdinaryContrast => {
                let closed =
                    |r: &[f64]| purity_mixture_closed(cfg.alpha, r[0], cfg.dim).map_err(|e| oracle_failed(r[0], e));
                check_pair("purity", t, "zeta_ID", closed, &mut failures);
                check_range(t, "zeta_ID", 0.0, 1.0, &mut failures);
                check_range(t, "zeta_ordinary", 0.0, 1.0, &mut failures);
            }
            Scenario::QfuncMixture => {
                let tau = artifact.tau.expect("snapshots carry their time");
                check_range(t, "Q", 0.0, std::f64::consts::FRAC_1_PI, &mut failures);
                let mismatches: Vec<String> = t
                    .rows()
                    .par_iter()
                    .filter_map(|r| {
                        let closed = match q_mixture_closed(cfg.alpha, tau, C64::new(r[0], r[1])) {
                            Ok(q) => q,
                            Err(e) => return Some(oracle_failed(tau, e)),
                        };
                        let diff = (r[2] - closed).abs();
                        (!(diff <= SELF_CHECK_TOL))
                            .then(|| format!("Q({}, {}) = {} vs {closed} at tau = {tau}", r[0], r[1], r[2]))
                    })
                    .collect();
                failures.extend(mismatches);
            }
        }
    }
    failures
}

/// Computes, optionally self-checks, then writes every artifact.
pub fn run_scenario(cfg: &ScenarioConfig, check: bool) -> Result<RunOutput, CliError> {
    let run = compute_scenario(cfg)?;
    if check {
        let failures = self_check(cfg, &run);
        if !failures.is_empty() {
            return Err(CliError::SelfCheck(failures));
        }
    }
    for artifact in &run.artifacts {
        output::write_artifact(artifact, &run.metadata_for(artifact), cfg.output_format)?;
    }
    Ok(run)
}
