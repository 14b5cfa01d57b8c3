//! Command dispatch and report assembly.

use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use qgraph_core::checks::{check_instance, run_campaign, CheckRecord, Outcome};
use qgraph_core::compactify::generalized_dims;
use qgraph_core::index::{dim_ker_p_star_via_range, dirac_index, kernel_bases, krein_subspaces};
use qgraph_core::random::GraphParams;
use qgraph_core::spectral::{
    find_negative_eigenvalues, find_spectrum, multiplicity_report, zero_modes_direct,
    zero_modes_fast, zero_modes_lemma119, ZeroModeBasis,
};
use qgraph_core::{CMat, Error, MetricGraph, VertexConditions};

use crate::config::RunConfig;
use crate::error::CliError;

/// Default real-axis grid spacing for `spectrum`.
pub const DEFAULT_GRID: f64 = 0.05;
/// Wavenumber passed to the per-instance checks; only the unitarity check
/// uses it, and the single-instance commands do not report that check.
const CHECK_K: f64 = 1.0;

const ZERO_MODE_CHECKS: [&str; 4] = ["zero_mode_oracles", "ntilde_subspaces", "n_equals_ntilde", "gamma_identity"];
const INDEX_CHECKS: [&str; 3] = ["index_theorem", "dirac_square", "gamma_index"];

#[derive(Debug, Clone)]
pub enum Command {
    Spectrum {
        k_max: Option<f64>,
        grid: Option<f64>,
        negative: bool,
        kappa_max: Option<f64>,
    },
    ZeroModes,
    Index,
    Verify {
        seed: u64,
        instances: usize,
        params: GraphParams,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::ZeroModes => "zero-modes",
            Command::Index => "index",
            Command::Verify { .. } => "verify",
        }
    }

    pub fn needs_config(&self) -> bool {
        !matches!(self, Command::Verify { .. })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Value,
    pub result: Value,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
    /// Seconds; the only field that differs between identical runs.
    pub wall_time: f64,
}

fn matrix_json(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
            .collect(),
    )
}

fn echo(cfg: &RunConfig) -> Value {
    json!({
        "graph": cfg.graph.spec(),
        "conditions": { "P": matrix_json(cfg.conditions.p()), "L": matrix_json(cfg.conditions.l()) },
        "params": cfg.params,
    })
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialise")
}

fn selected_checks(graph: &MetricGraph, vc: &VertexConditions, ids: &[&str]) -> Vec<CheckRecord> {
    check_instance(graph, vc, CHECK_K)
        .into_iter()
        .filter(|r| ids.contains(&r.identity))
        .collect()
}

fn solver_entry(r: qgraph_core::Result<ZeroModeBasis>, graph: &MetricGraph, vc: &VertexConditions) -> Result<Value, CliError> {
    match r {
        Ok(z) => Ok(json!({
            "status": "ok",
            "method": z.method,
            "g0": z.g0,
            "residual": z.residual(graph, vc),
            "max_abs_beta": z.max_abs_beta(),
        })),
        Err(Error::FastSolverInapplicable { tau }) => Ok(json!({ "status": "inapplicable", "tau_max": tau })),
        Err(e) => Err(CliError::from_core(e)),
    }
}

fn spectrum(cfg: &RunConfig, k_max: Option<f64>, grid: Option<f64>, negative: bool, kappa_max: Option<f64>) -> Result<Value, CliError> {
    let k_max = k_max
        .or(cfg.params.k_max)
        .ok_or_else(|| CliError::Usage("spectrum needs --k-max (or params.k_max)".into()))?;
    let grid = grid.or(cfg.params.grid).unwrap_or(DEFAULT_GRID);
    let (g, vc) = (&cfg.graph, &cfg.conditions);
    let real = find_spectrum(g, vc, k_max, grid).map_err(CliError::from_core)?;
    let negative = if negative || kappa_max.is_some() {
        let kappa = kappa_max
            .or(cfg.params.kappa_max)
            .ok_or_else(|| CliError::Usage("--negative needs --kappa-max (or params.kappa_max)".into()))?;
        Some(find_negative_eigenvalues(g, vc, kappa).map_err(CliError::from_core)?)
    } else {
        None
    };
    Ok(json!({ "k_max": k_max, "grid": grid, "real_axis": real, "negative": negative }))
}

fn zero_modes(cfg: &RunConfig) -> Result<Value, CliError> {
    let (g, vc) = (&cfg.graph, &cfg.conditions);
    let generalized = if g.is_compact() {
        Value::Null
    } else {
        to_value(&generalized_dims(g, vc, cfg.params.new_lengths.as_deref()).map_err(CliError::from_core)?)
    };
    Ok(json!({
        "fast": solver_entry(zero_modes_fast(g, vc), g, vc)?,
        "direct": solver_entry(zero_modes_direct(g, vc), g, vc)?,
        "stacked": solver_entry(zero_modes_lemma119(g, vc), g, vc)?,
        "multiplicity": multiplicity_report(g, vc).map_err(CliError::from_core)?,
        "generalized": generalized,
    }))
}

fn index(cfg: &RunConfig) -> Result<Value, CliError> {
    let (g, vc) = (&cfg.graph, &cfg.conditions);
    let report = dirac_index(g, vc).map_err(CliError::from_core)?;
    let kb = kernel_bases(g, vc).map_err(CliError::from_core)?;
    let (m_l, e_k) = krein_subspaces(vc).roundtrip_defects(vc.tol());
    Ok(json!({
        "index": report,
        "dim_ker_p_star_via_range": dim_ker_p_star_via_range(g, vc).map_err(CliError::from_core)?,
        "a_residual": kb.a_residual(g, vc),
        "krein_roundtrip": { "m_l": m_l, "e_k": e_k },
    }))
}

/// Runs a command. `cfg` is required for everything except `verify`.
pub fn run_command(cfg: Option<&RunConfig>, cmd: &Command) -> Result<Report, CliError> {
    let start = Instant::now();
    let need = || cfg.ok_or_else(|| CliError::Usage(format!("{} needs --config", cmd.name())));
    let (inputs, result, checks, passed) = match cmd {
        Command::Spectrum {
            k_max,
            grid,
            negative,
            kappa_max,
        } => {
            let cfg = need()?;
            (echo(cfg), spectrum(cfg, *k_max, *grid, *negative, *kappa_max)?, Vec::new(), true)
        }
        Command::ZeroModes => {
            let cfg = need()?;
            let checks = selected_checks(&cfg.graph, &cfg.conditions, &ZERO_MODE_CHECKS);
            (echo(cfg), zero_modes(cfg)?, checks, true)
        }
        Command::Index => {
            let cfg = need()?;
            let checks = selected_checks(&cfg.graph, &cfg.conditions, &INDEX_CHECKS);
            (echo(cfg), index(cfg)?, checks, true)
        }
        Command::Verify {
            seed,
            instances,
            params,
        } => {
            let summary = run_campaign(*seed, *instances, params);
            let passed = summary.all_passed();
            let inputs = json!({ "seed": seed, "instances": instances, "params": params });
            (inputs, to_value(&summary), Vec::new(), passed)
        }
    };
    let passed = passed && checks.iter().all(|c| matches!(c.outcome, Outcome::Pass | Outcome::Skip));
    Ok(Report {
        command: cmd.name(),
        inputs,
        result,
        checks,
        passed,
        wall_time: start.elapsed().as_secs_f64(),
    })
}
