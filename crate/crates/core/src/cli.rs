// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Pipelines behind the `qswt` binary. Each command reads an edge list and
//! writes one CSV table.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use crate::error::Result;
use crate::graph::{self, parse_edge_list, DirectedGraph};
use crate::lindblad::{build_qsw, steady_state, QswModel};
use crate::report::{fmt_f64, fmt_opt};
use crate::tilt::{
    self, crossover, limit_point, scan, uniform_grid, write_scan_csv, Crossover, LimitMode,
    TiltVector,
};
use crate::trajectory::{self, run_ensemble, InitialState};

/// Exit status for bad input or usage.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for numerical failure.
pub const EXIT_NUMERICAL: i32 = 3;

/// Parameters shared by every command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub damping: f64,
    pub coherent_weight: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub s_steps: usize,
    pub fd_step: f64,
    pub t_max: f64,
    pub dt: f64,
    pub n_traj: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub limit_mode: LimitMode,
    pub initial: InitialState,
    pub events: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: PathBuf::new(),
            damping: graph::DEFAULT_DAMPING,
            coherent_weight: 1.0,
            s_min: -3.0,
            s_max: 3.0,
            s_steps: 61,
            fd_step: tilt::DEFAULT_FD_STEP,
            t_max: 200.0,
            dt: trajectory::DEFAULT_DT,
            n_traj: 1000,
            seed: 0,
            output: None,
            limit_mode: LimitMode::None,
            initial: InitialState::UniformSuperposition,
            events: None,
        }
    }
}

impl RunConfig {
    pub fn with_input(input: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            ..Self::default()
        }
    }

    pub fn graph(&self) -> Result<DirectedGraph> {
        parse_edge_list(&fs::read_to_string(&self.input)?)
    }

    pub fn model(&self) -> Result<QswModel> {
        build_qsw(&self.graph()?, self.damping, self.coherent_weight)
    }
}

/// `node,score` rows of the classical pagerank.
pub fn cmd_pagerank<W: Write>(config: &RunConfig, out: W) -> Result<()> {
    let g = graph::google_matrix(&config.graph()?, config.damping)?;
    let pi = graph::pagerank(&g, graph::DEFAULT_PAGERANK_TOL)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "score"])?;
    for (i, p) in pi.as_slice().iter().enumerate() {
        w.write_record([i.to_string(), fmt_f64(*p)])?;
    }
    w.flush()?;
    Ok(())
}

/// Classical pagerank, activity at s = 0 and steady-state populations side by side.
pub fn cmd_ranks<W: Write>(config: &RunConfig, out: W) -> Result<()> {
    let model = config.model()?;
    let pi = graph::pagerank(model.google(), graph::DEFAULT_PAGERANK_TOL)?;
    let alpha = tilt::activity(&model, &TiltVector::zeros(model.n()), config.fd_step)?;
    let pop = steady_state(&model)?.populations();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "pagerank", "activity0", "population"])?;
    for i in 0..model.n() {
        w.write_record([
            i.to_string(),
            fmt_f64(pi[i]),
            fmt_f64(alpha[i]),
            fmt_f64(pop[i]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// What a scan found besides its table.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSummary {
    pub points: usize,
    pub failures: usize,
    /// Grid value and data at the largest global dispersion.
    pub crossover: Option<(f64, Crossover)>,
}

/// Uniform-s scan; a limit mode appends the corresponding `±inf` row.
pub fn cmd_scan<W: Write>(config: &RunConfig, out: W) -> Result<ScanSummary> {
    let model = config.model()?;
    let grid = uniform_grid(model.n(), config.s_min, config.s_max, config.s_steps)?;
    let points = scan(&model, &grid, config.fd_step);
    let mut extra = Vec::new();
    match config.limit_mode {
        LimitMode::None => {}
        LimitMode::Inactive => {
            extra.push(("inf".to_string(), limit_point(&model, LimitMode::Inactive)?))
        }
        LimitMode::Active => {
            extra.push(("-inf".to_string(), limit_point(&model, LimitMode::Active)?))
        }
    }
    write_scan_csv(model.n(), &grid, &points, &extra, out)?;
    let crossover = crossover(&points).map(|c| (grid[c.index].as_slice()[0], c));
    Ok(ScanSummary {
        points: points.len(),
        failures: points.iter().filter(|p| p.is_err()).count(),
        crossover,
    })
}

/// Monte Carlo count statistics compared against the spectral values at s = 0.
pub fn cmd_simulate<W: Write>(config: &RunConfig, out: W) -> Result<()> {
    let model = config.model()?;
    let run = run_ensemble(
        &model,
        &config.initial,
        config.t_max,
        config.dt,
        config.n_traj,
        config.seed,
        config.events.is_some(),
    )?;
    let reference =
        tilt::Tilting::per_node(&model).point(&TiltVector::zeros(model.n()), config.fd_step)?;
    let stats = &run.stats;

    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "node",
        "mean_rate",
        "standard_error",
        "var_rate",
        "dispersion_hat",
        "dispersion_se",
        "activity0",
        "z_activity",
        "dispersion0",
        "z_dispersion",
    ])?;
    let pick = |v: &Option<Vec<f64>>, i: usize| v.as_ref().map(|v| v[i]);
    for i in 0..model.n() {
        let se = pick(&stats.standard_errors, i);
        let d_hat = pick(&stats.dispersion_hat, i);
        let d_se = pick(&stats.dispersion_standard_errors, i);
        let a0 = reference.alpha[i];
        let d0 = reference.delta[i];
        let z_a = se
            .filter(|&s| s > 0.0)
            .map(|s| (stats.mean_rate[i] - a0) / s);
        let z_d = match (d_hat, d_se, d0) {
            (Some(d), Some(s), Some(d0)) if s > 0.0 => Some((d - d0) / s),
            _ => None,
        };
        w.write_record([
            i.to_string(),
            fmt_f64(stats.mean_rate[i]),
            fmt_opt(se),
            fmt_opt(pick(&stats.var_rate, i)),
            fmt_opt(d_hat),
            fmt_opt(d_se),
            fmt_f64(a0),
            fmt_opt(z_a),
            fmt_opt(d0),
            fmt_opt(z_d),
        ])?;
    }
    w.flush()?;

    if let Some(path) = &config.events {
        let mut ew = csv::Writer::from_path(path)?;
        ew.write_record(["trajectory", "time", "dst", "src"])?;
        for (idx, rec) in run.records.iter().enumerate() {
            for e in &rec.jump_events {
                ew.write_record([
                    idx.to_string(),
                    fmt_f64(e.time),
                    e.dst.to_string(),
                    e.src.to_string(),
                ])?;
            }
        }
        ew.flush()?;
    }
    Ok(())
}
