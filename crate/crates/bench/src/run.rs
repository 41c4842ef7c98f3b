//! Executes one resolved configuration and writes its outputs.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use hyperpint::blockprec::{char_outer_iteration, OuterOptions};
use hyperpint::nonlinear::{nested_solve, nonlinear_solve, replicate_initial, LinearMode, NestedLevel, NonlinearConfig};
use hyperpint::problems::{AcousticsProblem, MaterialId, NonlinearProblem};
use hyperpint::{SolveStatus, SolverReport, SpaceTimeGrid, SpaceTimeVector};
use serde::Serialize;

use crate::config::{Kind, LinearArg, RunConfig, SnapshotTime};
use crate::csvio::{write_residuals, write_snapshot, Snapshot};
use crate::BenchError;

#[derive(Debug, Clone, Serialize)]
pub struct GridInfo {
    pub nx: usize,
    pub nt: usize,
    pub h: f64,
    pub dt: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub t_final: f64,
    /// `dt / h` times the largest initial wave speed.
    pub effective_cfl: f64,
}

/// Contents of `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub grid: GridInfo,
    pub status: SolveStatus,
    pub iterations: usize,
    pub final_relative_residual: f64,
    /// Why the finest solve stopped early, if it did.
    pub failure: Option<String>,
    /// One entry per mesh; a single entry unless nested iteration ran.
    pub levels: Vec<LevelReport>,
    pub snapshots: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelReport {
    pub nx: usize,
    pub nt: usize,
    pub report: SolverReport,
}

pub fn var_names(kind: Kind) -> &'static [&'static str] {
    match kind {
        Kind::Acoustics => &["p", "u"],
        Kind::Swe => &["h", "hu"],
        Kind::Euler => &["rho", "rhou", "E"],
    }
}

/// Exit code for a finished solve.
pub fn status_code(s: SolveStatus) -> u8 {
    match s {
        SolveStatus::Converged => 0,
        SolveStatus::MaxIterations => 3,
        SolveStatus::Diverged => 4,
        SolveStatus::Inadmissible => 5,
    }
}

fn grid_info(g: &SpaceTimeGrid, max_speed: f64) -> GridInfo {
    GridInfo {
        nx: g.nx(),
        nt: g.nt(),
        h: g.h(),
        dt: g.dt(),
        x_lo: g.x_lo(),
        x_hi: g.x_hi(),
        t_final: g.t_final(),
        effective_cfl: g.ratio() * max_speed,
    }
}

/// Time index of each requested snapshot; times off the grid are rounded to the nearest level.
fn snapshot_levels(times: &[SnapshotTime], g: &SpaceTimeGrid) -> Result<Vec<usize>, BenchError> {
    let last = g.nt() - 1;
    times
        .iter()
        .map(|t| match *t {
            SnapshotTime::Final => Ok(last),
            SnapshotTime::At(t) => {
                let n = (t / g.dt()).round();
                if n > last as f64 {
                    Err(BenchError::Usage(format!("snapshot time {t} is past the final time {}", g.t_final())))
                } else {
                    Ok(n as usize)
                }
            }
        })
        .collect()
}

fn snapshot_at(kind: Kind, g: &SpaceTimeGrid, q: &SpaceTimeVector, n: usize) -> Snapshot {
    let nx = g.nx();
    Snapshot {
        vars: var_names(kind).iter().map(|s| s.to_string()).collect(),
        t: g.t(n),
        x: g.cell_centers(),
        values: q.at(n).chunks(nx).map(<[f64]>::to_vec).collect(),
    }
}

/// Runs `cfg`, writes all outputs under `cfg.out`, and returns the report.
pub fn execute(cfg: &RunConfig) -> Result<RunReport, BenchError> {
    let (grid, max_speed, q, levels) = match cfg.kind {
        Kind::Acoustics => solve_acoustics(cfg)?,
        Kind::Swe | Kind::Euler => solve_nonlinear(cfg)?,
    };
    let snaps = snapshot_levels(&cfg.snapshot, &grid)?;
    fs::create_dir_all(&cfg.out)?;
    let mut names = Vec::new();
    for n in snaps {
        let snap = snapshot_at(cfg.kind, &grid, &q, n);
        let name = format!("snapshot_{:.6}.csv", snap.t);
        write_snapshot(BufWriter::new(File::create(cfg.out.join(&name))?), &snap)?;
        names.push(name);
    }
    let fine = &levels.last().expect("at least one level").report;
    write_residuals(BufWriter::new(File::create(cfg.out.join("residuals.csv"))?), &fine.residual_history)?;
    let report = RunReport {
        config: cfg.clone(),
        grid: grid_info(&grid, max_speed),
        status: fine.status,
        iterations: fine.iterations,
        final_relative_residual: fine.final_relative_residual(),
        failure: match fine.status {
            SolveStatus::Converged => None,
            _ => Some(fine.failure.clone().unwrap_or_else(|| format!("{:?}", fine.status).to_lowercase())),
        },
        levels,
        snapshots: names,
    };
    write_json(&cfg.out.join("report.json"), &report)?;
    Ok(report)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), BenchError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    std::io::Write::write_all(&mut w, b"\n")?;
    Ok(())
}

type Solved = (SpaceTimeGrid, f64, SpaceTimeVector, Vec<LevelReport>);

fn solve_acoustics(cfg: &RunConfig) -> Result<Solved, BenchError> {
    let id = MaterialId::from_index(cfg.material.unwrap_or(1))?;
    let p = AcousticsProblem::new(id, cfg.nx, cfg.nt, cfg.cfl, cfg.seed)?;
    let b = p.rhs()?;
    let q0 = SpaceTimeVector::zeros(2, cfg.nx, p.grid().nt());
    let opts = OuterOptions { maxit: cfg.maxit, tol: cfg.tol, ..OuterOptions::default() };
    let (q, report) = char_outer_iteration(&p.step, &b, &q0, cfg.prec_config(), opts)?;
    let g = p.grid().clone();
    let speed = hyperpint::problems::material_max_speed(id, cfg.seed);
    Ok((g.clone(), speed, q, vec![LevelReport { nx: g.nx(), nt: g.nt(), report }]))
}

fn solve_nonlinear(cfg: &RunConfig) -> Result<Solved, BenchError> {
    let id = cfg.problem.expect("nonlinear run has a problem");
    let prob = NonlinearProblem::new(id, cfg.eps.expect("nonlinear run has eps"))?;
    let ncfg = NonlinearConfig {
        maxit: cfg.maxit,
        tol: cfg.tol,
        inner_it: cfg.inner_it,
        m: cfg.m,
        linear_mode: match cfg.linear {
            LinearArg::Exact => LinearMode::Exact,
            LinearArg::Prec => LinearMode::Preconditioned(cfg.prec_config()),
        },
        ..NonlinearConfig::default()
    };
    let mut meshes = vec![cfg.nx];
    if cfg.nested {
        while meshes[0] / 2 >= 64 && meshes[0] % 2 == 0 {
            meshes.insert(0, meshes[0] / 2);
        }
    }
    let fine_nt = cfg.nt;
    let mut levels = Vec::with_capacity(meshes.len());
    for &nx in &meshes {
        let nt = if nx == cfg.nx { fine_nt } else { None };
        let step = prob.step(prob.grid(nx, Some(cfg.cfl), nt)?);
        let q0 = prob.discrete_initial(step.grid());
        levels.push(NestedLevel { step, q0 });
    }
    let results = if levels.len() == 1 {
        let lv = &levels[0];
        let g = lv.step.grid();
        let init = replicate_initial(&lv.q0, lv.step.nvars(), g.nx(), g.nt())?;
        vec![nonlinear_solve(&lv.step, &lv.q0, &init, &ncfg)?]
    } else {
        nested_solve(&levels, &ncfg)?
    };
    let reached = results.len();
    let reports: Vec<LevelReport> = results
        .iter()
        .zip(&levels)
        .map(|((_, r), lv)| LevelReport { nx: lv.step.grid().nx(), nt: lv.step.grid().nt(), report: r.clone() })
        .collect();
    let (q, _) = results.into_iter().last().expect("nested solve returns a level");
    let g = levels[reached - 1].step.grid().clone();
    Ok((g, prob.max_initial_speed(), q, reports))
}
