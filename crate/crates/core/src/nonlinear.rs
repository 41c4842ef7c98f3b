//! Preconditioned residual correction for nonlinear all-at-once systems, and
//! nested iteration over a sequence of space-time meshes.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::blockprec::{char_outer_iteration, OuterOptions, PrecConfig};
use crate::conslaw::{LinearizedSystem, NonlinearStep};
use crate::error::{check_len, PintError, Result};
use crate::grid::{
    all_at_once_residual, f_relax, forward_solve, CfSplitting, SpaceTimeGrid, SpaceTimeVector,
};
use crate::report::{SolveStatus, SolverReport};

/// How each linearized correction equation is solved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinearMode {
    /// Sequential time stepping (exact).
    Exact,
    /// `inner_it` iterations of the characteristic block preconditioned iteration.
    Preconditioned(PrecConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearConfig {
    pub maxit: usize,
    pub tol: f64,
    pub inner_it: usize,
    /// CF-splitting factor of the nonlinear F-relaxation.
    pub m: usize,
    pub linear_mode: LinearMode,
    pub divergence: f64,
}

impl Default for NonlinearConfig {
    fn default() -> Self {
        NonlinearConfig {
            maxit: 15,
            tol: 1e-10,
            inner_it: 1,
            m: 8,
            linear_mode: LinearMode::Exact,
            divergence: 1e6,
        }
    }
}

impl NonlinearConfig {
    pub fn validate(&self) -> Result<()> {
        if self.maxit < 1 {
            return Err(PintError::InvalidParameter("maxit must be >= 1".into()));
        }
        if self.inner_it < 1 {
            return Err(PintError::InvalidParameter("inner_it must be >= 1".into()));
        }
        if let LinearMode::Preconditioned(p) = self.linear_mode {
            p.validate()?;
        }
        CfSplitting::new(self.m).map(|_| ())
    }
}

fn inadmissible_report(report: &mut SolverReport, err: &PintError) {
    report.failure = Some(err.to_string());
    report.finish(SolveStatus::Inadmissible);
}

/// Solves `N(q) = b`, `b = (q0, 0, ..., 0)`, from the iterate `q_init`.
///
/// Inadmissible states end the solve with status [`SolveStatus::Inadmissible`];
/// the returned trajectory is the last iterate.
pub fn nonlinear_solve(
    step: &NonlinearStep,
    q0: &[f64],
    q_init: &SpaceTimeVector,
    cfg: &NonlinearConfig,
) -> Result<(SpaceTimeVector, SolverReport)> {
    let clock = Instant::now();
    cfg.validate()?;
    let grid = step.grid();
    let l = step.nvars();
    check_len("initial iterate variables", l, q_init.nvars())?;
    check_len("initial iterate cells", grid.nx(), q_init.nx())?;
    check_len("initial iterate time points", grid.nt(), q_init.nt())?;
    let cf = CfSplitting::new(cfg.m)?;
    let b = SpaceTimeVector::initial_value_rhs(q0, l, grid.nx(), grid.nt())?;
    let mut q = q_init.clone();
    q.at_mut(0).copy_from_slice(q0);

    let mut report = SolverReport::start(f64::NAN);
    let mut inner_counts = Vec::new();
    let mut r0 = 0.0;
    let mut k = 0;
    let status = loop {
        let r = match f_relax(step, &mut q, &cf).and_then(|_| all_at_once_residual(step, &q, &b)) {
            Ok(r) => r,
            Err(e) if e.is_inadmissible() => {
                inadmissible_report(&mut report, &e);
                break SolveStatus::Inadmissible;
            }
            Err(e) => return Err(e),
        };
        let norm = r.norm();
        if k == 0 {
            r0 = norm;
            report.initial_residual_norm = r0;
            if r0 == 0.0 {
                break SolveStatus::Converged;
            }
            if !r0.is_finite() {
                report.failure = Some("initial residual is not finite".into());
                break SolveStatus::Diverged;
            }
        } else {
            let rel = norm / r0;
            report.residual_history.push(rel);
            report.iterations = k;
            if !rel.is_finite() || rel > cfg.divergence {
                report.failure = Some(format!("relative residual reached {rel:e}"));
                break SolveStatus::Diverged;
            }
            if rel <= cfg.tol {
                break SolveStatus::Converged;
            }
        }
        if k == cfg.maxit {
            break SolveStatus::MaxIterations;
        }
        let lin = match LinearizedSystem::new(step.model().clone(), grid.clone(), &q) {
            Ok(lin) => lin,
            Err(e) if e.is_inadmissible() => {
                inadmissible_report(&mut report, &e);
                break SolveStatus::Inadmissible;
            }
            Err(e) => return Err(e),
        };
        let e = match cfg.linear_mode {
            LinearMode::Exact => forward_solve(&lin, &r)?,
            LinearMode::Preconditioned(pc) => {
                let opts = OuterOptions {
                    maxit: cfg.inner_it,
                    tol: 0.0,
                    divergence: f64::INFINITY,
                };
                let (e, rep) = char_outer_iteration(&lin, &r, &r, pc, opts)?;
                inner_counts.push(rep.iterations);
                report.coarse_solve_fallbacks += rep.coarse_solve_fallbacks;
                e
            }
        };
        q.add_assign(&e)?;
        k += 1;
    };
    if let LinearMode::Preconditioned(_) = cfg.linear_mode {
        report.inner_iteration_counts = Some(inner_counts);
    }
    if status != SolveStatus::Inadmissible {
        report.finish(status);
    }
    report.elapsed_secs = clock.elapsed().as_secs_f64();
    Ok((q, report))
}

/// Initial iterate equal to `q0` at every time point.
pub fn replicate_initial(q0: &[f64], nvars: usize, nx: usize, nt: usize) -> Result<SpaceTimeVector> {
    check_len("initial block", nvars * nx, q0.len())?;
    let mut v = SpaceTimeVector::zeros(nvars, nx, nt);
    for n in 0..nt {
        v.at_mut(n).copy_from_slice(q0);
    }
    Ok(v)
}

/// Floor and fractional weight of `num / den` for a positive denominator.
fn rational_position(num: i64, den: i64) -> (i64, f64) {
    let j = num.div_euclid(den);
    (j, num.rem_euclid(den) as f64 / den as f64)
}

/// Piecewise-linear interpolation in `x` (between cell centres) and `t` of a
/// trajectory onto a finer mesh over the same space-time domain.
pub fn interpolate_trajectory(
    coarse: &SpaceTimeVector,
    coarse_grid: &SpaceTimeGrid,
    fine_grid: &SpaceTimeGrid,
) -> Result<SpaceTimeVector> {
    check_len("coarse trajectory cells", coarse_grid.nx(), coarse.nx())?;
    check_len("coarse trajectory time points", coarse_grid.nt(), coarse.nt())?;
    let (ncx, nfx) = (coarse_grid.nx() as i64, fine_grid.nx() as i64);
    let (nct, nft) = (coarse_grid.nt() as i64 - 1, fine_grid.nt() as i64 - 1);
    let bc = fine_grid.bc();
    let l = coarse.nvars();
    let mut out = SpaceTimeVector::zeros(l, fine_grid.nx(), fine_grid.nt());
    let xpos: Vec<(usize, usize, f64)> = (0..nfx)
        .map(|i| {
            let (j, w) = rational_position((2 * i + 1) * ncx - nfx, 2 * nfx);
            (
                bc.cell(j as isize, ncx as usize),
                bc.cell(j as isize + 1, ncx as usize),
                w,
            )
        })
        .collect();
    for n in 0..=nft {
        let (jt, wt) = rational_position(n * nct, nft);
        let j0 = jt as usize;
        let j1 = (j0 + 1).min(nct as usize);
        for s in 0..l {
            for (i, &(a, b, wx)) in xpos.iter().enumerate() {
                let at = |jj: usize| (1.0 - wx) * coarse.get(s, a, jj) + wx * coarse.get(s, b, jj);
                let v = if wt == 0.0 {
                    at(j0)
                } else {
                    (1.0 - wt) * at(j0) + wt * at(j1)
                };
                out.set(s, i, n as usize, v);
            }
        }
    }
    Ok(out)
}

/// One mesh of a nested-iteration sequence.
#[derive(Debug, Clone)]
pub struct NestedLevel {
    pub step: NonlinearStep,
    /// Discrete initial condition on this mesh.
    pub q0: Vec<f64>,
}

/// Solves on each mesh in turn, starting every mesh after the first from the
/// interpolated solution of its predecessor; the first starts from the
/// replicated initial condition.
pub fn nested_solve(
    levels: &[NestedLevel],
    cfg: &NonlinearConfig,
) -> Result<Vec<(SpaceTimeVector, SolverReport)>> {
    let mut results: Vec<(SpaceTimeVector, SolverReport)> = Vec::with_capacity(levels.len());
    for (k, lv) in levels.iter().enumerate() {
        let g = lv.step.grid();
        let mut init = match results.last() {
            None => replicate_initial(&lv.q0, lv.step.nvars(), g.nx(), g.nt())?,
            Some((prev, _)) => interpolate_trajectory(prev, levels[k - 1].step.grid(), g)?,
        };
        init.at_mut(0).copy_from_slice(&lv.q0);
        let res = nonlinear_solve(&lv.step, &lv.q0, &init, cfg)?;
        let failed = matches!(res.1.status, SolveStatus::Inadmissible | SolveStatus::Diverged);
        results.push(res);
        if failed {
            break;
        }
    }
    Ok(results)
}
